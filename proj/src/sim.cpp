#include "pneu/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

void validate(const SimConfig& cfg) {
  if (!std::isfinite(cfg.dt_max) || !(cfg.dt_max > 0.0)) {
    throw Error(ErrorCode::invalid_input, "dt_max must be > 0");
  }
  if (!std::isfinite(cfg.t_end) || cfg.t_end < 0.0) {
    throw Error(ErrorCode::invalid_input, "t_end must be >= 0");
  }
  if (!std::isfinite(cfg.event_tol) || !(cfg.event_tol > 0.0)) {
    throw Error(ErrorCode::invalid_input, "event_tol must be > 0");
  }
  if (cfg.record_stride == 0) {
    throw Error(ErrorCode::invalid_input, "record_stride must be >= 1");
  }
}

std::vector<TraceEvent> Trace::valve_events() const {
  std::vector<TraceEvent> out;
  for (const auto& e : events) {
    if (e.source == EventSource::Valve) out.push_back(e);
  }
  return out;
}

namespace {

bool vent_open(const CircuitModel& circuit, std::size_t actuator,
               std::span<const FlowStatus> valve_status) {
  if (auto v = circuit.controller_of(circuit.actuators[actuator].id)) {
    return valve_status[*v] == FlowStatus::Unblocked;
  }
  return circuit.actuators[actuator].vent.value_or(VentDecl::Open) == VentDecl::Open;
}

// Armed crossing condition for one threshold detector in its current state.
struct Guard {
  double level = 0.0;
  bool rising = true;
  bool strict = false;

  bool triggered(double p) const {
    if (rising) return strict ? p > level : p >= level;
    return strict ? p < level : p <= level;
  }
};

Guard guard_for(const ThresholdSpec& spec, std::uint8_t bit) {
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) {
    // Closed bound on the high side: rise at p >= P, fall once p < P.
    return bit ? Guard{c->level, false, true} : Guard{c->level, true, false};
  }
  const auto& h = std::get<HystereticThreshold>(spec);
  return bit ? Guard{h.low, false, false} : Guard{h.high, true, false};
}

// Shrinks (lo, hi] around the first point where the guard fires, given that
// it does not fire at lo and does at hi. Returns the firing side.
template <class PressureAt>
double refine(const PressureAt& pressure_at, const Guard& g, double lo, double hi,
              double tol, const std::string& who) {
  for (;;) {
    const double p_hi = pressure_at(hi);
    if (std::abs(p_hi - g.level) <= tol) return hi;
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo) || !(mid < hi)) {
      throw Error(ErrorCode::simulation_stall,
                  "step-size underflow while localizing the crossing of " + who +
                      " at " + format_number(g.level) + " psi");
    }
    if (g.triggered(pressure_at(mid))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
}

// Threshold detector attached to one actuator: a valve's sensing element
// or a monitor.
struct Detector {
  std::size_t actuator = 0;
  ThresholdSpec spec;
  std::uint8_t bit = 0;
  std::string name;
};

std::uint8_t initial_bit(const ThresholdSpec& spec, double p, HystMemory mem) {
  const LogicLevel level = discretize(p, spec, mem);
  return static_cast<std::uint8_t>(level.bit(0));
}

bool unblocked_for(ValveKind kind, std::uint8_t bit) {
  switch (kind) {
    case ValveKind::NC:
    case ValveKind::HNC: return bit != 0;
    case ValveKind::NO:
    case ValveKind::HNO: return bit == 0;
  }
  return false;
}

class Simulator {
 public:
  Simulator(const CircuitModel& circuit, const SimConfig& cfg)
      : circuit_(circuit), cfg_(cfg) {
    const std::size_t n = circuit.actuators.size();
    p_.resize(n);
    p_max_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p_[i] = circuit.actuators[i].p0;
      p_max_[i] = circuit.effective_p_max(i);
    }
    const double top = circuit.max_threshold();
    diverge_limit_ = top > 0.0 ? 10.0 * top : std::numeric_limits<double>::infinity();

    for (const auto& v : circuit.valves) {
      const std::size_t a = *circuit.actuator_index(v.sense);
      detectors_.push_back({a, v.thresholds, initial_bit(v.thresholds, p_[a], v.init_memory),
                            v.id});
    }
    for (const auto& m : circuit.monitors) {
      const std::size_t a = *circuit.actuator_index(m.actuator);
      detectors_.push_back({a, m.threshold, initial_bit(m.threshold, p_[a], HystMemory{}),
                            m.name()});
    }
    status_.resize(circuit.valves.size());
    refresh_status();

    trace_.actuators.reserve(n);
    for (const auto& a : circuit.actuators) trace_.actuators.push_back(a.id);
    for (const auto& v : circuit.valves) {
      trace_.valves.push_back(v.id);
      trace_.hysteretic.push_back(v.hysteretic());
    }
  }

  Trace run() {
    record();
    std::size_t steps = 0;
    std::size_t stalled_events = 0;
    while (t_ < cfg_.t_end) {
      const double remaining = cfg_.t_end - t_;
      const bool last = remaining <= cfg_.dt_max;
      const double h = last ? remaining : cfg_.dt_max;
      std::vector<double> next = advance(p_, h);

      double tau = h;
      bool fired = false;
      for (const auto& d : detectors_) {
        const Guard g = guard_for(d.spec, d.bit);
        if (!g.triggered(next[d.actuator])) continue;
        fired = true;
        auto pressure_at = [&](double s) { return advance(p_, s)[d.actuator]; };
        tau = std::min(tau, refine(pressure_at, g, 0.0, h, cfg_.event_tol, d.name));
      }

      if (!fired) {
        p_ = std::move(next);
        t_ = last ? cfg_.t_end : t_ + h;
        check_divergence();
        ++steps;
        if (steps % cfg_.record_stride == 0 || t_ >= cfg_.t_end) record();
        continue;
      }

      p_ = advance(p_, tau);
      t_ = (last && tau == h) ? cfg_.t_end : t_ + tau;
      check_divergence();
      // Events that barely advance time mean the state is chattering on a
      // threshold.
      stalled_events = tau < 1e-6 * cfg_.dt_max ? stalled_events + 1 : 0;
      const std::size_t before = trace_.events.size();
      commit_events();
      if (stalled_events > 10000) {
        std::string who;
        for (std::size_t i = before; i < trace_.events.size(); ++i) {
          who += (who.empty() ? "" : ", ") + trace_.events[i].name;
        }
        throw Error(ErrorCode::simulation_stall,
                    "events of " + who + " no longer advance time at t=" + format_number(t_));
      }
      record();
    }
    return std::move(trace_);
  }

 private:
  std::vector<double> rates(const std::vector<double>& p) const {
    return derivative(circuit_, p, status_);
  }

  std::vector<double> advance(const std::vector<double>& p, double h) const {
    const std::size_t n = p.size();
    std::vector<double> tmp(n);
    const auto k1 = rates(p);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    const auto k2 = rates(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    const auto k3 = rates(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    const auto k4 = rates(tmp);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = p[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      out[i] = std::clamp(out[i], 0.0, p_max_[i]);
    }
    return out;
  }

  void refresh_status() {
    for (std::size_t v = 0; v < circuit_.valves.size(); ++v) {
      status_[v] = unblocked_for(circuit_.valves[v].kind, detectors_[v].bit)
                       ? FlowStatus::Unblocked
                       : FlowStatus::Blocked;
    }
  }

  // Every detector whose guard holds at the current state switches now, in
  // declaration order: valves first, then monitors.
  void commit_events() {
    const std::size_t nv = circuit_.valves.size();
    for (std::size_t i = 0; i < detectors_.size(); ++i) {
      auto& d = detectors_[i];
      if (!guard_for(d.spec, d.bit).triggered(p_[d.actuator])) continue;
      d.bit ^= 1;
      TraceEvent e;
      e.t = t_;
      e.pressure = p_[d.actuator];
      e.name = d.name;
      if (i < nv) {
        e.source = EventSource::Valve;
        e.index = i;
        e.value = unblocked_for(circuit_.valves[i].kind, d.bit) ? 1 : 0;
      } else {
        e.source = EventSource::Monitor;
        e.index = i - nv;
        e.value = d.bit;
      }
      trace_.events.push_back(std::move(e));
    }
    refresh_status();
  }

  void check_divergence() const {
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (std::isinf(p_max_[i]) && p_[i] > diverge_limit_) {
        throw Error(ErrorCode::diverged,
                    "actuator " + circuit_.actuators[i].id + " diverged: p=" +
                        format_number(p_[i]) + " psi at t=" + format_number(t_));
      }
    }
  }

  void record() {
    TraceSample s;
    s.t = t_;
    s.pressures = p_;
    s.status = status_;
    s.memory.resize(circuit_.valves.size(), 0);
    for (std::size_t v = 0; v < circuit_.valves.size(); ++v) {
      if (circuit_.valves[v].hysteretic()) s.memory[v] = detectors_[v].bit;
    }
    trace_.samples.push_back(std::move(s));
  }

  const CircuitModel& circuit_;
  SimConfig cfg_;
  double t_ = 0.0;
  std::vector<double> p_;
  std::vector<double> p_max_;
  double diverge_limit_ = 0.0;
  std::vector<Detector> detectors_;
  std::vector<FlowStatus> status_;
  Trace trace_;
};

}  // namespace

std::vector<double> derivative(const CircuitModel& circuit,
                               std::span<const double> pressures,
                               std::span<const FlowStatus> valve_status) {
  if (pressures.size() != circuit.actuators.size() ||
      valve_status.size() != circuit.valves.size()) {
    throw Error(ErrorCode::invalid_input, "state size does not match the circuit");
  }
  std::vector<double> dp(pressures.size());
  for (std::size_t i = 0; i < pressures.size(); ++i) {
    const auto& a = circuit.actuators[i];
    if (vent_open(circuit, i, valve_status)) {
      dp[i] = -a.vent_coeff * pressures[i];
    } else {
      dp[i] = pressures[i] >= circuit.effective_p_max(i) ? 0.0 : a.fill_rate;
    }
  }
  return dp;
}

double locate_crossing(const std::function<double(double)>& f, double t_lo,
                       double t_hi, double tol) {
  if (!(t_lo <= t_hi) || !(tol > 0.0)) {
    throw Error(ErrorCode::invalid_input, "locate_crossing needs t_lo <= t_hi and tol > 0");
  }
  double f_lo = f(t_lo);
  const double f_hi = f(t_hi);
  if (f_lo == 0.0) return t_lo;
  if (f_hi == 0.0) return t_hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw Error(ErrorCode::no_crossing, "no sign change on [" + format_number(t_lo) +
                                            ", " + format_number(t_hi) + "]");
  }
  const bool lo_negative = f_lo < 0.0;
  for (;;) {
    if (std::abs(f(t_hi)) <= tol) return t_hi;
    const double mid = t_lo + 0.5 * (t_hi - t_lo);
    if (!(mid > t_lo) || !(mid < t_hi)) {
      throw Error(ErrorCode::simulation_stall, "bisection interval underflow");
    }
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == lo_negative) {
      t_lo = mid;
    } else {
      t_hi = mid;
    }
  }
}

Trace simulate(const CircuitModel& circuit, const SimConfig& cfg) {
  validate(cfg);
  validate(circuit);
  return Simulator(circuit, cfg).run();
}

std::vector<SignalCrossing> scan_signal(const std::function<double(double)>& pressure,
                                        const ThresholdSpec& spec, HystMemory init,
                                        double t_begin, double t_end, double dt,
                                        double tol) {
  validate(spec);
  if (arity(spec) != 1) {
    throw Error(ErrorCode::invalid_input, "scan_signal needs a one-bit threshold");
  }
  if (!(dt > 0.0) || !(t_end >= t_begin) || !(tol > 0.0)) {
    throw Error(ErrorCode::invalid_input, "scan_signal needs dt > 0, tol > 0, t_end >= t_begin");
  }
  std::vector<SignalCrossing> out;
  std::uint8_t bit = initial_bit(spec, pressure(t_begin), init);
  double t = t_begin;
  while (t < t_end) {
    const bool last = t_end - t <= dt;
    const double h = last ? t_end - t : dt;
    const Guard g = guard_for(spec, bit);
    if (!g.triggered(pressure(t + h))) {
      t = last ? t_end : t + h;
      continue;
    }
    const double t0 = t;
    auto pressure_at = [&](double s) { return pressure(t0 + s); };
    const double tau = refine(pressure_at, g, 0.0, h, tol, "signal");
    t = t0 + tau;
    bit ^= 1;
    out.push_back({t, pressure(t), bit != 0});
  }
  return out;
}

}  // namespace pneu
