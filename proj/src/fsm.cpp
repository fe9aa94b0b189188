#include "pneu/fsm.hpp"

#include <algorithm>

#include "pneu/error.hpp"

namespace pneu {

std::string format_state(const StateBits& bits) {
  std::string out = "(";
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i) out += ',';
    out += bits[i] ? '1' : '0';
  }
  return out + ")";
}

std::vector<Monitor> resolve_signals(const CircuitModel& circuit,
                                     const std::vector<SignalRef>& signals) {
  std::vector<Monitor> out;
  out.reserve(signals.size());
  for (const auto& s : signals) {
    const Monitor* m = circuit.find_monitor(s.actuator, s.label);
    if (!m) {
      throw Error(ErrorCode::invalid_monitor,
                  "signal " + s.name() + " does not name a monitor of the circuit");
    }
    out.push_back(*m);
  }
  return out;
}

StateBits DiscreteTrace::state_at(double t) const {
  StateBits bits;
  bits.reserve(signals.size());
  for (const auto& s : signals) {
    std::uint8_t b = s.initial;
    for (const auto& [when, value] : s.changes) {
      if (when > t) break;
      b = value;
    }
    bits.push_back(b);
  }
  return bits;
}

std::vector<StateSegment> DiscreteTrace::segments() const {
  std::vector<double> cuts;
  for (const auto& s : signals) {
    for (const auto& c : s.changes) cuts.push_back(c.first);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<StateSegment> out;
  double begin = t_begin;
  for (double cut : cuts) {
    if (cut <= begin) continue;
    out.push_back({state_at(begin), begin, cut});
    begin = cut;
  }
  out.push_back({state_at(begin), begin, std::max(t_end, begin)});
  return out;
}

DiscreteTrace discretize_trace(const Trace& trace, const std::vector<Monitor>& monitors) {
  DiscreteTrace out;
  if (!trace.samples.empty()) {
    out.t_begin = trace.samples.front().t;
    out.t_end = trace.samples.back().t;
  }
  for (const auto& m : monitors) {
    const auto it = std::find(trace.actuators.begin(), trace.actuators.end(), m.actuator);
    if (it == trace.actuators.end()) {
      throw Error(ErrorCode::invalid_monitor,
                  "monitor " + m.name() + " refers to an actuator missing from the trace");
    }
    if (arity(m.threshold) != 1) {
      throw Error(ErrorCode::invalid_monitor, "monitor " + m.name() + " must be one bit wide");
    }
    const auto col = static_cast<std::size_t>(it - trace.actuators.begin());
    DiscreteSignal sig{{m.actuator, m.label}, m.threshold, 0, {}};
    HystMemory mem{};
    bool first = true;
    std::uint8_t last = 0;
    for (const auto& s : trace.samples) {
      const auto bit = static_cast<std::uint8_t>(discretize(s.pressures[col], m.threshold, mem).bit(0));
      if (first) {
        sig.initial = bit;
        first = false;
      } else if (bit != last) {
        sig.changes.push_back({s.t, bit});
      }
      last = bit;
    }
    out.signals.push_back(std::move(sig));
  }
  return out;
}

DiscreteTrace synthetic_trace(const std::vector<StateBits>& states, double dwell) {
  DiscreteTrace out;
  if (states.empty()) return out;
  const std::size_t width = states.front().size();
  out.t_end = dwell * static_cast<double>(states.size());
  for (std::size_t j = 0; j < width; ++j) {
    DiscreteSignal sig;
    sig.ref = {"s" + std::to_string(j), "L"};
    sig.initial = states.front().at(j);
    std::uint8_t last = sig.initial;
    for (std::size_t i = 1; i < states.size(); ++i) {
      if (states[i].at(j) != last) {
        last = states[i][j];
        sig.changes.push_back({dwell * static_cast<double>(i), last});
      }
    }
    out.signals.push_back(std::move(sig));
  }
  return out;
}

std::vector<StateBits> extract_sequence(const DiscreteTrace& trace, double dwell_min) {
  if (dwell_min < 0.0) throw Error(ErrorCode::invalid_input, "dwell_min must be >= 0");
  std::vector<StateBits> out;
  for (const auto& seg : trace.segments()) {
    if (seg.end - seg.begin < dwell_min) continue;
    if (!out.empty() && out.back() == seg.bits) continue;
    out.push_back(seg.bits);
  }
  return out;
}

VerifyReport verify(const std::vector<StateBits>& sequence,
                    const StateTransitionChart& chart) {
  validate(chart);
  const auto cycle = chart.cycle_states();
  const std::size_t n = cycle.size();
  for (const auto& s : sequence) {
    if (s.size() != chart.signals.size()) {
      throw Error(ErrorCode::invalid_input,
                  "sequence state " + format_state(s) + " does not match the chart's " +
                      std::to_string(chart.signals.size()) + " signals");
    }
  }
  if (sequence.size() < n) {
    throw Error(ErrorCode::insufficient_data,
                "sequence of " + std::to_string(sequence.size()) +
                    " states is shorter than one " + std::to_string(n) + "-state cycle");
  }

  VerifyReport report;
  report.cycles_covered = sequence.size() / n;
  const auto start = std::find(cycle.begin(), cycle.end(), sequence.front());
  if (start == cycle.end()) {
    report.mismatch_index = 0;
    report.got = sequence.front();
    report.detail = "state " + format_state(sequence.front()) + " is not in chart " + chart.name;
    return report;
  }
  const auto phase = static_cast<std::size_t>(start - cycle.begin());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& want = cycle[(phase + i) % n];
    if (sequence[i] != want) {
      report.mismatch_index = i;
      report.expected = want;
      report.got = sequence[i];
      report.detail = "mismatch at index " + std::to_string(i) + ": expected " +
                      chart.cycle[(phase + i) % n] + " " + format_state(want) + ", got " +
                      format_state(sequence[i]);
      return report;
    }
  }
  if (report.cycles_covered < 2) {
    report.detail = "sequence covers " + std::to_string(report.cycles_covered) +
                    " full cycle(s); 2 required";
    return report;
  }
  report.pass = true;
  report.detail = "matches " + chart.name + " from " + chart.cycle[phase] + " over " +
                  std::to_string(report.cycles_covered) + " full cycles";
  return report;
}

std::string format_report(const VerifyReport& report) {
  return std::string(report.pass ? "PASS: " : "FAIL: ") + report.detail;
}

}  // namespace pneu
