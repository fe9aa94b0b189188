#include "pneu/synth.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

std::size_t Assignment::valve_count() const {
  return static_cast<std::size_t>(
      std::count_if(gates.begin(), gates.end(), [](const auto& g) { return g.uses_valve(); }));
}

std::size_t Assignment::hysteretic_count() const {
  return static_cast<std::size_t>(std::count_if(
      gates.begin(), gates.end(), [](const auto& g) { return g.uses_valve() && g.hysteretic; }));
}

SynthesisProblem problem_from_chart(const StateTransitionChart& chart) {
  validate(chart);
  SynthesisProblem p;
  p.signals = chart.signals;
  const auto states = chart.cycle_states();
  for (std::size_t i = 0; i < states.size(); ++i) {
    p.rows.push_back({states[i], states[(i + 1) % states.size()]});
  }
  return p;
}

bool evaluate(const GateChoice& choice, const StateBits& current) {
  switch (choice.kind) {
    case ChoiceKind::Not: return current.at(choice.input) == 0;
    case ChoiceKind::Buffer: return current.at(choice.input) != 0;
    case ChoiceKind::VentOpen: return false;
    case ChoiceKind::VentClosed: return true;
  }
  return false;
}

bool replays(const Assignment& assignment, const std::vector<TruthRow>& rows) {
  for (const auto& row : rows) {
    for (std::size_t o = 0; o < assignment.gates.size(); ++o) {
      if (evaluate(assignment.gates[o], row.current) != (row.next.at(o) != 0)) return false;
    }
  }
  return true;
}

namespace {

void check_rows(const SynthesisProblem& problem) {
  const std::size_t n = problem.signals.size();
  std::map<StateBits, StateBits> seen;
  for (const auto& row : problem.rows) {
    if (row.current.size() != n || row.next.size() != n) {
      throw Error(ErrorCode::invalid_input, "truth row arity does not match " +
                                                std::to_string(n) + " signals");
    }
    auto [it, fresh] = seen.emplace(row.current, row.next);
    if (!fresh && it->second != row.next) {
      throw Error(ErrorCode::inconsistent_chart,
                  "state " + format_state(row.current) + " leads to both " +
                      format_state(it->second) + " and " + format_state(row.next));
    }
  }
}

auto rank_key(const Assignment& a) {
  std::vector<std::tuple<int, std::size_t, bool>> gates;
  for (const auto& g : a.gates) gates.emplace_back(static_cast<int>(g.kind), g.input, g.hysteretic);
  return std::make_tuple(a.valve_count(), a.hysteretic_count(), gates);
}

}  // namespace

std::vector<Assignment> synthesize(const SynthesisProblem& problem) {
  check_rows(problem);
  const std::size_t n = problem.signals.size();

  // Outputs are independent, so filter each output's options first and
  // then take the product.
  std::vector<std::vector<GateChoice>> options(n);
  for (std::size_t o = 0; o < n; ++o) {
    std::vector<GateChoice> candidates;
    for (ChoiceKind kind : {ChoiceKind::Not, ChoiceKind::Buffer}) {
      for (std::size_t in = 0; in < n; ++in) {
        for (bool hyst : {false, true}) candidates.push_back({kind, in, hyst});
      }
    }
    if (problem.allow_fixed_vents) {
      candidates.push_back({ChoiceKind::VentOpen, 0, false});
      candidates.push_back({ChoiceKind::VentClosed, 0, false});
    }
    for (const auto& c : candidates) {
      const bool fits = std::all_of(problem.rows.begin(), problem.rows.end(), [&](const auto& r) {
        return evaluate(c, r.current) == (r.next[o] != 0);
      });
      if (fits) options[o].push_back(c);
    }
    if (options[o].empty()) return {};
  }

  std::vector<Assignment> out;
  std::vector<std::size_t> idx(n, 0);
  bool more = true;
  while (more) {
    Assignment a;
    for (std::size_t o = 0; o < n; ++o) a.gates.push_back(options[o][idx[o]]);
    out.push_back(std::move(a));
    more = false;
    for (std::size_t o = n; o-- > 0;) {
      if (++idx[o] < options[o].size()) {
        more = true;
        break;
      }
      idx[o] = 0;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return rank_key(x) < rank_key(y); });
  return out;
}

std::string describe(const Assignment& assignment, const std::vector<SignalRef>& signals) {
  std::string out;
  for (std::size_t o = 0; o < assignment.gates.size(); ++o) {
    const auto& g = assignment.gates[o];
    if (o) out += ' ';
    out += signals[o].actuator + "'=";
    switch (g.kind) {
      case ChoiceKind::Not: out += "NOT"; break;
      case ChoiceKind::Buffer: out += "BUFFER"; break;
      case ChoiceKind::VentOpen: out += "0"; continue;
      case ChoiceKind::VentClosed: out += "1"; continue;
    }
    if (g.hysteretic) out += "_hyst";
    out += "(" + signals[g.input].actuator + ")";
  }
  return out;
}

std::string render_assignment(const Assignment& assignment,
                              const std::vector<SignalRef>& signals,
                              const CircuitModel* circuit) {
  std::string out;
  for (std::size_t o = 0; o < assignment.gates.size(); ++o) {
    const auto& g = assignment.gates[o];
    const std::string& target = signals[o].actuator;
    if (!g.uses_valve()) {
      out += "# " + target + ": no valve, vent=" +
             (g.kind == ChoiceKind::VentClosed ? "closed" : "open") + "\n";
      continue;
    }
    const SignalRef& src = signals[g.input];
    ValveKind kind;
    if (g.kind == ChoiceKind::Not) {
      kind = g.hysteretic ? ValveKind::HNC : ValveKind::NC;
    } else {
      kind = g.hysteretic ? ValveKind::HNO : ValveKind::NO;
    }
    const Monitor* m = circuit ? circuit->find_monitor(src.actuator, src.label) : nullptr;
    std::string thresholds;
    if (g.hysteretic) {
      if (m && is_hysteretic(m->threshold)) {
        const auto& h = std::get<HystereticThreshold>(m->threshold);
        thresholds = "low=" + format_number(h.low) + " high=" + format_number(h.high);
      } else {
        thresholds = "low=" + src.label + "- high=" + src.label + "+";
      }
    } else if (m && std::holds_alternative<ConstantThreshold>(m->threshold)) {
      thresholds = "threshold=" + format_number(std::get<ConstantThreshold>(m->threshold).level);
    } else {
      thresholds = "threshold=" + src.label;
    }
    out += "valve " + src.actuator + "_" + target + " kind=" + to_string(kind) +
           " sense=" + src.actuator + " " + thresholds + " controls=" + target + "\n";
  }
  return out;
}

}  // namespace pneu
