// Acceptance checks, one line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pneu/error.hpp"
#include "pneu/format.hpp"
#include "pneu/fsm.hpp"
#include "pneu/logic.hpp"
#include "pneu/machine.hpp"
#include "pneu/netlist.hpp"
#include "pneu/sim.hpp"
#include "pneu/synth.hpp"
#include "pneu/valve.hpp"

using namespace pneu;
namespace fs = std::filesystem;

namespace {

const std::string kData = PNEU_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

CircuitModel load_netlist(const std::string& name) {
  auto doc = parse_netlist(read_file(kData + "/" + name));
  if (!doc.ok()) throw Error(ErrorCode::parse, name + " does not parse");
  return *doc.circuit;
}

StateTransitionChart load_chart(const std::string& name) {
  auto doc = parse_chart(read_file(kData + "/" + name));
  if (!doc.ok()) throw Error(ErrorCode::parse, name + " does not parse");
  return *doc.chart;
}

bool same_cycle(const std::vector<StateBits>& a, const std::vector<StateBits>& b) {
  if (a.size() != b.size() || a.empty()) return false;
  for (std::size_t r = 0; r < a.size(); ++r) {
    bool all = true;
    for (std::size_t i = 0; i < a.size() && all; ++i) all = a[(i + r) % a.size()] == b[i];
    if (all) return true;
  }
  return false;
}

std::string states(const std::vector<StateBits>& seq) {
  std::string out;
  for (const auto& s : seq) out += (out.empty() ? "" : " ") + format_state(s);
  return out;
}

/// Dwell-filtered crawler sequence in chart signal order.
std::vector<StateBits> crawler_sequence(const SimConfig& cfg, Trace* keep = nullptr) {
  const auto circuit = load_netlist("crawler.pneu");
  const auto chart = load_chart("crawler.chart");
  Trace trace = simulate(circuit, cfg);
  const auto seq =
      extract_sequence(discretize_trace(trace, resolve_signals(circuit, chart.signals)),
                       kDefaultDwellMin);
  if (keep) *keep = std::move(trace);
  return seq;
}

/// The repeating part of a sequence that starts on the cycle.
std::vector<StateBits> leading_cycle(const std::vector<StateBits>& seq) {
  for (std::size_t n = 2; 2 * n <= seq.size(); ++n) {
    bool periodic = true;
    for (std::size_t i = n; i < seq.size() && periodic; ++i) periodic = seq[i] == seq[i - n];
    if (periodic) return {seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  return {};
}

Outcome gate_tables() {
  GateRelation g;
  g.input = "A";
  g.output = "B";
  g.input_threshold = constant_threshold(1.0);
  const auto b0 = LogicLevel::binary(false), b1 = LogicLevel::binary(true);
  bool ok = true;
  g.kind = GateKind::Not;
  ok &= gate_target(g, b0) == b1 && gate_target(g, b1) == b0;
  g.kind = GateKind::Buffer;
  ok &= gate_target(g, b0) == b0 && gate_target(g, b1) == b1;

  // Two buffers on the bits of a ternary input.
  const std::vector<std::pair<LogicLevel, std::pair<bool, bool>>> split = {
      {LogicLevel::from_bits({0, 0}), {false, false}},
      {LogicLevel::from_bits({0, 1}), {false, true}},
      {LogicLevel::from_bits({1, 1}), {true, true}}};
  g.input_threshold = pair_threshold(1.1, 1.8);
  for (const auto& [in, want] : split) {
    g.input_bit = 1;
    ok &= gate_target(g, in).is_high() == want.first;
    g.input_bit = 0;
    ok &= gate_target(g, in).is_high() == want.second;
  }

  // NOT with a two-bit output.
  g.kind = GateKind::Not;
  g.input_bit = 0;
  g.input_threshold = constant_threshold(1.0);
  g.output_thresholds = {constant_threshold(1.1), constant_threshold(1.8)};
  ok &= gate_target(g, b0) == LogicLevel::from_bits({1, 1});
  ok &= gate_target(g, b1) == LogicLevel::from_bits({0, 0});
  return {ok, "NOT, BUFFER, ternary-input and ternary-output rows"};
}

Outcome hysteresis_loop() {
  const double tol = 1e-6;
  auto triangle = [](double t) { return t <= 2.5 ? t : 5.0 - t; };
  const auto xs = scan_signal(triangle, hysteretic_threshold(0.05, 1.8), {0}, 0.0, 5.0, 0.01, tol);
  bool ok = xs.size() == 2;
  std::string detail = std::to_string(xs.size()) + " transitions";
  if (ok) {
    ok = xs[0].bit && xs[0].pressure >= 1.8 && xs[0].pressure - 1.8 <= tol && !xs[1].bit &&
         xs[1].pressure <= 0.05 && 0.05 - xs[1].pressure <= tol;
    detail += ", up at " + format_number(xs[0].pressure) + " psi, down at " +
              format_number(xs[1].pressure) + " psi";
  }
  return {ok, detail};
}

Outcome six_state_gait(double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  const auto seq = crawler_sequence(SimConfig{});
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::vector<StateBits> want = {{0, 0, 0}, {0, 1, 0}, {1, 1, 0},
                                       {1, 1, 1}, {1, 0, 1}, {0, 0, 1}};
  const auto report = verify(seq, load_chart("crawler.chart"));
  const bool ok = report.pass && report.cycles_covered >= 3 &&
                  same_cycle(leading_cycle(seq), want) && seconds < 5.0;
  return {ok, std::to_string(report.cycles_covered) + " cycles, " + format_number(std::round(seconds * 1000) / 1000) + " s"};
}

Outcome oracle_agreement() {
  const auto circuit = load_netlist("crawler.pneu");
  const auto chart = load_chart("crawler.chart");
  std::vector<MachineSignal> signals;
  for (const auto& m : resolve_signals(circuit, chart.signals)) {
    signals.push_back({m.actuator, m.label, m.threshold});
  }
  const AbstractMachine machine(abstract_circuit(circuit), signals);
  const auto cycle = logic_simulate(machine, machine.all_low());
  const auto continuous = leading_cycle(crawler_sequence(SimConfig{}));
  return {same_cycle(cycle.states, continuous), "abstract " + states(cycle.states)};
}

Outcome feet_oscillator() {
  const auto circuit = load_netlist("feet.pneu");
  const auto chart = load_chart("feet.chart");
  std::vector<MachineSignal> signals;
  for (const auto& m : resolve_signals(circuit, chart.signals)) {
    signals.push_back({m.actuator, m.label, m.threshold});
  }
  const AbstractMachine machine(abstract_circuit(circuit), signals);
  const auto cycle = logic_simulate(machine, machine.all_low());
  const std::vector<StateBits> want = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto results = synthesize(problem_from_chart(chart));
  const Assignment wanted{{{ChoiceKind::Not, 1, false}, {ChoiceKind::Buffer, 0, true}}};
  const bool found = std::find(results.begin(), results.end(), wanted) != results.end();
  return {same_cycle(cycle.states, want) && found,
          states(cycle.states) + (found ? ", NOT/BUFFER_hyst found" : ", NOT/BUFFER_hyst missing")};
}

Outcome relaxation_period() {
  SimConfig cfg;
  cfg.t_end = 20.0;
  const Trace trace = simulate(load_netlist("oscillator.pneu"), cfg);
  std::vector<double> closes;  // vent closes: end of each decay
  for (const auto& e : trace.valve_events()) {
    if (e.value == 0) closes.push_back(e.t);
  }
  if (closes.size() < 3) return {false, "too few cycles"};
  // From rest, one cycle is a 0 -> 2 psi rise plus a 2 -> 0.5 psi decay.
  const double first_expected = 2.0 + std::log(4.0) / 2.0;
  const double first = closes[0];
  // Later cycles rise from 0.5 psi.
  const double steady_expected = 1.5 + std::log(4.0) / 2.0;
  const double steady = closes[2] - closes[1];
  const bool ok = std::abs(first - first_expected) / first_expected < 0.01 &&
                  std::abs(steady - steady_expected) / steady_expected < 0.01;
  return {ok, "first cycle " + format_number(std::round(first * 1e4) / 1e4) + " s (closed form " +
                  format_number(std::round(first_expected * 1e4) / 1e4) + " s), steady " +
                  format_number(std::round(steady * 1e4) / 1e4) + " s (closed form " +
                  format_number(std::round(steady_expected * 1e4) / 1e4) + " s)"};
}

Outcome geometry_round_trip() {
  std::mt19937_64 rng(20240);
  std::uniform_real_distribution<double> len(0.1, 10.0), theta(0.5, 179.5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SliderCrankGeometry g{len(rng), len(rng), 1.0, theta(rng)};
    worst = std::max(worst, std::abs(crank_angle(g, critical_distance(g)) - g.theta_crit) / g.theta_crit);
  }
  bool monotone = true;
  for (int i = 0; i < 50 && monotone; ++i) {
    const SliderCrankGeometry g{len(rng), len(rng), 1.0, 90.0};
    const double lo = std::abs(g.l_ab - g.l_bc), hi = g.l_ab + g.l_bc;
    double prev = -1.0;
    for (int k = 1; k <= 100; ++k) {
      const double a = crank_angle(g, k == 100 ? hi : lo + (hi - lo) * k / 100.0);
      monotone &= a > prev;
      prev = a;
    }
  }
  std::ostringstream d;
  d << "worst relative error " << worst << (monotone ? ", monotone" : ", not monotone");
  return {worst < 1e-9 && monotone, d.str()};
}

Outcome parser_robustness() {
  std::size_t shipped = 0;
  bool round_trip = true;
  for (const auto& e : fs::directory_iterator(kData)) {
    if (e.path().extension() != ".pneu") continue;
    ++shipped;
    const auto a = parse_netlist(read_file(e.path().string()));
    const auto b = a.ok() ? parse_netlist(serialize_netlist(*a.circuit)) : NetlistDocument{};
    round_trip &= a.ok() && b.ok() && *a.circuit == *b.circuit &&
                  serialize_netlist(*b.circuit) == serialize_netlist(*a.circuit);
  }

  const std::string base = read_file(kData + "/crawler.pneu");
  std::vector<std::string> tokens;
  {
    std::istringstream in(base);
    for (std::string t; in >> t;) tokens.push_back(t);
  }
  std::mt19937_64 rng(8);
  std::size_t crashes = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string text = base;
    for (int k = 0; k < 3; ++k) {
      const std::size_t pos = rng() % (text.size() + 1);
      switch (rng() % 4) {
        case 0: text.erase(pos, rng() % 8); break;
        case 1: text.insert(pos, tokens[rng() % tokens.size()] + " "); break;
        case 2: text.insert(pos, 1, static_cast<char>(rng() % 256)); break;
        default: text.insert(pos, "\n"); break;
      }
    }
    try {
      const auto doc = parse_netlist(text);
      if (doc.ok() == has_errors(doc.diagnostics)) ++crashes;
    } catch (...) {
      ++crashes;
    }
  }

  std::size_t fixtures = 0, located = 0;
  for (const auto& e : fs::directory_iterator(std::string(PNEU_FIXTURE_DIR) + "/malformed")) {
    ++fixtures;
    const std::string text = read_file(e.path().string());
    const auto diags = e.path().extension() == ".chart" ? parse_chart(text).diagnostics
                                                        : parse_netlist(text).diagnostics;
    for (const auto& d : diags) {
      if (d.severity == Severity::Error && d.loc.line >= 1 && d.loc.column >= 1) {
        ++located;
        break;
      }
    }
  }
  return {round_trip && shipped > 0 && crashes == 0 && fixtures > 0 && located == fixtures,
          std::to_string(shipped) + " netlists round-trip, 10000 mutations with " +
              std::to_string(crashes) + " failures, " + std::to_string(located) + "/" +
              std::to_string(fixtures) + " fixtures located"};
}

Outcome refinement_stability() {
  SimConfig coarse;
  SimConfig fine;
  fine.dt_max = coarse.dt_max / 2;
  Trace a, b;
  const auto seq_a = crawler_sequence(coarse, &a);
  const auto seq_b = crawler_sequence(fine, &b);
  if (a.events.size() != b.events.size()) {
    return {false, "event counts differ: " + std::to_string(a.events.size()) + " vs " +
                       std::to_string(b.events.size())};
  }
  double worst = 0.0;
  bool same_order = true;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    same_order &= a.events[i].name == b.events[i].name && a.events[i].value == b.events[i].value;
    worst = std::max(worst, std::abs(a.events[i].t - b.events[i].t));
  }
  std::ostringstream d;
  d << a.events.size() << " events, max shift " << worst << " s";
  return {same_order && worst < 2 * coarse.dt_max && seq_a == seq_b, d.str()};
}

}  // namespace

int main() {
  double gait_seconds = 0.0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gate truth tables", gate_tables},
      {"hysteresis loop", hysteresis_loop},
      {"six-state gait reproduction", [&] { return six_state_gait(gait_seconds); }},
      {"cross-layer oracle agreement", oracle_agreement},
      {"feet oscillator", feet_oscillator},
      {"relaxation-oscillator period", relaxation_period},
      {"geometry round trip", geometry_round_trip},
      {"parser robustness", parser_robustness},
      {"refinement stability", refinement_stability},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s) [%.3f s]\n", i + 1, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
  }
  return failed == 0 ? 0 : 1;
}
