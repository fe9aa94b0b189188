#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pneu/error.hpp"
#include "pneu/format.hpp"
#include "pneu/fsm.hpp"
#include "pneu/netlist.hpp"
#include "pneu/sim.hpp"

using namespace pneu;

namespace {

std::string data(const std::string& name) {
  return read_file(std::string(PNEU_DATA_DIR) + "/" + name);
}

StateTransitionChart crawler_chart() {
  auto doc = parse_chart(data("crawler.chart"));
  REQUIRE(doc.ok());
  return *doc.chart;
}

const std::vector<StateBits> kCrawlerCycle = {{0, 0, 0}, {0, 1, 0}, {1, 1, 0},
                                              {1, 1, 1}, {1, 0, 1}, {0, 0, 1}};

std::vector<StateBits> repeat(const std::vector<StateBits>& cycle, std::size_t phase,
                              std::size_t count) {
  std::vector<StateBits> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(cycle[(phase + i) % cycle.size()]);
  return out;
}

}  // namespace

TEST_CASE("chart files parse and round trip") {
  const auto chart = crawler_chart();
  CHECK(chart.name == "crawler");
  REQUIRE(chart.signals.size() == 3);
  CHECK(chart.signals[0] == SignalRef{"M", "P_M"});
  CHECK(chart.cycle_states() == kCrawlerCycle);
  const auto again = parse_chart(serialize_chart(chart));
  REQUIRE(again.ok());
  CHECK(*again.chart == chart);
  CHECK(format_state({0, 1, 0}) == "(0,1,0)");
}

TEST_CASE("chart validation") {
  auto chart = crawler_chart();
  chart.cycle = {"S0"};
  CHECK_THROWS_AS(validate(chart), Error);
  chart = crawler_chart();
  chart.states[1].bits = chart.states[0].bits;
  CHECK_THROWS_AS(validate(chart), Error);
  const auto doc = parse_chart("chart c\nsignals A[P]\nstate S0 0\nstate S1 1\ncycle S0 S0 S1\n");
  CHECK_FALSE(doc.ok());
}

TEST_CASE("extract_sequence") {
  const std::vector<StateBits> three = {{0, 0}, {1, 0}, {1, 1}};
  CHECK(extract_sequence(synthetic_trace(three, 0.1), 0.05) == three);

  // A 1 ms glitch through (0,1) between two long states.
  DiscreteTrace dt;
  dt.t_begin = 0;
  dt.t_end = 0.3;
  dt.signals.push_back({{"A", "P"}, ConstantThreshold{}, 0, {{0.1, 1}}});
  dt.signals.push_back({{"B", "P"}, ConstantThreshold{}, 0, {{0.1, 1}, {0.101, 0}, {0.2, 1}}});
  CHECK(extract_sequence(dt, 0.01) == std::vector<StateBits>{{0, 0}, {1, 0}, {1, 1}});
  CHECK(extract_sequence(dt, 0.0) == std::vector<StateBits>{{0, 0}, {1, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("dwell filter is idempotent") {
  DiscreteTrace dt;
  dt.t_begin = 0;
  dt.t_end = 1;
  dt.signals.push_back({{"A", "P"}, ConstantThreshold{}, 0, {{0.2, 1}, {0.21, 0}, {0.5, 1}}});
  dt.signals.push_back({{"B", "P"}, ConstantThreshold{}, 1, {{0.3, 0}, {0.7, 1}, {0.705, 0}}});
  const auto once = extract_sequence(dt, 0.05);
  CHECK(extract_sequence(synthetic_trace(once, 0.1), 0.05) == once);
}

TEST_CASE("verify") {
  const auto chart = crawler_chart();
  CHECK(verify(repeat(kCrawlerCycle, 0, 18), chart).pass);

  const auto mid = verify(repeat(kCrawlerCycle, 3, 14), chart);
  CHECK(mid.pass);
  CHECK(mid.cycles_covered == 2);

  auto swapped = chart;
  std::swap(swapped.cycle[2], swapped.cycle[3]);
  const auto bad = verify(repeat(kCrawlerCycle, 0, 12), swapped);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.mismatch_index);
  CHECK(*bad.mismatch_index == 2);
  CHECK(format_report(bad).rfind("FAIL: ", 0) == 0);

  CHECK_FALSE(verify(repeat(kCrawlerCycle, 0, 8), chart).pass);  // one cycle only

  auto reversed = kCrawlerCycle;
  std::reverse(reversed.begin(), reversed.end());
  CHECK_FALSE(verify(repeat(reversed, 0, 12), chart).pass);

  try {
    verify(repeat(kCrawlerCycle, 0, 5), chart);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_data);
  }
}

TEST_CASE("crawler trace reduces to the six-state cycle") {
  const auto circuit = *parse_netlist(data("crawler.pneu")).circuit;
  const auto chart = crawler_chart();
  const Trace trace = simulate(circuit, SimConfig{});
  const DiscreteTrace dt = discretize_trace(trace, resolve_signals(circuit, chart.signals));
  const auto seq = extract_sequence(dt, kDefaultDwellMin);
  REQUIRE(seq.size() >= 18);
  const auto report = verify(seq, chart);
  CHECK_MESSAGE(report.pass, report.detail);

  // Discrete changes sit on threshold crossings of the analog trace.
  for (const auto& sig : dt.signals) {
    const auto a = *circuit.actuator_index(sig.ref.actuator);
    for (const auto& [t, bit] : sig.changes) {
      const auto it = std::find_if(trace.samples.begin(), trace.samples.end(),
                                   [&](const TraceSample& s) { return s.t == t; });
      REQUIRE(it != trace.samples.end());
      const double level = std::get<ConstantThreshold>(sig.threshold).level;
      CHECK(std::abs(it->pressures[a] - level) < 1e-6);
    }
  }
}

TEST_CASE("hysteretic monitor on the oscillator is a square wave") {
  const auto circuit = *parse_netlist(data("oscillator.pneu")).circuit;
  SimConfig cfg;
  cfg.t_end = 12;
  const DiscreteTrace dt = discretize_trace(simulate(circuit, cfg), circuit.monitors);
  REQUIRE(dt.signals.size() == 1);
  const auto& ch = dt.signals[0].changes;
  REQUIRE(ch.size() >= 6);
  for (std::size_t i = 0; i < ch.size(); ++i) CHECK(ch[i].second == (i % 2 == 0 ? 1 : 0));
  // Falling edges after the first one are one steady period apart.
  CHECK(ch[3].first - ch[1].first == doctest::Approx(1.5 + std::log(4.0) / 2).epsilon(1e-6));
  // The first full cycle (rise from zero, then decay) lasts 2 + ln(4)/2.
  CHECK(ch[2].first - 0.0 == doctest::Approx(2.0 + std::log(4.0) / 2 + 1.5).epsilon(1e-6));
}

TEST_CASE("signals must resolve to one-bit monitors") {
  const auto circuit = *parse_netlist(data("crawler.pneu")).circuit;
  try {
    resolve_signals(circuit, {{"F", "nope"}});
    FAIL("expected invalid_monitor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_monitor);
  }
  Trace t;
  t.actuators = {"F"};
  t.samples.push_back({0.0, {0.0}, {}, {}});
  CHECK_THROWS_AS(discretize_trace(t, {Monitor{"F", "P", pair_threshold(1, 2)}}), Error);
  CHECK_THROWS_AS(discretize_trace(t, {Monitor{"Q", "P", constant_threshold(1)}}), Error);
}
