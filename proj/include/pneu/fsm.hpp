#pragma once

// State-transition charts and trace-level verification: analog traces are
// discretized against monitor thresholds, reduced to a sequence of combined
// logic states, and matched cyclically against a chart.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pneu/circuit.hpp"
#include "pneu/diagnostics.hpp"
#include "pneu/sim.hpp"

namespace pneu {

/// One bit per chart signal, in signal order.
using StateBits = std::vector<std::uint8_t>;

/// "(0,1,0)"
std::string format_state(const StateBits& bits);

struct SignalRef {
  std::string actuator;
  std::string label;

  std::string name() const { return actuator + "[" + label + "]"; }
  bool operator==(const SignalRef&) const = default;
};

struct ChartState {
  std::string name;
  StateBits bits;
  bool operator==(const ChartState&) const = default;
};

struct StateTransitionChart {
  std::string name;
  std::vector<SignalRef> signals;
  std::vector<ChartState> states;
  std::vector<std::string> cycle;  // read cyclically

  const ChartState* find(std::string_view state) const;
  std::vector<StateBits> cycle_states() const;
  bool operator==(const StateTransitionChart&) const = default;
};

/// Throws invalid_input: duplicate or equal states, arity mismatch, unknown
/// or repeated cycle entries, or consecutive cycle states that are equal.
void validate(const StateTransitionChart& chart);

/// `.chart` text:
///   chart <name>
///   signals <id>[<label>] ...
///   state <name> <bit>...
///   cycle <name> ...
struct ChartDocument {
  std::string source;
  std::optional<StateTransitionChart> chart;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return chart.has_value(); }
};

ChartDocument parse_chart(std::string text);
std::string serialize_chart(const StateTransitionChart& chart);

/// Looks up each chart signal among the circuit's monitors.
/// Throws invalid_monitor for a missing one.
std::vector<Monitor> resolve_signals(const CircuitModel& circuit,
                                     const std::vector<SignalRef>& signals);

struct DiscreteSignal {
  SignalRef ref;
  ThresholdSpec threshold = ConstantThreshold{};
  std::uint8_t initial = 0;
  std::vector<std::pair<double, std::uint8_t>> changes;  // (time, new bit)
};

struct StateSegment {
  StateBits bits;
  double begin = 0.0;
  double end = 0.0;
};

struct DiscreteTrace {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<DiscreteSignal> signals;

  StateBits state_at(double t) const;
  /// Maximal intervals of constant combined state, in time order.
  std::vector<StateSegment> segments() const;
};

/// Evaluates every monitor at every trace sample (hysteretic memories start
/// at 0). Throws invalid_monitor if a monitor's actuator is not in the trace
/// or its threshold is not one bit wide.
DiscreteTrace discretize_trace(const Trace& trace, const std::vector<Monitor>& monitors);

/// Trace in which each state of `states` lasts `dwell` seconds.
DiscreteTrace synthetic_trace(const std::vector<StateBits>& states, double dwell);

/// Combined states in time order, dropping those that last less than
/// dwell_min and merging adjacent duplicates.
std::vector<StateBits> extract_sequence(const DiscreteTrace& trace, double dwell_min);

inline constexpr double kDefaultDwellMin = 0.05;  // s

struct VerifyReport {
  bool pass = false;
  std::size_t cycles_covered = 0;
  std::optional<std::size_t> mismatch_index;
  std::optional<StateBits> expected;
  std::optional<StateBits> got;
  std::string detail;
};

/// Passes iff some rotation of the chart cycle, repeated, reproduces the
/// sequence and the sequence spans at least two full cycles.
/// Throws insufficient_data when the sequence is shorter than one cycle.
VerifyReport verify(const std::vector<StateBits>& sequence,
                    const StateTransitionChart& chart);

std::string format_report(const VerifyReport& report);

}  // namespace pneu
