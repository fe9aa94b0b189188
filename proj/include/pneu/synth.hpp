#pragma once

// Exhaustive synthesis of NOT/BUFFER gate networks from a truth chart of
// current -> next combined states.

#include <cstddef>
#include <string>
#include <vector>

#include "pneu/circuit.hpp"
#include "pneu/fsm.hpp"

namespace pneu {

struct TruthRow {
  StateBits current;
  StateBits next;
};

enum class ChoiceKind { Not, Buffer, VentOpen, VentClosed };

/// How one output signal is driven. VentOpen/VentClosed use no valve and
/// hold the output at 0 or 1.
struct GateChoice {
  ChoiceKind kind = ChoiceKind::Buffer;
  std::size_t input = 0;
  bool hysteretic = false;

  bool uses_valve() const { return kind == ChoiceKind::Not || kind == ChoiceKind::Buffer; }
  bool operator==(const GateChoice&) const = default;
};

struct Assignment {
  std::vector<GateChoice> gates;  // one per output signal
  std::size_t valve_count() const;
  std::size_t hysteretic_count() const;
  bool operator==(const Assignment&) const = default;
};

struct SynthesisProblem {
  std::vector<SignalRef> signals;
  std::vector<TruthRow> rows;
  bool allow_fixed_vents = false;
};

/// Rows are the consecutive pairs of the chart cycle, wrapping around.
SynthesisProblem problem_from_chart(const StateTransitionChart& chart);

bool evaluate(const GateChoice& choice, const StateBits& current);
bool replays(const Assignment& assignment, const std::vector<TruthRow>& rows);

/// All assignments that reproduce every row, fewest valves first, then
/// fewest hysteretic valves. Empty when the chart is unsatisfiable.
/// Throws inconsistent_chart for contradictory rows and invalid_input for
/// rows of mismatched arity.
std::vector<Assignment> synthesize(const SynthesisProblem& problem);

/// "R'=NOT(F) F'=BUFFER_hyst(R)"
std::string describe(const Assignment& assignment, const std::vector<SignalRef>& signals);

/// Netlist `valve` lines for the assignment. Thresholds come from the
/// circuit's monitor for the input signal when its kind matches; otherwise
/// the monitor label stands in symbolically.
std::string render_assignment(const Assignment& assignment,
                              const std::vector<SignalRef>& signals,
                              const CircuitModel* circuit);

}  // namespace pneu
