#pragma once

// Textual circuit description (.pneu):
//
//   actuator <id> fill=<num> vent_coeff=<num> p0=<num> [p_max=<num>] [vent=open|closed]
//   valve <id> kind=NC|NO|HNC|HNO sense=<id> (threshold=<num> | low=<num> high=<num>)
//         controls=<id> [init=0|1]
//   monitor <id> <label>=<num> | <label>=hyst(<num>,<num>) ...
//
// One declaration per line, `#` starts a comment. Pressures in psi, rates
// per second.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pneu/circuit.hpp"
#include "pneu/diagnostics.hpp"
#include "pneu/logic.hpp"

namespace pneu {

struct NetlistDocument {
  std::string source;
  std::optional<CircuitModel> circuit;  // absent iff an error was reported
  std::map<std::string, SourceLoc> locations;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return circuit.has_value(); }
};

NetlistDocument parse_netlist(std::string text);

/// Canonical text: actuators, then valves, then monitors, each in
/// declaration order with a fixed key order and shortest round-trip numbers.
std::string serialize_netlist(const CircuitModel& circuit);

/// One gate per valve: NC -> NOT, NO -> BUFFER, HNC/HNO -> the same with a
/// hysteretic input. Two constant thresholds on one sensed actuator merge
/// into a shared pair (ternary) input. Throws conflict when a valve controls
/// an actuator that declares a fixed vent.
std::vector<GateRelation> abstract_circuit(const CircuitModel& circuit);

}  // namespace pneu
