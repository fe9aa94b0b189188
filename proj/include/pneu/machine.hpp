#pragma once

// Discrete abstraction of a gate network. Each actuator sits on a ladder of
// its thresholds (the bands between consecutive threshold pressures) and,
// every synchronous step, moves one rung toward the target set by its
// driving gate. Pressure continuity is what limits moves to one rung.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pneu/circuit.hpp"
#include "pneu/fsm.hpp"
#include "pneu/logic.hpp"

namespace pneu {

/// A threshold at which an actuator's level is observed.
struct MachineSignal {
  std::string actuator;
  std::string label;
  ThresholdSpec threshold = ConstantThreshold{};
};

class AbstractMachine {
 public:
  struct State {
    std::vector<std::size_t> position;  // rung per actuator
    std::vector<std::uint8_t> memory;   // per hysteretic slot
    auto operator<=>(const State&) const = default;
  };

  /// `fixed_vents` gives actuators with no driving gate a constant target
  /// (true = vent closed, fills to the top rung). Other undriven actuators
  /// hold their rung.
  AbstractMachine(std::vector<GateRelation> gates, std::vector<MachineSignal> signals,
                  std::map<std::string, bool> fixed_vents = {});

  /// Gates from abstract_circuit, the circuit's monitors as signals, and
  /// valve init memories as the initial hysteretic state.
  static AbstractMachine from_circuit(const CircuitModel& circuit);

  /// Every actuator on its lowest rung.
  State all_low() const;
  State step(const State& s) const;
  StateBits observe(const State& s) const;

  const std::vector<GateRelation>& gates() const { return gates_; }
  const std::vector<MachineSignal>& signals() const { return signals_; }
  const std::vector<std::string>& actuators() const { return actuators_; }
  const std::vector<double>& ladder(std::size_t actuator) const { return ladders_[actuator]; }
  /// Upper bound on distinct states, saturating at 2^62.
  std::size_t state_space_size() const;

 private:
  struct HystSlot {
    std::size_t actuator;
    HystereticThreshold threshold;
    std::uint8_t init;
  };

  std::size_t ensure(const std::string& id);
  std::size_t actuator(const std::string& id) const;
  std::size_t rung_index(std::size_t actuator, double level) const;
  std::size_t slot(std::size_t actuator, const HystereticThreshold& h) const;
  LogicLevel level(const State& s, std::size_t actuator, const ThresholdSpec& spec) const;
  void register_threshold(const std::string& actuator, const ThresholdSpec& spec);

  std::vector<GateRelation> gates_;
  std::vector<MachineSignal> signals_;
  std::vector<std::string> actuators_;
  std::vector<std::vector<double>> ladders_;
  std::vector<HystSlot> slots_;
  std::vector<int> driver_;        // gate index per actuator, -1 if none
  std::vector<int> fixed_target_;  // +1 fill, -1 vent, 0 hold
};

struct LogicCycle {
  /// Distinct observed states around the limit cycle, adjacent duplicates
  /// merged (cyclically).
  std::vector<StateBits> states;
  /// Full machine states of one period of the limit cycle.
  std::vector<AbstractMachine::State> trajectory;
  std::size_t transient_steps = 0;
  bool deadlock = false;  // limit cycle is a fixed point
};

/// Synchronous stepping from `initial` until a machine state repeats.
/// Throws nonperiodic if no repeat occurs within 10x the state-space size.
LogicCycle logic_simulate(const AbstractMachine& machine,
                          const AbstractMachine::State& initial);

/// Chart S0..Sk-1 over the machine's signals, cycling through `cycle.states`.
StateTransitionChart chart_of(const AbstractMachine& machine, const LogicCycle& cycle,
                              std::string name = "derived");

}  // namespace pneu
