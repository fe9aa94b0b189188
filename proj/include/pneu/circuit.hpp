#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pneu/logic.hpp"
#include "pneu/valve.hpp"

namespace pneu {

enum class VentDecl { Open, Closed };

/// Lumped pneumatic element. With its vent blocked the pressure rises at
/// `fill_rate` psi/s; with the vent open it decays as -vent_coeff * p.
struct ActuatorModel {
  std::string id;
  double fill_rate = 0.0;   // psi/s
  double vent_coeff = 1.0;  // 1/s
  double p0 = 0.0;          // psi
  std::optional<double> p_max;
  /// Fixed vent status for actuators that no valve controls.
  std::optional<VentDecl> vent;

  bool operator==(const ActuatorModel&) const = default;
};

/// Labeled threshold used to read an actuator's logic level (P_F, P_R, ...).
struct Monitor {
  std::string actuator;
  std::string label;
  ThresholdSpec threshold = ConstantThreshold{};

  std::string name() const { return actuator + "[" + label + "]"; }
  bool operator==(const Monitor&) const = default;
};

struct CircuitModel {
  std::vector<ActuatorModel> actuators;
  std::vector<ValveSpec> valves;
  std::vector<Monitor> monitors;

  std::optional<std::size_t> actuator_index(std::string_view id) const;
  std::optional<std::size_t> valve_index(std::string_view id) const;
  /// Index of the valve on the actuator's vent line, if any.
  std::optional<std::size_t> controller_of(std::string_view actuator) const;
  const Monitor* find_monitor(std::string_view actuator, std::string_view label) const;

  /// Declared p_max, else 5x the largest monitor threshold, else infinity.
  double effective_p_max(std::size_t actuator) const;
  /// Largest threshold over valves and monitors (0 when there are none).
  double max_threshold() const;

  bool operator==(const CircuitModel&) const = default;
};

/// Structural checks shared by the simulator and the logic abstraction.
/// Throws invalid_input for dangling ids or bad parameters and conflict when
/// a valve controls an actuator that also declares a fixed vent.
void validate(const CircuitModel& circuit);

}  // namespace pneu
