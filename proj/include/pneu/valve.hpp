#pragma once

// Switch-valves as flow-state functions of the sensing actuator's pressure,
// plus the slider-crank geometry of the kinked tube linkage.

#include <optional>
#include <string>
#include <string_view>

#include "pneu/logic.hpp"

namespace pneu {

/// NC/NO switch on a constant threshold; HNC/HNO carry bistable memory and
/// switch at a hysteretic threshold pair.
enum class ValveKind { NC, NO, HNC, HNO };

const char* to_string(ValveKind kind);
std::optional<ValveKind> parse_valve_kind(std::string_view text);
bool is_hysteretic(ValveKind kind);

enum class FlowStatus { Blocked, Unblocked };

struct ValveSpec {
  std::string id;
  ValveKind kind = ValveKind::NC;
  std::string sense;     // actuator whose pressure drives the valve
  ThresholdSpec thresholds = ConstantThreshold{};
  std::string controls;  // actuator whose vent line the valve blocks
  HystMemory init_memory{};

  bool hysteretic() const { return is_hysteretic(kind); }
  bool operator==(const ValveSpec&) const = default;
};

/// Throws invalid_threshold when the threshold variant does not suit the kind.
void validate(const ValveSpec& spec);

struct ValveFlowState {
  FlowStatus status = FlowStatus::Blocked;
  std::optional<HystMemory> memory;
};

/// NC: unblocked iff p >= threshold. NO: blocked iff p >= threshold.
/// HNO: blocked iff memory is 1. HNC: unblocked iff memory is 1.
/// Hysteretic memory is stepped with `p_sense` before the status is read.
ValveFlowState valve_flow(const ValveSpec& spec, double p_sense,
                          std::optional<HystMemory> mem = std::nullopt);

/// Slider-crank model of the NC tube linkage. A is the fixed pivot, B the
/// kinked hinge between crank AB and coupler BC, C the slider pivot; the
/// actuator's elongation sets the distance s = |AC|. Lengths in mm, angles
/// in degrees.
struct SliderCrankGeometry {
  double l_ab = 1.0;
  double l_bc = 1.0;
  double s0 = 1.0;
  double theta_crit = 90.0;  // kink angle at B below which the tube is blocked
};

/// Interior angle at B of triangle ABC for pivot distance `s`.
double crank_angle(const SliderCrankGeometry& geom, double s);

/// Pivot distance at which the angle at B equals theta_crit.
double critical_distance(const SliderCrankGeometry& geom);

/// Flow at B for pivot distance `s`: blocked while the kink is sharper than
/// theta_crit.
FlowStatus kink_status(const SliderCrankGeometry& geom, double s);

}  // namespace pneu
