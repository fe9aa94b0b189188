#include "pneu/valve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

const char* to_string(ValveKind kind) {
  switch (kind) {
    case ValveKind::NC: return "NC";
    case ValveKind::NO: return "NO";
    case ValveKind::HNC: return "HNC";
    case ValveKind::HNO: return "HNO";
  }
  return "?";
}

std::optional<ValveKind> parse_valve_kind(std::string_view text) {
  if (text == "NC") return ValveKind::NC;
  if (text == "NO") return ValveKind::NO;
  if (text == "HNC") return ValveKind::HNC;
  if (text == "HNO") return ValveKind::HNO;
  return std::nullopt;
}

bool is_hysteretic(ValveKind kind) {
  return kind == ValveKind::HNC || kind == ValveKind::HNO;
}

void validate(const ValveSpec& spec) {
  validate(spec.thresholds);
  const bool hyst_spec = std::holds_alternative<HystereticThreshold>(spec.thresholds);
  const bool const_spec = std::holds_alternative<ConstantThreshold>(spec.thresholds);
  if (spec.hysteretic() && !hyst_spec) {
    throw Error(ErrorCode::invalid_threshold,
                std::string(to_string(spec.kind)) + " requires low/high");
  }
  if (!spec.hysteretic() && !const_spec) {
    throw Error(ErrorCode::invalid_threshold,
                std::string(to_string(spec.kind)) + " requires threshold");
  }
}

ValveFlowState valve_flow(const ValveSpec& spec, double p_sense,
                          std::optional<HystMemory> mem) {
  if (!std::isfinite(p_sense)) {
    throw Error(ErrorCode::invalid_input, "valve " + spec.id + ": pressure must be finite");
  }
  validate(spec);
  if (!spec.hysteretic()) {
    const double level = std::get<ConstantThreshold>(spec.thresholds).level;
    const bool high = discretize_binary(p_sense, level);
    const bool unblocked = spec.kind == ValveKind::NC ? high : !high;
    return {unblocked ? FlowStatus::Unblocked : FlowStatus::Blocked, std::nullopt};
  }
  if (!mem) {
    throw Error(ErrorCode::invalid_input,
                "valve " + spec.id + ": hysteretic valve needs its memory");
  }
  const auto& h = std::get<HystereticThreshold>(spec.thresholds);
  const HystStep step = hysteretic_step(*mem, p_sense, h.low, h.high);
  const bool unblocked = spec.kind == ValveKind::HNC ? step.bit : !step.bit;
  return {unblocked ? FlowStatus::Unblocked : FlowStatus::Blocked, step.memory};
}

namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

void check_links(const SliderCrankGeometry& g) {
  if (!(g.l_ab > 0.0) || !(g.l_bc > 0.0) || !std::isfinite(g.l_ab) ||
      !std::isfinite(g.l_bc)) {
    throw Error(ErrorCode::geometry_infeasible, "link lengths must be positive");
  }
}

}  // namespace

double crank_angle(const SliderCrankGeometry& geom, double s) {
  check_links(geom);
  const double lo = std::abs(geom.l_ab - geom.l_bc);
  const double hi = geom.l_ab + geom.l_bc;
  if (!std::isfinite(s) || !(s > lo) || !(s <= hi)) {
    throw Error(ErrorCode::geometry_infeasible,
                "pivot distance " + format_number(s) + " outside (" +
                    format_number(lo) + ", " + format_number(hi) + "]");
  }
  // Half-angle form of the law of cosines; stays accurate near 0 and 180.
  const double d = geom.l_ab - geom.l_bc;
  const double num = std::max((s - d) * (s + d), 0.0);
  const double den = std::max((hi - s) * (hi + s), 0.0);
  return 2.0 * std::atan2(std::sqrt(num), std::sqrt(den)) * kDegPerRad;
}

double critical_distance(const SliderCrankGeometry& geom) {
  check_links(geom);
  if (!(geom.theta_crit > 0.0) || !(geom.theta_crit <= 180.0)) {
    throw Error(ErrorCode::geometry_infeasible, "theta_crit must lie in (0, 180] degrees");
  }
  const double d = geom.l_ab - geom.l_bc;
  const double half = std::sin(geom.theta_crit / (2.0 * kDegPerRad));
  const double s = std::sqrt(d * d + 4.0 * geom.l_ab * geom.l_bc * half * half);
  return std::min(s, geom.l_ab + geom.l_bc);
}

FlowStatus kink_status(const SliderCrankGeometry& geom, double s) {
  return crank_angle(geom, s) < geom.theta_crit ? FlowStatus::Blocked
                                                : FlowStatus::Unblocked;
}

}  // namespace pneu
