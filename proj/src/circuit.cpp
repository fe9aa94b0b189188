#include "pneu/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

std::optional<std::size_t> CircuitModel::actuator_index(std::string_view id) const {
  for (std::size_t i = 0; i < actuators.size(); ++i) {
    if (actuators[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> CircuitModel::valve_index(std::string_view id) const {
  for (std::size_t i = 0; i < valves.size(); ++i) {
    if (valves[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> CircuitModel::controller_of(std::string_view actuator) const {
  for (std::size_t i = 0; i < valves.size(); ++i) {
    if (valves[i].controls == actuator) return i;
  }
  return std::nullopt;
}

const Monitor* CircuitModel::find_monitor(std::string_view actuator,
                                          std::string_view label) const {
  for (const auto& m : monitors) {
    if (m.actuator == actuator && m.label == label) return &m;
  }
  return nullptr;
}

double CircuitModel::effective_p_max(std::size_t actuator) const {
  const auto& a = actuators.at(actuator);
  if (a.p_max) return *a.p_max;
  double top = 0.0;
  for (const auto& m : monitors) top = std::max(top, max_level(m.threshold));
  if (monitors.empty() || top <= 0.0) return std::numeric_limits<double>::infinity();
  return 5.0 * top;
}

double CircuitModel::max_threshold() const {
  double top = 0.0;
  for (const auto& v : valves) top = std::max(top, max_level(v.thresholds));
  for (const auto& m : monitors) top = std::max(top, max_level(m.threshold));
  return top;
}

void validate(const CircuitModel& circuit) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_input, msg); };
  std::set<std::string> ids;
  for (const auto& a : circuit.actuators) {
    if (!ids.insert(a.id).second) fail("duplicate id '" + a.id + "'");
    if (!std::isfinite(a.fill_rate) || a.fill_rate < 0.0) {
      fail("actuator " + a.id + ": fill must be >= 0");
    }
    if (!std::isfinite(a.vent_coeff) || !(a.vent_coeff > 0.0)) {
      fail("actuator " + a.id + ": vent_coeff must be > 0");
    }
    if (!std::isfinite(a.p0) || a.p0 < 0.0) fail("actuator " + a.id + ": p0 must be >= 0");
    if (a.p_max && !(*a.p_max >= a.p0)) {
      fail("actuator " + a.id + ": p0 exceeds p_max " + format_number(*a.p_max));
    }
  }
  std::set<std::string> controlled;
  for (const auto& v : circuit.valves) {
    if (!ids.insert(v.id).second) fail("duplicate id '" + v.id + "'");
    validate(v);
    if (!circuit.actuator_index(v.sense)) {
      fail("valve " + v.id + ": unknown sense actuator '" + v.sense + "'");
    }
    const auto target = circuit.actuator_index(v.controls);
    if (!target) fail("valve " + v.id + ": unknown controlled actuator '" + v.controls + "'");
    if (!controlled.insert(v.controls).second) {
      fail("actuator " + v.controls + " has more than one controlling valve");
    }
    if (circuit.actuators[*target].vent) {
      throw Error(ErrorCode::conflict, "valve " + v.id + " controls actuator " +
                                           v.controls + " which declares a fixed vent");
    }
  }
  std::set<std::pair<std::string, std::string>> labels;
  for (const auto& m : circuit.monitors) {
    if (!circuit.actuator_index(m.actuator)) {
      fail("monitor on unknown actuator '" + m.actuator + "'");
    }
    if (!labels.insert({m.actuator, m.label}).second) {
      fail("duplicate monitor label " + m.name());
    }
    validate(m.threshold);
  }
}

}  // namespace pneu
