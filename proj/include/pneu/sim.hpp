#pragma once

// Hybrid simulation of a valve-coupled actuator network: fixed-step RK4 on
// the lumped pressure dynamics, with every threshold crossing (valve switch
// or monitor level change) localized by bisection and committed as an event.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pneu/circuit.hpp"

namespace pneu {

struct SimConfig {
  double dt_max = 0.01;     // s
  double t_end = 30.0;      // s
  double event_tol = 1e-9;  // psi
  std::size_t record_stride = 1;
};

void validate(const SimConfig& cfg);

/// dp/dt per actuator. A blocked vent fills at the supply rate (held at zero
/// once p reaches p_max); an open vent decays as -vent_coeff * p.
std::vector<double> derivative(const CircuitModel& circuit,
                               std::span<const double> pressures,
                               std::span<const FlowStatus> valve_status);

/// Bisection for a zero of `f` on [t_lo, t_hi]. Returns a point on the
/// t_hi side of the sign change with |f| <= tol.
double locate_crossing(const std::function<double(double)>& f, double t_lo,
                       double t_hi, double tol);

struct TraceSample {
  double t = 0.0;
  std::vector<double> pressures;    // per actuator
  std::vector<FlowStatus> status;   // per valve
  std::vector<std::uint8_t> memory; // per valve; always 0 for NC/NO
  bool operator==(const TraceSample&) const = default;
};

enum class EventSource { Valve, Monitor };

struct TraceEvent {
  double t = 0.0;
  EventSource source = EventSource::Valve;
  std::size_t index = 0;  // into circuit.valves or circuit.monitors
  std::string name;
  int value = 0;          // new status (1 = unblocked) or new monitor bit
  double pressure = 0.0;  // sensed pressure at the event
  bool operator==(const TraceEvent&) const = default;
};

struct Trace {
  std::vector<std::string> actuators;
  std::vector<std::string> valves;
  std::vector<bool> hysteretic;
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;

  std::vector<TraceEvent> valve_events() const;
  bool operator==(const Trace&) const = default;
};

Trace simulate(const CircuitModel& circuit, const SimConfig& cfg);

struct SignalCrossing {
  double t = 0.0;
  double pressure = 0.0;
  bool bit = false;  // level after the crossing
};

/// Runs a threshold detector over a prescribed pressure signal p(t), with
/// the same event localization the simulator uses.
std::vector<SignalCrossing> scan_signal(const std::function<double(double)>& pressure,
                                        const ThresholdSpec& spec, HystMemory init,
                                        double t_begin, double t_end, double dt,
                                        double tol);

}  // namespace pneu
