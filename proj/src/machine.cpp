#include "pneu/machine.hpp"

#include <algorithm>
#include <limits>

#include "pneu/error.hpp"
#include "pneu/netlist.hpp"

namespace pneu {

AbstractMachine::AbstractMachine(std::vector<GateRelation> gates,
                                 std::vector<MachineSignal> signals,
                                 std::map<std::string, bool> fixed_vents)
    : gates_(std::move(gates)), signals_(std::move(signals)) {
  for (const auto& g : gates_) {
    register_threshold(g.input, g.input_threshold);
    ensure(g.output);
    for (const auto& t : g.output_thresholds) register_threshold(g.output, t);
  }
  for (const auto& s : signals_) {
    if (arity(s.threshold) != 1) {
      throw Error(ErrorCode::invalid_monitor, "signal " + s.actuator + "[" + s.label +
                                                  "] must be one bit wide");
    }
    register_threshold(s.actuator, s.threshold);
  }
  for (const auto& entry : fixed_vents) ensure(entry.first);
  for (auto& rungs : ladders_) {
    std::sort(rungs.begin(), rungs.end());
    rungs.erase(std::unique(rungs.begin(), rungs.end()), rungs.end());
  }

  driver_.assign(actuators_.size(), -1);
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    auto& d = driver_[actuator(gates_[i].output)];
    if (d >= 0) {
      throw Error(ErrorCode::conflict,
                  "actuator " + gates_[i].output + " is driven by more than one gate");
    }
    d = static_cast<int>(i);
  }
  fixed_target_.assign(actuators_.size(), 0);
  for (const auto& [id, closed] : fixed_vents) {
    const auto a = actuator(id);
    if (driver_[a] >= 0) {
      throw Error(ErrorCode::conflict, "actuator " + id + " has both a gate and a fixed vent");
    }
    fixed_target_[a] = closed ? 1 : -1;
  }
}

std::size_t AbstractMachine::ensure(const std::string& id) {
  const auto it = std::find(actuators_.begin(), actuators_.end(), id);
  if (it != actuators_.end()) return static_cast<std::size_t>(it - actuators_.begin());
  actuators_.push_back(id);
  ladders_.emplace_back();
  return actuators_.size() - 1;
}

void AbstractMachine::register_threshold(const std::string& id, const ThresholdSpec& spec) {
  validate(spec);
  const std::size_t a = ensure(id);
  auto& rungs = ladders_[a];
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) {
    rungs.push_back(c->level);
  } else if (auto* p = std::get_if<PairThreshold>(&spec)) {
    rungs.push_back(p->lower);
    rungs.push_back(p->upper);
  } else {
    const auto& h = std::get<HystereticThreshold>(spec);
    rungs.push_back(h.low);
    rungs.push_back(h.high);
    const bool known = std::any_of(slots_.begin(), slots_.end(), [&](const HystSlot& s) {
      return s.actuator == a && s.threshold == h;
    });
    if (!known) slots_.push_back({a, h, 0});
  }
}

AbstractMachine AbstractMachine::from_circuit(const CircuitModel& circuit) {
  auto gates = abstract_circuit(circuit);
  std::vector<MachineSignal> signals;
  for (const auto& m : circuit.monitors) signals.push_back({m.actuator, m.label, m.threshold});
  std::map<std::string, bool> fixed;
  for (const auto& a : circuit.actuators) {
    if (!circuit.controller_of(a.id)) {
      fixed[a.id] = a.vent.value_or(VentDecl::Open) == VentDecl::Closed;
    }
  }
  AbstractMachine m(std::move(gates), std::move(signals), std::move(fixed));
  for (const auto& v : circuit.valves) {
    if (!v.hysteretic()) continue;
    const auto a = m.actuator(v.sense);
    const auto& h = std::get<HystereticThreshold>(v.thresholds);
    m.slots_[m.slot(a, h)].init = v.init_memory.bit;
  }
  return m;
}

std::size_t AbstractMachine::actuator(const std::string& id) const {
  const auto it = std::find(actuators_.begin(), actuators_.end(), id);
  if (it == actuators_.end()) throw Error(ErrorCode::invalid_input, "unknown actuator " + id);
  return static_cast<std::size_t>(it - actuators_.begin());
}

std::size_t AbstractMachine::rung_index(std::size_t a, double level) const {
  const auto& rungs = ladders_[a];
  const auto it = std::lower_bound(rungs.begin(), rungs.end(), level);
  return static_cast<std::size_t>(it - rungs.begin());
}

std::size_t AbstractMachine::slot(std::size_t a, const HystereticThreshold& h) const {
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].actuator == a && slots_[i].threshold == h) return i;
  }
  throw Error(ErrorCode::invalid_input, "no hysteretic slot on " + actuators_[a]);
}

std::size_t AbstractMachine::state_space_size() const {
  constexpr std::size_t cap = std::size_t{1} << 62;
  std::size_t n = 1;
  auto mul = [&](std::size_t f) { n = (n > cap / f) ? cap : n * f; };
  for (const auto& rungs : ladders_) mul(rungs.size() + 1);
  for (std::size_t i = 0; i < slots_.size(); ++i) mul(2);
  return n;
}

AbstractMachine::State AbstractMachine::all_low() const {
  State s;
  s.position.assign(actuators_.size(), 0);
  s.memory.reserve(slots_.size());
  for (const auto& sl : slots_) s.memory.push_back(sl.init);
  return s;
}

// Position k means the pressure lies above exactly k rungs, so p >= rung[i]
// iff k > i.
LogicLevel AbstractMachine::level(const State& s, std::size_t a,
                                  const ThresholdSpec& spec) const {
  const std::size_t pos = s.position[a];
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) {
    return LogicLevel::binary(pos > rung_index(a, c->level));
  }
  if (auto* p = std::get_if<PairThreshold>(&spec)) {
    const std::uint8_t hi = pos > rung_index(a, p->upper);
    const std::uint8_t lo = pos > rung_index(a, p->lower);
    return LogicLevel::from_bits({hi, lo});
  }
  return LogicLevel::binary(s.memory[slot(a, std::get<HystereticThreshold>(spec))] != 0);
}

AbstractMachine::State AbstractMachine::step(const State& s) const {
  State next = s;
  for (std::size_t a = 0; a < actuators_.size(); ++a) {
    int dir = fixed_target_[a];
    if (driver_[a] >= 0) {
      const auto& g = gates_[static_cast<std::size_t>(driver_[a])];
      const LogicLevel in = level(s, actuator(g.input), g.input_threshold);
      dir = gate_target(g, in).is_high() ? 1 : -1;
    }
    if (dir > 0 && next.position[a] < ladders_[a].size()) ++next.position[a];
    if (dir < 0 && next.position[a] > 0) --next.position[a];
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& sl = slots_[i];
    const std::size_t pos = next.position[sl.actuator];
    if (pos > rung_index(sl.actuator, sl.threshold.high)) {
      next.memory[i] = 1;
    } else if (pos <= rung_index(sl.actuator, sl.threshold.low)) {
      next.memory[i] = 0;
    }
  }
  return next;
}

StateBits AbstractMachine::observe(const State& s) const {
  StateBits bits;
  bits.reserve(signals_.size());
  for (const auto& sig : signals_) {
    bits.push_back(level(s, actuator(sig.actuator), sig.threshold).bit(0) ? 1 : 0);
  }
  return bits;
}

LogicCycle logic_simulate(const AbstractMachine& machine,
                          const AbstractMachine::State& initial) {
  const std::size_t space = machine.state_space_size();
  const std::size_t limit =
      space > std::numeric_limits<std::size_t>::max() / 10 ? space : 10 * space;
  std::map<AbstractMachine::State, std::size_t> seen;
  std::vector<AbstractMachine::State> path;
  AbstractMachine::State s = initial;
  for (std::size_t n = 0; n <= limit; ++n) {
    if (auto it = seen.find(s); it != seen.end()) {
      LogicCycle out;
      out.transient_steps = it->second;
      out.trajectory.assign(path.begin() + static_cast<std::ptrdiff_t>(it->second), path.end());
      out.deadlock = out.trajectory.size() == 1;
      for (const auto& st : out.trajectory) {
        auto bits = machine.observe(st);
        if (out.states.empty() || out.states.back() != bits) out.states.push_back(std::move(bits));
      }
      while (out.states.size() > 1 && out.states.front() == out.states.back()) {
        out.states.pop_back();
      }
      return out;
    }
    seen.emplace(s, path.size());
    path.push_back(s);
    s = machine.step(s);
  }
  throw Error(ErrorCode::nonperiodic,
              "no repeating state within " + std::to_string(limit) + " steps");
}

StateTransitionChart chart_of(const AbstractMachine& machine, const LogicCycle& cycle,
                              std::string name) {
  StateTransitionChart chart;
  chart.name = std::move(name);
  for (const auto& s : machine.signals()) chart.signals.push_back({s.actuator, s.label});
  for (std::size_t i = 0; i < cycle.states.size(); ++i) {
    chart.states.push_back({"S" + std::to_string(i), cycle.states[i]});
    chart.cycle.push_back("S" + std::to_string(i));
  }
  return chart;
}

}  // namespace pneu
