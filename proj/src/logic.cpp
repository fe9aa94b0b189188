#include "pneu/logic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_threshold: return "invalid-threshold";
    case ErrorCode::geometry_infeasible: return "geometry-infeasible";
    case ErrorCode::no_crossing: return "no-crossing";
    case ErrorCode::simulation_stall: return "simulation-stall";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::invalid_monitor: return "invalid-monitor";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::nonperiodic: return "nonperiodic";
    case ErrorCode::inconsistent_chart: return "inconsistent-chart";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

LogicLevel LogicLevel::binary(bool bit) {
  return LogicLevel(std::vector<std::uint8_t>{static_cast<std::uint8_t>(bit)});
}

LogicLevel LogicLevel::from_bits(std::vector<std::uint8_t> msb_first) {
  if (msb_first.empty()) {
    throw Error(ErrorCode::invalid_input, "logic level needs at least one bit");
  }
  for (std::size_t i = 0; i < msb_first.size(); ++i) {
    if (msb_first[i] > 1) {
      throw Error(ErrorCode::invalid_input, "logic bits must be 0 or 1");
    }
    // MSB-first thermometer: once a 1 appears every lower bit is 1.
    if (i > 0 && msb_first[i - 1] == 1 && msb_first[i] == 0) {
      throw Error(ErrorCode::invalid_input,
                  "illegal non-monotone logic code " + LogicLevel(msb_first).str());
    }
  }
  return LogicLevel(std::move(msb_first));
}

LogicLevel LogicLevel::low(std::size_t arity) {
  return from_bits(std::vector<std::uint8_t>(arity, 0));
}

LogicLevel LogicLevel::high(std::size_t arity) {
  return from_bits(std::vector<std::uint8_t>(arity, 1));
}

std::size_t LogicLevel::ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

bool LogicLevel::bit(std::size_t lsb_index) const {
  if (lsb_index >= bits_.size()) {
    throw Error(ErrorCode::invalid_input, "bit index out of range");
  }
  return bits_[bits_.size() - 1 - lsb_index] != 0;
}

std::string LogicLevel::str() const {
  if (bits_.size() == 1) return bits_[0] ? "1" : "0";
  std::string out = "[";
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (i) out += ' ';
    out += bits_[i] ? '1' : '0';
  }
  return out + "]";
}

ThresholdSpec constant_threshold(double level) {
  ThresholdSpec spec = ConstantThreshold{level};
  validate(spec);
  return spec;
}

ThresholdSpec pair_threshold(double lower, double upper) {
  ThresholdSpec spec = PairThreshold{lower, upper};
  validate(spec);
  return spec;
}

ThresholdSpec hysteretic_threshold(double low, double high) {
  ThresholdSpec spec = HystereticThreshold{low, high};
  validate(spec);
  return spec;
}

namespace {

void require_level(double v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw Error(ErrorCode::invalid_threshold,
                "threshold must be finite and >= 0, got " + format_number(v));
  }
}

void require_ordered(double lo, double hi, const char* what) {
  if (!(lo < hi)) {
    throw Error(ErrorCode::invalid_threshold,
                std::string(what) + " thresholds must satisfy low < high, got " +
                    format_number(lo) + " and " + format_number(hi));
  }
}

void require_finite(double p) {
  if (!std::isfinite(p)) {
    throw Error(ErrorCode::invalid_input, "pressure must be finite");
  }
}

}  // namespace

void validate(const ThresholdSpec& spec) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, ConstantThreshold>) {
          require_level(t.level);
        } else if constexpr (std::is_same_v<T, PairThreshold>) {
          require_level(t.lower);
          require_level(t.upper);
          require_ordered(t.lower, t.upper, "pair");
        } else {
          require_level(t.low);
          require_level(t.high);
          require_ordered(t.low, t.high, "hysteretic");
        }
      },
      spec);
}

std::size_t arity(const ThresholdSpec& spec) {
  return std::holds_alternative<PairThreshold>(spec) ? 2 : 1;
}

bool is_hysteretic(const ThresholdSpec& spec) {
  return std::holds_alternative<HystereticThreshold>(spec);
}

double max_level(const ThresholdSpec& spec) {
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) return c->level;
  if (auto* p = std::get_if<PairThreshold>(&spec)) return p->upper;
  return std::get<HystereticThreshold>(spec).high;
}

double sort_key(const ThresholdSpec& spec) { return max_level(spec); }

std::string describe(const ThresholdSpec& spec) {
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) return format_number(c->level);
  if (auto* p = std::get_if<PairThreshold>(&spec)) {
    return "pair(" + format_number(p->lower) + "," + format_number(p->upper) + ")";
  }
  const auto& h = std::get<HystereticThreshold>(spec);
  return "hyst(" + format_number(h.low) + "," + format_number(h.high) + ")";
}

bool discretize_binary(double p, double threshold) {
  require_finite(p);
  require_level(threshold);
  return p >= threshold;
}

LogicLevel discretize_ternary(double p, double lower, double upper) {
  require_finite(p);
  require_level(lower);
  require_level(upper);
  require_ordered(lower, upper, "ternary");
  const std::uint8_t lo = p >= lower;
  const std::uint8_t hi = p >= upper;
  return LogicLevel::from_bits({hi, lo});
}

HystStep hysteretic_step(HystMemory mem, double p, double low, double high) {
  require_finite(p);
  require_level(low);
  require_level(high);
  require_ordered(low, high, "hysteretic");
  std::uint8_t bit = mem.bit;
  if (p >= high) {
    bit = 1;
  } else if (p <= low) {
    bit = 0;
  }
  return {bit != 0, HystMemory{bit}};
}

LogicLevel discretize(double p, const ThresholdSpec& spec, HystMemory& mem) {
  if (auto* c = std::get_if<ConstantThreshold>(&spec)) {
    return LogicLevel::binary(discretize_binary(p, c->level));
  }
  if (auto* pr = std::get_if<PairThreshold>(&spec)) {
    return discretize_ternary(p, pr->lower, pr->upper);
  }
  const auto& h = std::get<HystereticThreshold>(spec);
  const HystStep step = hysteretic_step(mem, p, h.low, h.high);
  mem = step.memory;
  return LogicLevel::binary(step.bit);
}

std::strong_ordering compare_levels(const LogicLevel& a, const LogicLevel& b) {
  if (a.arity() != b.arity()) {
    throw Error(ErrorCode::invalid_input, "cannot compare logic levels of arity " +
                                              std::to_string(a.arity()) + " and " +
                                              std::to_string(b.arity()));
  }
  return a.ones() <=> b.ones();
}

const char* to_string(GateKind kind) {
  return kind == GateKind::Not ? "NOT" : "BUFFER";
}

std::size_t GateRelation::output_arity() const {
  std::size_t n = 0;
  for (const auto& t : output_thresholds) n += arity(t);
  return std::max<std::size_t>(n, 1);
}

LogicLevel gate_target(const GateRelation& gate, const LogicLevel& input_level) {
  if (input_level.arity() != arity(gate.input_threshold)) {
    throw Error(ErrorCode::invalid_input,
                "gate " + std::string(to_string(gate.kind)) + " expects a " +
                    std::to_string(arity(gate.input_threshold)) +
                    "-bit input, got " + input_level.str());
  }
  const bool in = input_level.bit(gate.input_bit);
  const bool out = gate.kind == GateKind::Not ? !in : in;
  return out ? LogicLevel::high(gate.output_arity())
             : LogicLevel::low(gate.output_arity());
}

}  // namespace pneu
