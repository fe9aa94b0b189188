#pragma once

// Discretization of analog actuator pressures into logic levels, and the
// NOT / BUFFER gate relations that act on them.
//
// Pressures are in psi throughout. Logic levels are thermometer codes stored
// most-significant bit first: a two-bit (ternary) level is one of [0 0],
// [0 1] or [1 1].

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pneu {

class LogicLevel {
 public:
  LogicLevel() : bits_{0} {}

  static LogicLevel binary(bool bit);
  /// Throws invalid_input unless the bits form a thermometer code.
  static LogicLevel from_bits(std::vector<std::uint8_t> msb_first);
  static LogicLevel low(std::size_t arity);
  static LogicLevel high(std::size_t arity);

  std::size_t arity() const { return bits_.size(); }
  std::size_t ones() const;
  /// Bit by significance; index 0 is the least significant bit.
  bool bit(std::size_t lsb_index) const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool is_low() const { return ones() == 0; }
  bool is_high() const { return ones() == arity(); }

  /// "1" for binary levels, "[0 1]" for multi-bit ones.
  std::string str() const;

  bool operator==(const LogicLevel&) const = default;

 private:
  explicit LogicLevel(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}
  std::vector<std::uint8_t> bits_;
};

struct ConstantThreshold {
  double level = 0.0;
  bool operator==(const ConstantThreshold&) const = default;
};

struct PairThreshold {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const PairThreshold&) const = default;
};

struct HystereticThreshold {
  double low = 0.0;   // P-: output falls to 0 at or below this pressure
  double high = 0.0;  // P+: output rises to 1 at or above this pressure
  bool operator==(const HystereticThreshold&) const = default;
};

using ThresholdSpec =
    std::variant<ConstantThreshold, PairThreshold, HystereticThreshold>;

ThresholdSpec constant_threshold(double level);
ThresholdSpec pair_threshold(double lower, double upper);
ThresholdSpec hysteretic_threshold(double low, double high);

/// Throws invalid_threshold on negative, non-finite or misordered values.
void validate(const ThresholdSpec& spec);
std::size_t arity(const ThresholdSpec& spec);
bool is_hysteretic(const ThresholdSpec& spec);
/// Largest pressure value that appears in the spec.
double max_level(const ThresholdSpec& spec);
/// Key used to order thresholds ascending when several are merged.
double sort_key(const ThresholdSpec& spec);
std::string describe(const ThresholdSpec& spec);

struct HystMemory {
  std::uint8_t bit = 0;
  bool operator==(const HystMemory&) const = default;
};

struct HystStep {
  bool bit;
  HystMemory memory;
};

bool discretize_binary(double p, double threshold);
LogicLevel discretize_ternary(double p, double lower, double upper);
HystStep hysteretic_step(HystMemory mem, double p, double low, double high);

/// Evaluates any threshold variant; `mem` is read and updated only for
/// hysteretic specs.
LogicLevel discretize(double p, const ThresholdSpec& spec, HystMemory& mem);

std::strong_ordering compare_levels(const LogicLevel& a, const LogicLevel& b);

enum class GateKind { Not, Buffer };

const char* to_string(GateKind kind);

/// One valve coupling seen as a logic gate: the input actuator's level
/// (against input_threshold) fixes the direction in which the output
/// actuator's pressure evolves.
struct GateRelation {
  GateKind kind = GateKind::Buffer;
  std::string input;
  std::string output;
  ThresholdSpec input_threshold = ConstantThreshold{};
  /// Bit of a multi-bit input level read by this gate (0 = lowest threshold).
  std::size_t input_bit = 0;
  /// Thresholds at which the output actuator is itself observed, ascending.
  std::vector<ThresholdSpec> output_thresholds;
  std::string valve;

  std::size_t output_arity() const;
  bool hysteretic_input() const { return is_hysteretic(input_threshold); }

  bool operator==(const GateRelation&) const = default;
};

/// Next-state target of the gate output: always an extreme code, since the
/// output pressure keeps moving toward full fill or full vent while the
/// input holds.
LogicLevel gate_target(const GateRelation& gate, const LogicLevel& input_level);

}  // namespace pneu
