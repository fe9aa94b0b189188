#include "pneu/netlist.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <span>

#include "lexer.hpp"
#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {
namespace {

using detail::Line;
using detail::Token;

struct KeyValue {
  std::string_view key;
  std::string_view value;
  Token token;
};

struct Reference {
  std::string id;
  Token token;
  std::string owner;
};

class NetlistParser {
 public:
  explicit NetlistParser(NetlistDocument& doc) : doc_(doc) {}

  void run() {
    const auto lines = detail::tokenize(doc_.source);
    for (const auto& line : lines) {
      line_ = line.number;
      const auto kw = line.tokens[0].text;
      if (kw == "actuator") {
        parse_actuator(line);
      } else if (kw == "valve") {
        parse_valve(line);
      } else if (kw == "monitor") {
        parse_monitor(line);
      } else {
        error(line.tokens[0], "unknown declaration '" + std::string(kw) + "'");
      }
    }
    resolve();
    if (lines.empty()) {
      doc_.diagnostics.push_back(
          {Severity::Warning, {1, 1}, "netlist declares no elements", ""});
    }
    if (!has_errors(doc_.diagnostics)) doc_.circuit = std::move(circuit_);
  }

 private:
  void error(const Token& at, std::string msg) {
    doc_.diagnostics.push_back(
        {Severity::Error, {line_, at.column}, std::move(msg), std::string(at.text)});
  }

  void warning(SourceLoc loc, std::string msg, std::string token) {
    doc_.diagnostics.push_back({Severity::Warning, loc, std::move(msg), std::move(token)});
  }

  // Declaration id at tokens[1]; registers it in the shared id namespace.
  std::optional<std::string> declare(const Line& line) {
    if (line.tokens.size() < 2) {
      error(line.tokens[0], "missing id after '" + std::string(line.tokens[0].text) + "'");
      return std::nullopt;
    }
    const Token& tok = line.tokens[1];
    if (!detail::is_identifier(tok.text)) {
      error(tok, "invalid identifier '" + std::string(tok.text) + "'");
      return std::nullopt;
    }
    std::string id(tok.text);
    if (!doc_.locations.emplace(id, SourceLoc{line_, tok.column}).second) {
      error(tok, "duplicate id '" + id + "'");
      return std::nullopt;
    }
    return id;
  }

  // key=value tokens from index 2 on; false if any was malformed.
  bool collect(const Line& line, std::span<const std::string_view> allowed,
               std::vector<KeyValue>& out) {
    bool ok = true;
    for (std::size_t i = 2; i < line.tokens.size(); ++i) {
      const Token& tok = line.tokens[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        error(tok, "expected key=value, got '" + std::string(tok.text) + "'");
        ok = false;
        continue;
      }
      KeyValue kv{tok.text.substr(0, eq), tok.text.substr(eq + 1), tok};
      if (std::find(allowed.begin(), allowed.end(), kv.key) == allowed.end()) {
        error(tok, "unknown key '" + std::string(kv.key) + "'");
        ok = false;
        continue;
      }
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const KeyValue& o) { return o.key == kv.key; });
      if (dup) {
        error(tok, "duplicate key '" + std::string(kv.key) + "'");
        ok = false;
        continue;
      }
      out.push_back(kv);
    }
    return ok;
  }

  static const KeyValue* find(const std::vector<KeyValue>& kvs, std::string_view key) {
    for (const auto& kv : kvs) {
      if (kv.key == key) return &kv;
    }
    return nullptr;
  }

  std::optional<double> number(const KeyValue& kv) {
    auto v = parse_number(kv.value);
    if (!v) error(kv.token, "invalid number '" + std::string(kv.value) + "' for " +
                                std::string(kv.key));
    return v;
  }

  std::optional<double> non_negative(const KeyValue& kv) {
    auto v = number(kv);
    if (v && *v < 0.0) {
      error(kv.token, std::string(kv.key) + " must be >= 0");
      return std::nullopt;
    }
    return v;
  }

  void parse_actuator(const Line& line) {
    static constexpr std::array<std::string_view, 5> keys{"fill", "vent_coeff", "p0",
                                                          "p_max", "vent"};
    auto id = declare(line);
    std::vector<KeyValue> kvs;
    const bool ok = collect(line, keys, kvs) && id.has_value();

    ActuatorModel a;
    bool valid = ok;
    for (std::string_view req : {"fill", "vent_coeff", "p0"}) {
      if (!find(kvs, req)) {
        error(line.tokens[0], "actuator missing required key '" + std::string(req) + "'");
        valid = false;
      }
    }
    if (auto* kv = find(kvs, "fill")) {
      auto v = non_negative(*kv);
      valid &= v.has_value();
      a.fill_rate = v.value_or(0.0);
    }
    if (auto* kv = find(kvs, "vent_coeff")) {
      auto v = number(*kv);
      if (v && !(*v > 0.0)) {
        error(kv->token, "vent_coeff must be > 0");
        v.reset();
      }
      valid &= v.has_value();
      a.vent_coeff = v.value_or(1.0);
    }
    if (auto* kv = find(kvs, "p0")) {
      auto v = non_negative(*kv);
      valid &= v.has_value();
      a.p0 = v.value_or(0.0);
    }
    if (auto* kv = find(kvs, "p_max")) {
      auto v = non_negative(*kv);
      valid &= v.has_value();
      if (v && find(kvs, "p0") && *v < a.p0) {
        error(kv->token, "p_max must be >= p0");
        valid = false;
      }
      a.p_max = v;
    }
    if (auto* kv = find(kvs, "vent")) {
      if (kv->value == "open") {
        a.vent = VentDecl::Open;
      } else if (kv->value == "closed") {
        a.vent = VentDecl::Closed;
      } else {
        error(kv->token, "vent must be open or closed");
        valid = false;
      }
    }
    if (!valid || !id) return;
    a.id = *id;
    circuit_.actuators.push_back(std::move(a));
  }

  void parse_valve(const Line& line) {
    static constexpr std::array<std::string_view, 7> keys{
        "kind", "sense", "threshold", "low", "high", "controls", "init"};
    auto id = declare(line);
    std::vector<KeyValue> kvs;
    bool valid = collect(line, keys, kvs) && id.has_value();

    ValveSpec v;
    const KeyValue* kind = find(kvs, "kind");
    if (!kind) {
      error(line.tokens[0], "valve missing required key 'kind'");
      return;
    }
    if (auto k = parse_valve_kind(kind->value)) {
      v.kind = *k;
    } else {
      error(kind->token, "unknown valve kind '" + std::string(kind->value) + "'");
      return;
    }
    const std::string kname = to_string(v.kind);

    for (std::string_view req : {"sense", "controls"}) {
      const KeyValue* kv = find(kvs, req);
      if (!kv) {
        error(line.tokens[0], "valve missing required key '" + std::string(req) + "'");
        valid = false;
      } else if (!detail::is_identifier(kv->value)) {
        error(kv->token, "invalid identifier '" + std::string(kv->value) + "'");
        valid = false;
      }
    }

    const KeyValue* thr = find(kvs, "threshold");
    const KeyValue* low = find(kvs, "low");
    const KeyValue* high = find(kvs, "high");
    if (v.hysteretic()) {
      if (thr || !low || !high) {
        error(thr ? thr->token : kind->token, kname + " requires low/high");
        valid = false;
      } else {
        auto lo = non_negative(*low);
        auto hi = non_negative(*high);
        if (lo && hi && !(*lo < *hi)) {
          error(high->token, "low must be < high");
          valid = false;
        } else if (lo && hi) {
          v.thresholds = HystereticThreshold{*lo, *hi};
        } else {
          valid = false;
        }
      }
    } else {
      if (!thr || low || high) {
        error(low ? low->token : (high ? high->token : kind->token),
              kname + " requires threshold");
        valid = false;
      } else if (auto t = non_negative(*thr)) {
        v.thresholds = ConstantThreshold{*t};
      } else {
        valid = false;
      }
    }

    if (const KeyValue* init = find(kvs, "init")) {
      if (!v.hysteretic()) {
        error(init->token, "init applies only to hysteretic valves");
        valid = false;
      } else if (init->value == "0" || init->value == "1") {
        v.init_memory.bit = init->value == "1" ? 1 : 0;
      } else {
        error(init->token, "init must be 0 or 1");
        valid = false;
      }
    }

    if (!valid) return;
    v.id = *id;
    const KeyValue* sense = find(kvs, "sense");
    const KeyValue* controls = find(kvs, "controls");
    v.sense = std::string(sense->value);
    v.controls = std::string(controls->value);
    refs_.push_back({v.sense, value_token(*sense), "valve " + v.id});
    control_refs_.push_back({v.controls, value_token(*controls), "valve " + v.id});
    circuit_.valves.push_back(std::move(v));
  }

  void parse_monitor(const Line& line) {
    if (line.tokens.size() < 2) {
      error(line.tokens[0], "missing actuator id after 'monitor'");
      return;
    }
    const Token& target = line.tokens[1];
    if (!detail::is_identifier(target.text)) {
      error(target, "invalid identifier '" + std::string(target.text) + "'");
      return;
    }
    if (line.tokens.size() < 3) {
      error(target, "monitor needs at least one <label>=<threshold>");
      return;
    }
    const std::string actuator(target.text);
    bool referenced = false;
    for (std::size_t i = 2; i < line.tokens.size(); ++i) {
      const Token& tok = line.tokens[i];
      const auto eq = tok.text.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        error(tok, "expected <label>=<threshold>, got '" + std::string(tok.text) + "'");
        continue;
      }
      const std::string label(tok.text.substr(0, eq));
      const std::string_view value = tok.text.substr(eq + 1);
      if (!detail::is_identifier(label)) {
        error(tok, "invalid monitor label '" + label + "'");
        continue;
      }
      auto spec = monitor_threshold(tok, value);
      if (!spec) continue;
      if (!labels_.insert({actuator, label}).second) {
        error(tok, "duplicate monitor label '" + label + "' on " + actuator);
        continue;
      }
      circuit_.monitors.push_back({actuator, label, *spec});
      if (!referenced) {
        refs_.push_back({actuator, target, "monitor"});
        referenced = true;
      }
    }
  }

  std::optional<ThresholdSpec> monitor_threshold(const Token& tok, std::string_view value) {
    constexpr std::string_view prefix = "hyst(";
    if (value.substr(0, prefix.size()) == prefix) {
      if (value.back() != ')') {
        error(tok, "unterminated hyst(...)");
        return std::nullopt;
      }
      const auto inner = value.substr(prefix.size(), value.size() - prefix.size() - 1);
      const auto comma = inner.find(',');
      if (comma == std::string_view::npos) {
        error(tok, "hyst needs two values: hyst(<low>,<high>)");
        return std::nullopt;
      }
      auto lo = parse_number(inner.substr(0, comma));
      auto hi = parse_number(inner.substr(comma + 1));
      if (!lo || !hi) {
        error(tok, "invalid number in '" + std::string(value) + "'");
        return std::nullopt;
      }
      if (*lo < 0.0 || *hi < 0.0) {
        error(tok, "thresholds must be >= 0");
        return std::nullopt;
      }
      if (!(*lo < *hi)) {
        error(tok, "low must be < high");
        return std::nullopt;
      }
      return HystereticThreshold{*lo, *hi};
    }
    auto v = parse_number(value);
    if (!v) {
      error(tok, "invalid threshold '" + std::string(value) + "'");
      return std::nullopt;
    }
    if (*v < 0.0) {
      error(tok, "thresholds must be >= 0");
      return std::nullopt;
    }
    return ConstantThreshold{*v};
  }

  static Token value_token(const KeyValue& kv) {
    return {kv.value, kv.token.column + kv.key.size() + 1};
  }

  void resolve() {
    std::set<std::string> actuators;
    for (const auto& a : circuit_.actuators) actuators.insert(a.id);
    auto check = [&](const Reference& r) {
      if (actuators.count(r.id)) return true;
      // Ids that failed to parse were already reported at their declaration.
      if (doc_.locations.count(r.id) && !circuit_.valve_index(r.id)) return false;
      doc_.diagnostics.push_back({Severity::Error,
                                  {line_of(r.token), r.token.column},
                                  r.owner + " references unknown actuator '" + r.id + "'",
                                  r.id});
      return false;
    };
    for (const auto& r : refs_) check(r);
    std::map<std::string, std::string> controller;
    for (const auto& r : control_refs_) {
      if (!check(r)) continue;
      auto [it, fresh] = controller.emplace(r.id, r.owner);
      if (!fresh) {
        doc_.diagnostics.push_back(
            {Severity::Error, {line_of(r.token), r.token.column},
             "actuator " + r.id + " is already controlled by " + it->second, r.id});
        continue;
      }
      const auto a = circuit_.actuator_index(r.id);
      if (circuit_.actuators[*a].vent) {
        warning({line_of(r.token), r.token.column},
                "actuator " + r.id + " declares a fixed vent but is controlled by " +
                    r.owner,
                r.id);
      }
    }
  }

  // Tokens are views into the source; recover the line from the offset.
  std::size_t line_of(const Token& t) const {
    const char* base = doc_.source.data();
    const auto offset = static_cast<std::size_t>(t.text.data() - base);
    return 1 + static_cast<std::size_t>(
                   std::count(doc_.source.begin(),
                              doc_.source.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
  }

  NetlistDocument& doc_;
  CircuitModel circuit_;
  std::size_t line_ = 0;
  std::vector<Reference> refs_;
  std::vector<Reference> control_refs_;
  std::set<std::pair<std::string, std::string>> labels_;
};

}  // namespace

NetlistDocument parse_netlist(std::string text) {
  NetlistDocument doc;
  doc.source = std::move(text);
  NetlistParser(doc).run();
  return doc;
}

std::string serialize_netlist(const CircuitModel& circuit) {
  std::string out;
  for (const auto& a : circuit.actuators) {
    out += "actuator " + a.id + " fill=" + format_number(a.fill_rate) +
           " vent_coeff=" + format_number(a.vent_coeff) + " p0=" + format_number(a.p0);
    if (a.p_max) out += " p_max=" + format_number(*a.p_max);
    if (a.vent) out += a.vent == VentDecl::Open ? " vent=open" : " vent=closed";
    out += '\n';
  }
  for (const auto& v : circuit.valves) {
    out += "valve " + v.id + " kind=" + to_string(v.kind) + " sense=" + v.sense;
    if (auto* h = std::get_if<HystereticThreshold>(&v.thresholds)) {
      out += " low=" + format_number(h->low) + " high=" + format_number(h->high);
    } else {
      out += " threshold=" + format_number(std::get<ConstantThreshold>(v.thresholds).level);
    }
    out += " controls=" + v.controls;
    if (v.hysteretic()) out += " init=" + std::to_string(v.init_memory.bit);
    out += '\n';
  }
  for (const auto& m : circuit.monitors) {
    out += "monitor " + m.actuator + " " + m.label + "=";
    if (auto* h = std::get_if<HystereticThreshold>(&m.threshold)) {
      out += "hyst(" + format_number(h->low) + "," + format_number(h->high) + ")";
    } else if (auto* c = std::get_if<ConstantThreshold>(&m.threshold)) {
      out += format_number(c->level);
    } else {
      throw Error(ErrorCode::invalid_input, "monitor " + m.name() +
                                                " uses a pair threshold, which has no text form");
    }
    out += '\n';
  }
  return out;
}

namespace {

// Thresholds at which an actuator is sensed by valves, merged per the
// multi-bit decomposition: two distinct constants become one pair.
std::vector<ThresholdSpec> sensed_thresholds(const CircuitModel& circuit,
                                             const std::string& actuator) {
  std::vector<ThresholdSpec> specs;
  for (const auto& v : circuit.valves) {
    if (v.sense != actuator) continue;
    if (std::find(specs.begin(), specs.end(), v.thresholds) == specs.end()) {
      specs.push_back(v.thresholds);
    }
  }
  if (specs.size() == 2 && std::holds_alternative<ConstantThreshold>(specs[0]) &&
      std::holds_alternative<ConstantThreshold>(specs[1])) {
    const double a = std::get<ConstantThreshold>(specs[0]).level;
    const double b = std::get<ConstantThreshold>(specs[1]).level;
    return {PairThreshold{std::min(a, b), std::max(a, b)}};
  }
  std::stable_sort(specs.begin(), specs.end(), [](const auto& x, const auto& y) {
    return sort_key(x) < sort_key(y);
  });
  return specs;
}

}  // namespace

std::vector<GateRelation> abstract_circuit(const CircuitModel& circuit) {
  validate(circuit);
  std::vector<GateRelation> gates;
  gates.reserve(circuit.valves.size());
  for (const auto& v : circuit.valves) {
    GateRelation g;
    g.kind = (v.kind == ValveKind::NC || v.kind == ValveKind::HNC) ? GateKind::Not
                                                                   : GateKind::Buffer;
    g.input = v.sense;
    g.output = v.controls;
    g.valve = v.id;
    g.input_threshold = v.thresholds;
    const auto inputs = sensed_thresholds(circuit, v.sense);
    if (inputs.size() == 1) {
      if (const auto* pair = std::get_if<PairThreshold>(&inputs[0])) {
        g.input_threshold = *pair;
        g.input_bit = std::get<ConstantThreshold>(v.thresholds).level == pair->upper ? 1 : 0;
      }
    }
    g.output_thresholds = sensed_thresholds(circuit, v.controls);
    gates.push_back(std::move(g));
  }
  return gates;
}

}  // namespace pneu
