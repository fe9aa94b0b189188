#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "pneu/error.hpp"
#include "pneu/format.hpp"
#include "pneu/fsm.hpp"
#include "pneu/netlist.hpp"

using namespace pneu;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) {
  return read_file(std::string(PNEU_DATA_DIR) + "/" + name);
}

const ParseDiagnostic* first_error(const std::vector<ParseDiagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) return &d;
  }
  return nullptr;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("reference crawler parses") {
  const auto doc = parse_netlist(data("crawler.pneu"));
  REQUIRE(doc.ok());
  CHECK(doc.diagnostics.empty());
  const auto& c = *doc.circuit;
  CHECK(c.actuators.size() == 3);
  CHECK(c.valves.size() == 3);
  CHECK(c.monitors.size() == 3);
  const auto& hnov = c.valves[*c.valve_index("HNOV")];
  CHECK(hnov.kind == ValveKind::HNO);
  CHECK(hnov.sense == "R");
  CHECK(hnov.controls == "F");
  CHECK(hnov.thresholds == hysteretic_threshold(0.05, 1.8));
  CHECK(c.find_monitor("M", "P_M")->threshold == constant_threshold(1.5));
  CHECK(doc.locations.at("NOV").line == 11);
}

TEST_CASE("hysteretic kind with a constant threshold") {
  const auto doc = parse_netlist(
      "actuator R fill=1 vent_coeff=1 p0=0\n"
      "actuator F fill=1 vent_coeff=1 p0=0\n"
      "valve v1 kind=HNO sense=R threshold=1.0 controls=F\n");
  CHECK_FALSE(doc.ok());
  const auto* e = first_error(doc.diagnostics);
  REQUIRE(e);
  CHECK(e->message == "HNO requires low/high");
  CHECK(e->loc.line == 3);
}

TEST_CASE("empty file gives an empty circuit and a warning") {
  for (const char* text : {"", "# only a comment\n\n"}) {
    const auto doc = parse_netlist(text);
    REQUIRE(doc.ok());
    CHECK(doc.circuit->actuators.empty());
    REQUIRE(doc.diagnostics.size() == 1);
    CHECK(doc.diagnostics[0].severity == Severity::Warning);
  }
}

TEST_CASE("diagnostic format") {
  ParseDiagnostic d{Severity::Error, {4, 33}, "boom", "x"};
  CHECK(format_diagnostic(d, "a.pneu") == "a.pneu:4:33: error: boom");
  d.severity = Severity::Warning;
  CHECK(format_diagnostic(d, "a.pneu") == "a.pneu:4:33: warning: boom");
}

TEST_CASE("optional keys are elided on output") {
  const auto doc = parse_netlist("actuator A fill=1 vent_coeff=0.5 p0=0\n");
  REQUIRE(doc.ok());
  CHECK(serialize_netlist(*doc.circuit) == "actuator A fill=1 vent_coeff=0.5 p0=0\n");
  const auto capped = parse_netlist("actuator A fill=1 vent_coeff=0.5 p0=0 vent=closed p_max=4\n");
  REQUIRE(capped.ok());
  CHECK(serialize_netlist(*capped.circuit) ==
        "actuator A fill=1 vent_coeff=0.5 p0=0 p_max=4 vent=closed\n");
}

TEST_CASE("serialization round trip on shipped netlists") {
  for (const auto& entry : fs::directory_iterator(PNEU_DATA_DIR)) {
    if (entry.path().extension() != ".pneu") continue;
    CAPTURE(entry.path().string());
    const auto first = parse_netlist(read_file(entry.path().string()));
    REQUIRE(first.ok());
    const std::string text = serialize_netlist(*first.circuit);
    const auto second = parse_netlist(text);
    REQUIRE(second.ok());
    CHECK(*second.circuit == *first.circuit);
    CHECK(serialize_netlist(*second.circuit) == text);
  }
}

TEST_CASE("numbers survive the round trip exactly") {
  CircuitModel c;
  c.actuators.push_back({"A", 0.1, 1.0 / 3.0, 1e-7, 12345.678901234567, std::nullopt});
  c.monitors.push_back({"A", "P", hysteretic_threshold(0.3, 2.0 / 3.0)});
  const auto doc = parse_netlist(serialize_netlist(c));
  REQUIRE(doc.ok());
  CHECK(*doc.circuit == c);
}

TEST_CASE("abstraction of the crawler") {
  const auto gates = abstract_circuit(*parse_netlist(data("crawler.pneu")).circuit);
  REQUIRE(gates.size() == 3);
  CHECK(gates[0].kind == GateKind::Not);
  CHECK(gates[0].input == "F");
  CHECK(gates[0].output == "R");
  CHECK(gates[0].input_threshold == constant_threshold(2.3));
  CHECK(gates[0].output_arity() == 2);
  CHECK(gates[1].kind == GateKind::Buffer);
  CHECK(gates[1].input == "R");
  CHECK(gates[1].output == "F");
  CHECK(gates[1].hysteretic_input());
  CHECK(gates[2].kind == GateKind::Buffer);
  CHECK(gates[2].output == "M");
  CHECK(gates[2].input_threshold == constant_threshold(1.1));
}

TEST_CASE("single buffer") {
  const auto doc = parse_netlist(
      "actuator A fill=1 vent_coeff=1 p0=0 vent=closed\n"
      "actuator B fill=1 vent_coeff=1 p0=0\n"
      "valve V kind=NO sense=A threshold=1.2 controls=B\n");
  REQUIRE(doc.ok());
  const auto gates = abstract_circuit(*doc.circuit);
  REQUIRE(gates.size() == 1);
  CHECK(gates[0].kind == GateKind::Buffer);
  CHECK(gates[0].input == "A");
  CHECK(gates[0].output == "B");
  CHECK(gates[0].input_threshold == constant_threshold(1.2));
}

TEST_CASE("two valves on one actuator share a pair threshold") {
  const auto doc = parse_netlist(
      "actuator A fill=1 vent_coeff=1 p0=0 vent=closed\n"
      "actuator B fill=1 vent_coeff=1 p0=0\n"
      "actuator C fill=1 vent_coeff=1 p0=0\n"
      "valve VB kind=NO sense=A threshold=1.8 controls=B\n"
      "valve VC kind=NO sense=A threshold=1.1 controls=C\n");
  REQUIRE(doc.ok());
  const auto gates = abstract_circuit(*doc.circuit);
  REQUIRE(gates.size() == 2);
  for (const auto& g : gates) {
    CHECK(g.kind == GateKind::Buffer);
    CHECK(g.input_threshold == pair_threshold(1.1, 1.8));
  }
  CHECK(gates[0].input_bit == 1);
  CHECK(gates[1].input_bit == 0);
}

TEST_CASE("a fixed vent on a controlled actuator conflicts") {
  const auto doc = parse_netlist(
      "actuator A fill=1 vent_coeff=1 p0=0\n"
      "actuator B fill=1 vent_coeff=1 p0=0 vent=open\n"
      "valve V kind=NC sense=A threshold=1 controls=B\n");
  REQUIRE(doc.ok());
  REQUIRE(doc.diagnostics.size() == 1);
  CHECK(doc.diagnostics[0].severity == Severity::Warning);
  try {
    abstract_circuit(*doc.circuit);
    FAIL("expected a conflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
}

TEST_CASE("malformed fixtures produce located diagnostics") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(std::string(PNEU_FIXTURE_DIR) + "/malformed")) {
    const std::string path = entry.path().string();
    CAPTURE(path);
    const std::string text = read_file(path);
    // First line: "# expect: <line>:<col> <message fragment>"
    const std::string header = text.substr(0, text.find('\n'));
    const auto colon = header.find(':', 10);
    const auto space = header.find(' ', colon);
    const std::size_t line = std::stoul(header.substr(10, colon - 10));
    const std::size_t col = std::stoul(header.substr(colon + 1, space - colon - 1));
    const std::string fragment = header.substr(space + 1);

    std::vector<ParseDiagnostic> diags;
    bool ok = false;
    if (entry.path().extension() == ".chart") {
      const auto doc = parse_chart(text);
      diags = doc.diagnostics;
      ok = doc.ok();
    } else {
      const auto doc = parse_netlist(text);
      diags = doc.diagnostics;
      ok = doc.ok();
    }
    CHECK_FALSE(ok);
    const auto* e = first_error(diags);
    REQUIRE(e);
    CHECK(e->loc.line == line);
    CHECK(e->loc.column == col);
    CHECK(e->message.find(fragment) != std::string::npos);
    const std::string shown = format_diagnostic(*e, path);
    CHECK(shown.rfind(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": error: ", 0) == 0);
    ++seen;
  }
  CHECK(seen >= 20);
}

TEST_CASE("mutation fuzz never crashes") {
  const std::string base = data("crawler.pneu");
  std::vector<std::vector<std::string>> lines;
  {
    std::istringstream in(base);
    for (std::string l; std::getline(in, l);) lines.push_back(split_tokens(l));
  }
  const std::vector<std::string> pool = {
      "actuator", "valve", "monitor", "kind=NC", "kind=HNO", "kind=??", "sense=F", "sense=Q",
      "controls=R", "controls=", "threshold=-1", "threshold=nan", "threshold=1e400", "low=2",
      "high=0.1", "init=2", "init=1", "fill=1", "p0=", "=", "P=hyst(", "P=hyst(1,2)",
      "P=hyst(2,1)", "P=hyst(,)", "#", "F", "R", "p_max=0", "vent=closed", "\xff\xfe", "x=y=z"};
  std::mt19937_64 rng(2024);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  int accepted = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    auto mutated = lines;
    const int edits = 1 + static_cast<int>(pick(3));
    for (int k = 0; k < edits; ++k) {
      auto& line = mutated[pick(mutated.size())];
      switch (pick(6)) {
        case 0: if (!line.empty()) line.erase(line.begin() + static_cast<long>(pick(line.size()))); break;
        case 1: line.insert(line.begin() + static_cast<long>(pick(line.size() + 1)), pool[pick(pool.size())]); break;
        case 2: if (!line.empty()) line[pick(line.size())] = pool[pick(pool.size())]; break;
        case 3: if (line.size() > 1) std::swap(line[pick(line.size())], line[pick(line.size())]); break;
        case 4:
          if (!line.empty()) {
            auto& tok = line[pick(line.size())];
            if (!tok.empty()) tok[pick(tok.size())] = static_cast<char>(pick(256));
          }
          break;
        default: mutated.push_back(mutated[pick(mutated.size())]); break;
      }
    }
    std::string text;
    for (const auto& l : mutated) {
      for (std::size_t i = 0; i < l.size(); ++i) text += (i ? " " : "") + l[i];
      text += '\n';
    }
    NetlistDocument doc;
    REQUIRE_NOTHROW(doc = parse_netlist(text));
    // Exactly one of: a circuit, or at least one error.
    REQUIRE(doc.ok() != has_errors(doc.diagnostics));
    for (const auto& d : doc.diagnostics) {
      REQUIRE(d.loc.line >= 1);
      REQUIRE(d.loc.column >= 1);
    }
    if (doc.ok()) {
      ++accepted;
      const auto again = parse_netlist(serialize_netlist(*doc.circuit));
      REQUIRE(again.ok());
      REQUIRE(*again.circuit == *doc.circuit);
    }
  }
  CHECK(accepted > 0);
}
