#include <algorithm>
#include <set>

#include "lexer.hpp"
#include "pneu/error.hpp"
#include "pneu/fsm.hpp"

namespace pneu {

const ChartState* StateTransitionChart::find(std::string_view state) const {
  for (const auto& s : states) {
    if (s.name == state) return &s;
  }
  return nullptr;
}

std::vector<StateBits> StateTransitionChart::cycle_states() const {
  std::vector<StateBits> out;
  out.reserve(cycle.size());
  for (const auto& name : cycle) {
    const ChartState* s = find(name);
    if (!s) throw Error(ErrorCode::invalid_input, "cycle names unknown state '" + name + "'");
    out.push_back(s->bits);
  }
  return out;
}

void validate(const StateTransitionChart& chart) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_input, msg); };
  if (chart.signals.empty()) fail("chart " + chart.name + " has no signals");
  std::set<std::string> names;
  std::set<StateBits> codes;
  for (const auto& s : chart.states) {
    if (!names.insert(s.name).second) fail("duplicate state '" + s.name + "'");
    if (s.bits.size() != chart.signals.size()) {
      fail("state " + s.name + " has " + std::to_string(s.bits.size()) + " bits for " +
           std::to_string(chart.signals.size()) + " signals");
    }
    if (!codes.insert(s.bits).second) fail("state " + s.name + " repeats another state's bits");
  }
  if (chart.cycle.empty()) fail("chart " + chart.name + " has an empty cycle");
  std::set<std::string> seen;
  for (const auto& c : chart.cycle) {
    if (!chart.find(c)) fail("cycle names unknown state '" + c + "'");
    if (!seen.insert(c).second) fail("cycle visits state '" + c + "' twice");
  }
  if (chart.cycle.size() < 2) fail("cycle needs at least two states");
}

namespace {

using detail::Line;
using detail::Token;

class ChartParser {
 public:
  explicit ChartParser(ChartDocument& doc) : doc_(doc) {}

  void run() {
    const auto lines = detail::tokenize(doc_.source);
    StateTransitionChart chart;
    bool have_name = false;
    bool have_signals = false;
    bool have_cycle = false;
    std::vector<std::pair<Token, std::size_t>> state_lines;
    Token cycle_token{};
    std::size_t cycle_line = 0;
    for (const auto& line : lines) {
      line_ = line.number;
      const Token& kw = line.tokens[0];
      if (kw.text == "chart") {
        if (have_name) {
          error(kw, "duplicate 'chart' line");
        } else if (line.tokens.size() != 2 || !detail::is_identifier(line.tokens[1].text)) {
          error(kw, "expected 'chart <name>'");
        } else {
          chart.name = std::string(line.tokens[1].text);
          have_name = true;
        }
      } else if (kw.text == "signals") {
        if (have_signals) {
          error(kw, "duplicate 'signals' line");
          continue;
        }
        have_signals = true;
        if (line.tokens.size() < 2) error(kw, "'signals' needs at least one <id>[<label>]");
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
          if (auto s = signal(line.tokens[i])) chart.signals.push_back(*s);
        }
      } else if (kw.text == "state") {
        if (line.tokens.size() < 3 || !detail::is_identifier(line.tokens[1].text)) {
          error(kw, "expected 'state <name> <bit>...'");
          continue;
        }
        ChartState st{std::string(line.tokens[1].text), {}};
        bool ok = true;
        for (std::size_t i = 2; i < line.tokens.size(); ++i) {
          const auto t = line.tokens[i].text;
          if (t != "0" && t != "1") {
            error(line.tokens[i], "state bits must be 0 or 1, got '" + std::string(t) + "'");
            ok = false;
          }
          st.bits.push_back(t == "1" ? 1 : 0);
        }
        if (!ok) continue;
        if (chart.find(st.name)) {
          error(line.tokens[1], "duplicate state '" + st.name + "'");
          continue;
        }
        state_lines.push_back({line.tokens[1], line.number});
        chart.states.push_back(std::move(st));
      } else if (kw.text == "cycle") {
        if (have_cycle) {
          error(kw, "duplicate 'cycle' line");
          continue;
        }
        have_cycle = true;
        cycle_token = kw;
        cycle_line = line.number;
        for (std::size_t i = 1; i < line.tokens.size(); ++i) {
          chart.cycle.emplace_back(line.tokens[i].text);
          cycle_tokens_.push_back(line.tokens[i]);
        }
      } else {
        error(kw, "unknown declaration '" + std::string(kw.text) + "'");
      }
    }

    const Token origin{"", 1};
    line_ = 1;
    if (!have_name) error(origin, "missing 'chart <name>' line");
    if (!have_signals) error(origin, "missing 'signals' line");
    if (!have_cycle) error(origin, "missing 'cycle' line");

    std::set<StateBits> codes;
    for (std::size_t i = 0; i < chart.states.size(); ++i) {
      line_ = state_lines[i].second;
      const auto& st = chart.states[i];
      if (have_signals && st.bits.size() != chart.signals.size()) {
        error(state_lines[i].first, "state " + st.name + " has " +
                                        std::to_string(st.bits.size()) + " bits for " +
                                        std::to_string(chart.signals.size()) + " signals");
      } else if (!codes.insert(st.bits).second) {
        error(state_lines[i].first, "state " + st.name + " repeats another state's bits");
      }
    }
    if (have_cycle) {
      line_ = cycle_line;
      if (chart.cycle.size() < 2) error(cycle_token, "cycle needs at least two states");
      std::set<std::string> seen;
      for (std::size_t i = 0; i < chart.cycle.size(); ++i) {
        const Token& tok = cycle_tokens_[i];
        if (!chart.find(chart.cycle[i])) {
          error(tok, "cycle names unknown state '" + chart.cycle[i] + "'");
        } else if (!seen.insert(chart.cycle[i]).second) {
          error(tok, "cycle visits state '" + chart.cycle[i] + "' twice");
        }
      }
    }
    if (!has_errors(doc_.diagnostics)) doc_.chart = std::move(chart);
  }

 private:
  std::optional<SignalRef> signal(const Token& tok) {
    const auto open = tok.text.find('[');
    if (open == std::string_view::npos || tok.text.back() != ']') {
      error(tok, "expected <id>[<label>], got '" + std::string(tok.text) + "'");
      return std::nullopt;
    }
    SignalRef ref{std::string(tok.text.substr(0, open)),
                  std::string(tok.text.substr(open + 1, tok.text.size() - open - 2))};
    if (!detail::is_identifier(ref.actuator) || !detail::is_identifier(ref.label)) {
      error(tok, "invalid signal '" + std::string(tok.text) + "'");
      return std::nullopt;
    }
    return ref;
  }

  void error(const Token& at, std::string msg) {
    doc_.diagnostics.push_back(
        {Severity::Error, {line_, at.column}, std::move(msg), std::string(at.text)});
  }

  ChartDocument& doc_;
  std::size_t line_ = 0;
  std::vector<Token> cycle_tokens_;
};

}  // namespace

ChartDocument parse_chart(std::string text) {
  ChartDocument doc;
  doc.source = std::move(text);
  ChartParser(doc).run();
  return doc;
}

std::string serialize_chart(const StateTransitionChart& chart) {
  std::string out = "chart " + chart.name + "\nsignals";
  for (const auto& s : chart.signals) out += " " + s.name();
  out += '\n';
  for (const auto& st : chart.states) {
    out += "state " + st.name;
    for (auto b : st.bits) out += b ? " 1" : " 0";
    out += '\n';
  }
  out += "cycle";
  for (const auto& c : chart.cycle) out += " " + c;
  out += '\n';
  return out;
}

}  // namespace pneu
