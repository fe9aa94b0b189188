#include "pneu/trace_io.hpp"

#include <optional>
#include <vector>

#include "pneu/error.hpp"
#include "pneu/format.hpp"

namespace pneu {

std::string trace_to_csv(const Trace& trace) {
  std::string out = "t";
  for (const auto& a : trace.actuators) out += "," + a + ".p";
  for (const auto& v : trace.valves) out += "," + v + ".status";
  for (std::size_t v = 0; v < trace.valves.size(); ++v) {
    if (trace.hysteretic[v]) out += "," + trace.valves[v] + ".mem";
  }
  out += '\n';
  for (const auto& s : trace.samples) {
    out += format_number(s.t);
    for (double p : s.pressures) out += "," + format_number(p);
    for (auto st : s.status) out += st == FlowStatus::Unblocked ? ",1" : ",0";
    for (std::size_t v = 0; v < trace.valves.size(); ++v) {
      if (trace.hysteretic[v]) out += s.memory[v] ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::parse, "trace csv line " + std::to_string(line) + ": " + msg);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

Trace trace_from_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = pos + 1;
  }
  if (lines.empty()) bad(1, "empty trace");

  const auto header = split_commas(lines[0]);
  if (header.empty() || header[0] != "t") bad(1, "header must start with 't'");

  Trace trace;
  // Column kind: 0 pressure, 1 status, 2 memory; plus its element index.
  std::vector<std::pair<int, std::size_t>> columns;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string_view h = header[c];
    if (ends_with(h, ".p")) {
      if (!trace.valves.empty()) bad(1, "pressure columns must precede status columns");
      trace.actuators.emplace_back(h.substr(0, h.size() - 2));
      columns.push_back({0, trace.actuators.size() - 1});
    } else if (ends_with(h, ".status")) {
      trace.valves.emplace_back(h.substr(0, h.size() - 7));
      trace.hysteretic.push_back(false);
      columns.push_back({1, trace.valves.size() - 1});
    } else if (ends_with(h, ".mem")) {
      const std::string id(h.substr(0, h.size() - 4));
      std::optional<std::size_t> idx;
      for (std::size_t v = 0; v < trace.valves.size(); ++v) {
        if (trace.valves[v] == id) idx = v;
      }
      if (!idx) bad(1, "memory column for unknown valve '" + id + "'");
      trace.hysteretic[*idx] = true;
      columns.push_back({2, *idx});
    } else {
      bad(1, "unrecognized column '" + std::string(h) + "'");
    }
  }

  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto cells = split_commas(lines[l]);
    if (cells.size() != header.size()) {
      bad(l + 1, "expected " + std::to_string(header.size()) + " cells, got " +
                     std::to_string(cells.size()));
    }
    TraceSample s;
    s.pressures.resize(trace.actuators.size());
    s.status.resize(trace.valves.size(), FlowStatus::Blocked);
    s.memory.resize(trace.valves.size(), 0);
    const auto t = parse_number(cells[0]);
    if (!t) bad(l + 1, "bad time '" + std::string(cells[0]) + "'");
    s.t = *t;
    if (!trace.samples.empty() && !(s.t > trace.samples.back().t)) {
      bad(l + 1, "time must be strictly increasing");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) bad(l + 1, "bad number '" + std::string(cells[c]) + "'");
      const auto [kind, idx] = columns[c - 1];
      if (kind == 0) {
        s.pressures[idx] = *v;
      } else {
        if (*v != 0.0 && *v != 1.0) bad(l + 1, "flag columns must be 0 or 1");
        if (kind == 1) {
          s.status[idx] = *v == 1.0 ? FlowStatus::Unblocked : FlowStatus::Blocked;
        } else {
          s.memory[idx] = *v == 1.0 ? 1 : 0;
        }
      }
    }
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

}  // namespace pneu
