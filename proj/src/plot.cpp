#include "pneu/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "pneu/error.hpp"
#include "pneu/fsm.hpp"
#include "pneu/format.hpp"

namespace pneu {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
constexpr double kLeft = 110.0;
constexpr double kRight = 20.0;
constexpr double kGap = 36.0;
constexpr double kRail = 26.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, w, h, t0, t1, v0, v1;
  double x(double t) const { return x0 + (t - t0) / (t1 - t0) * w; }
  double y(double v) const { return y0 + h - (v - v0) / (v1 - v0) * h; }
};

void text(std::string& svg, double x, double y, const std::string& s, const char* anchor = "end",
          const char* fill = "#000") {
  svg += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
         "\" fill=\"" + fill + "\">" + escape(s) + "</text>\n";
}

void line(std::string& svg, double x1, double y1, double x2, double y2, const std::string& style) {
  svg += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
         num(y2) + "\" " + style + "/>\n";
}

void frame_box(std::string& svg, const Frame& f, const std::string& title) {
  svg += "<rect x=\"" + num(f.x0) + "\" y=\"" + num(f.y0) + "\" width=\"" + num(f.w) +
         "\" height=\"" + num(f.h) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  text(svg, f.x0, f.y0 - 6, title, "start");
}

/// Step polyline of a 0/1 signal drawn inside one rail.
std::string step_path(const Frame& f, double base, const std::vector<std::pair<double, int>>& pts) {
  std::string d;
  int prev = -1;
  for (const auto& [t, v] : pts) {
    const double y = base - v * (kRail - 8);
    if (d.empty()) {
      d = "M" + num(f.x(t)) + "," + num(y);
    } else if (v != prev) {
      d += " H" + num(f.x(t)) + " V" + num(y);
    }
    prev = v;
  }
  d += " H" + num(f.x(f.t1));
  return d;
}

}  // namespace

std::string render_svg(const Trace& trace, const std::vector<Monitor>& monitors,
                       const PlotOptions& options) {
  if (trace.samples.empty()) throw Error(ErrorCode::invalid_input, "trace has no samples");
  const DiscreteTrace logic = discretize_trace(trace, monitors);

  const double t0 = trace.samples.front().t;
  double t1 = trace.samples.back().t;
  if (t1 <= t0) t1 = t0 + 1.0;
  double p_top = 0.0;
  for (const auto& s : trace.samples) {
    for (double p : s.pressures) p_top = std::max(p_top, p);
  }
  for (const auto& m : monitors) p_top = std::max(p_top, max_level(m.threshold));
  p_top = p_top > 0 ? p_top * 1.08 : 1.0;

  const double plot_w = options.width - kLeft - kRight;
  const double top = options.title.empty() ? 24.0 : 44.0;
  const Frame pf{kLeft, top, plot_w, options.panel_height, t0, t1, 0.0, p_top};
  const double valve_h = std::max<double>(1, trace.valves.size()) * kRail;
  const Frame vf{kLeft, pf.y0 + pf.h + kGap, plot_w, valve_h, t0, t1, 0.0, 1.0};
  const double logic_h = std::max<double>(1, monitors.size()) * kRail;
  const Frame lf{kLeft, vf.y0 + vf.h + kGap, plot_w, logic_h, t0, t1, 0.0, 1.0};
  const double height = lf.y0 + lf.h + 40.0;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(options.width) +
         "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(options.width) + " " +
         num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) text(svg, options.width / 2, 20, options.title, "middle");

  // Pressures.
  frame_box(svg, pf, "pressure (psi)");
  for (int k = 0; k <= 4; ++k) {
    const double v = p_top * k / 4;
    line(svg, pf.x0 - 4, pf.y(v), pf.x0, pf.y(v), "stroke=\"#444\"");
    text(svg, pf.x0 - 6, pf.y(v) + 4, format_number(std::round(v * 100) / 100));
  }
  for (std::size_t m = 0; m < monitors.size(); ++m) {
    const auto a = std::find(trace.actuators.begin(), trace.actuators.end(), monitors[m].actuator);
    const char* color = kPalette[static_cast<std::size_t>(a - trace.actuators.begin()) % kPalette.size()];
    std::vector<double> levels;
    if (const auto* h = std::get_if<HystereticThreshold>(&monitors[m].threshold)) {
      levels = {h->low, h->high};
    } else if (const auto* c = std::get_if<ConstantThreshold>(&monitors[m].threshold)) {
      levels = {c->level};
    }
    for (double v : levels) {
      line(svg, pf.x0, pf.y(v), pf.x0 + pf.w, pf.y(v),
           std::string("stroke=\"") + color + "\" stroke-dasharray=\"5,4\" stroke-width=\"0.8\"");
    }
    if (!levels.empty()) {
      text(svg, pf.x0 + pf.w - 4, pf.y(levels.back()) - 3, monitors[m].label);
    }
  }
  for (std::size_t a = 0; a < trace.actuators.size(); ++a) {
    std::string d;
    for (const auto& s : trace.samples) {
      d += (d.empty() ? "M" : " L") + num(pf.x(s.t)) + "," + num(pf.y(s.pressures[a]));
    }
    const char* color = kPalette[a % kPalette.size()];
    svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.4\"/>\n";
    text(svg, pf.x0 + 8 + 50.0 * static_cast<double>(a), pf.y0 + 14, trace.actuators[a], "start",
         color);
  }

  // Valve status rails, 1 = unblocked.
  frame_box(svg, vf, "valve status (1 = unblocked)");
  for (std::size_t v = 0; v < trace.valves.size(); ++v) {
    std::vector<std::pair<double, int>> pts;
    for (const auto& s : trace.samples) pts.emplace_back(s.t, s.status[v] == FlowStatus::Unblocked);
    const double base = vf.y0 + kRail * static_cast<double>(v + 1) - 4;
    text(svg, vf.x0 - 6, base - 6, trace.valves[v]);
    svg += "<path d=\"" + step_path(vf, base, pts) +
           "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1.2\"/>\n";
  }

  // Logic rails.
  frame_box(svg, lf, "logic level");
  for (std::size_t m = 0; m < logic.signals.size(); ++m) {
    const auto& sig = logic.signals[m];
    std::vector<std::pair<double, int>> pts{{logic.t_begin, sig.initial}};
    for (const auto& [t, b] : sig.changes) pts.emplace_back(t, b);
    const double base = lf.y0 + kRail * static_cast<double>(m + 1) - 4;
    text(svg, lf.x0 - 6, base - 6, sig.ref.name());
    svg += "<path d=\"" + step_path(lf, base, pts) +
           "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.2\"/>\n";
  }

  // Time axis.
  const double span = t1 - t0;
  const double raw = span / 8;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double tick = raw / mag < 2 ? 2 * mag : raw / mag < 5 ? 5 * mag : 10 * mag;
  for (double t = std::ceil(t0 / tick) * tick; t <= t1 + 1e-9; t += tick) {
    line(svg, lf.x(t), lf.y0 + lf.h, lf.x(t), lf.y0 + lf.h + 4, "stroke=\"#444\"");
    text(svg, lf.x(t), lf.y0 + lf.h + 16, format_number(std::round(t * 1000) / 1000), "middle");
  }
  text(svg, lf.x0 + lf.w, height - 6, "t (s)");
  svg += "</svg>\n";
  return svg;
}

}  // namespace pneu
