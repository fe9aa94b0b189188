#pragma once

// Static SVG rendering of a simulation trace in three stacked panels:
// actuator pressures with monitor threshold lines, valve flow status, and
// the discretized logic rails of the monitors.

#include <string>
#include <vector>

#include "pneu/circuit.hpp"
#include "pneu/sim.hpp"

namespace pneu {

struct PlotOptions {
  double width = 900.0;        // px
  double panel_height = 220.0; // px, pressure panel; the others scale with rail count
  std::string title;
};

/// `monitors` select the threshold lines and logic rails. Throws
/// invalid_input for an empty trace and invalid_monitor as discretize_trace.
std::string render_svg(const Trace& trace, const std::vector<Monitor>& monitors,
                       const PlotOptions& options = {});

}  // namespace pneu
