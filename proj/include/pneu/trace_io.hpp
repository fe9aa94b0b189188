#pragma once

#include <string>
#include <string_view>

#include "pneu/sim.hpp"

namespace pneu {

/// Header `t,<actuator>.p...,<valve>.status...,<valve>.mem...` with one
/// `.mem` column per hysteretic valve. Status is 0 = blocked, 1 = unblocked.
std::string trace_to_csv(const Trace& trace);

/// Inverse of trace_to_csv (events are not stored in the CSV and come back
/// empty). Throws Error(parse) on malformed input.
Trace trace_from_csv(std::string_view text);

}  // namespace pneu
