#pragma once

#include <stdexcept>
#include <string>

namespace pneu {

enum class ErrorCode {
  invalid_input,
  invalid_threshold,
  geometry_infeasible,
  no_crossing,
  simulation_stall,
  diverged,
  conflict,
  invalid_monitor,
  insufficient_data,
  nonperiodic,
  inconsistent_chart,
  parse,
  io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map outcome classes to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pneu
