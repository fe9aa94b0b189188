#pragma once

// Command-line front end. Exit codes: 0 ok, 1 usage or I/O, 2 parse or
// model error, 3 verification failure, 4 simulation failure.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pneu {

enum class Subcommand { Check, Simulate, Discretize, Verify, Synthesize, Plot };

enum class VerifySource { Trace, Simulate, Abstract };

struct CommandSpec {
  Subcommand command = Subcommand::Check;
  std::vector<std::string> inputs;
  std::string output;   // empty writes to stdout
  std::string out_dir;  // batch simulate
  std::string netlist;
  std::string chart;
  std::string trace;
  VerifySource source = VerifySource::Simulate;
  std::optional<double> t_end;
  std::optional<double> dt_max;
  std::optional<double> event_tol;
  std::optional<double> dwell_min;
  std::optional<std::size_t> record_stride;
  bool allow_fixed_vents = false;
  std::size_t limit = 10;  // synthesize: assignments to print
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int parse = 2;
inline constexpr int verify = 3;
inline constexpr int simulation = 4;
}  // namespace exit_code

int run(const CommandSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv into a CommandSpec and runs it.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pneu
