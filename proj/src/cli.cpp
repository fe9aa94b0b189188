#include "pneu/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <future>
#include <sstream>

#include "pneu/error.hpp"
#include "pneu/format.hpp"
#include "pneu/fsm.hpp"
#include "pneu/machine.hpp"
#include "pneu/netlist.hpp"
#include "pneu/plot.hpp"
#include "pneu/sim.hpp"
#include "pneu/synth.hpp"
#include "pneu/trace_io.hpp"

namespace pneu {

namespace {

/// Raised once the failure has already been reported.
struct Failure {
  int code;
};

int code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::io: return exit_code::usage;
    case ErrorCode::no_crossing:
    case ErrorCode::simulation_stall:
    case ErrorCode::diverged: return exit_code::simulation;
    case ErrorCode::invalid_monitor:
    case ErrorCode::insufficient_data:
    case ErrorCode::nonperiodic:
    case ErrorCode::inconsistent_chart: return exit_code::verify;
    default: return exit_code::parse;
  }
}

bool is_chart_path(const std::string& path) {
  return std::filesystem::path(path).extension() == ".chart";
}

CircuitModel load_netlist(const std::string& path, std::ostream& err) {
  const NetlistDocument doc = parse_netlist(read_file(path));
  for (const auto& d : doc.diagnostics) err << format_diagnostic(d, path) << '\n';
  if (!doc.ok()) throw Failure{exit_code::parse};
  return *doc.circuit;
}

StateTransitionChart load_chart(const std::string& path, std::ostream& err) {
  const ChartDocument doc = parse_chart(read_file(path));
  for (const auto& d : doc.diagnostics) err << format_diagnostic(d, path) << '\n';
  if (!doc.ok()) throw Failure{exit_code::parse};
  return *doc.chart;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

SimConfig sim_config(const CommandSpec& spec) {
  SimConfig cfg;
  if (spec.t_end) cfg.t_end = *spec.t_end;
  if (spec.dt_max) cfg.dt_max = *spec.dt_max;
  if (spec.event_tol) cfg.event_tol = *spec.event_tol;
  if (spec.record_stride) cfg.record_stride = *spec.record_stride;
  validate(cfg);
  return cfg;
}

/// Chart signals when a chart is given, else every one-bit monitor.
std::vector<Monitor> rail_monitors(const CircuitModel& circuit, const StateTransitionChart* chart) {
  if (chart) return resolve_signals(circuit, chart->signals);
  std::vector<Monitor> out;
  for (const auto& m : circuit.monitors) {
    if (arity(m.threshold) == 1) out.push_back(m);
  }
  return out;
}

Trace obtain_trace(const CommandSpec& spec, const CircuitModel& circuit) {
  if (!spec.trace.empty()) return trace_from_csv(read_file(spec.trace));
  return simulate(circuit, sim_config(spec));
}

int cmd_check(const CommandSpec& spec, std::ostream& out) {
  int code = exit_code::ok;
  for (const auto& path : spec.inputs) {
    const std::string text = read_file(path);
    std::vector<ParseDiagnostic> diags;
    if (is_chart_path(path)) {
      diags = parse_chart(text).diagnostics;
    } else {
      diags = parse_netlist(text).diagnostics;
    }
    for (const auto& d : diags) out << format_diagnostic(d, path) << '\n';
    if (has_errors(diags)) {
      code = exit_code::parse;
    } else {
      out << path << ": ok\n";
    }
  }
  return code;
}

struct BatchResult {
  int code = exit_code::ok;
  std::string messages;
};

BatchResult simulate_one(const CommandSpec& spec, const std::string& input,
                         const std::string& output, std::ostream* out) {
  BatchResult r;
  std::ostringstream msg;
  try {
    const CircuitModel circuit = load_netlist(input, msg);
    const std::string csv = trace_to_csv(simulate(circuit, sim_config(spec)));
    if (out) {
      emit(output, csv, *out);
    } else {
      write_file_atomic(output, csv);
    }
  } catch (const Failure& f) {
    r.code = f.code;
  } catch (const Error& e) {
    msg << input << ": error: " << e.what() << '\n';
    r.code = code_for(e.code());
  }
  r.messages = msg.str();
  return r;
}

int cmd_simulate(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.out_dir.empty()) {
    if (spec.inputs.size() != 1) {
      err << "simulate: several netlists need --out-dir\n";
      return exit_code::usage;
    }
    const BatchResult r = simulate_one(spec, spec.inputs[0], spec.output, &out);
    err << r.messages;
    return r.code;
  }
  std::filesystem::create_directories(spec.out_dir);
  // Each netlist runs in its own task and writes only its own file.
  std::vector<std::future<BatchResult>> jobs;
  for (const auto& input : spec.inputs) {
    const auto target = std::filesystem::path(spec.out_dir) /
                        std::filesystem::path(input).stem().concat(".csv");
    jobs.push_back(std::async(std::launch::async, simulate_one, std::cref(spec), input,
                              target.string(), nullptr));
  }
  int code = exit_code::ok;
  for (auto& job : jobs) {
    const BatchResult r = job.get();
    err << r.messages;
    code = std::max(code, r.code);
  }
  return code;
}

int cmd_discretize(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  const CircuitModel circuit = load_netlist(spec.netlist, err);
  std::optional<StateTransitionChart> chart;
  if (!spec.chart.empty()) chart = load_chart(spec.chart, err);
  const auto monitors = rail_monitors(circuit, chart ? &*chart : nullptr);
  const Trace trace = trace_from_csv(read_file(spec.inputs.at(0)));
  const DiscreteTrace logic = discretize_trace(trace, monitors);

  std::string csv = "t";
  for (const auto& s : logic.signals) csv += "," + s.ref.name();
  csv += '\n';
  for (const auto& seg : logic.segments()) {
    csv += format_number(seg.begin);
    for (auto b : seg.bits) csv += b ? ",1" : ",0";
    csv += '\n';
  }
  emit(spec.output, csv, out);
  return exit_code::ok;
}

/// Projects machine observations onto the chart's signals.
std::vector<StateBits> abstract_sequence(const CircuitModel& circuit,
                                         const StateTransitionChart& chart, std::ostream& err) {
  const AbstractMachine machine = AbstractMachine::from_circuit(circuit);
  const LogicCycle cycle = logic_simulate(machine, machine.all_low());
  if (cycle.deadlock) err << "abstract machine settles in a fixed point\n";
  std::vector<std::size_t> index;
  for (const auto& sig : chart.signals) {
    const auto& ms = machine.signals();
    const auto it = std::find_if(ms.begin(), ms.end(), [&](const MachineSignal& m) {
      return m.actuator == sig.actuator && m.label == sig.label;
    });
    if (it == ms.end()) throw Error(ErrorCode::invalid_monitor, "no monitor " + sig.name());
    index.push_back(static_cast<std::size_t>(it - ms.begin()));
  }
  std::vector<StateBits> seq;
  const std::size_t repeats = cycle.deadlock ? 1 : 3;
  for (std::size_t r = 0; r < repeats; ++r) {
    for (const auto& st : cycle.states) {
      StateBits bits;
      for (auto i : index) bits.push_back(st[i]);
      if (seq.empty() || seq.back() != bits) seq.push_back(std::move(bits));
    }
  }
  return seq;
}

int cmd_verify(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  const StateTransitionChart chart = load_chart(spec.inputs.at(0), err);
  const CircuitModel circuit = load_netlist(spec.netlist, err);
  std::vector<StateBits> sequence;
  if (spec.source == VerifySource::Abstract) {
    sequence = abstract_sequence(circuit, chart, err);
  } else {
    const Trace trace = obtain_trace(spec, circuit);
    const DiscreteTrace logic = discretize_trace(trace, resolve_signals(circuit, chart.signals));
    sequence = extract_sequence(logic, spec.dwell_min.value_or(kDefaultDwellMin));
  }
  const VerifyReport report = verify(sequence, chart);
  out << format_report(report) << '\n';
  return report.pass ? exit_code::ok : exit_code::verify;
}

int cmd_synthesize(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  const StateTransitionChart chart = load_chart(spec.inputs.at(0), err);
  std::optional<CircuitModel> circuit;
  if (!spec.netlist.empty()) circuit = load_netlist(spec.netlist, err);
  SynthesisProblem problem = problem_from_chart(chart);
  problem.allow_fixed_vents = spec.allow_fixed_vents;
  const auto results = synthesize(problem);

  std::string text = "# chart " + chart.name + ": " + std::to_string(results.size()) +
                     " assignment(s)\n";
  if (results.empty()) {
    text += "# no NOT/BUFFER network reproduces the chart\n";
  }
  const std::size_t shown = std::min(results.size(), spec.limit);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& a = results[i];
    text += "\n# rank " + std::to_string(i + 1) + ": valves=" + std::to_string(a.valve_count()) +
            " hysteretic=" + std::to_string(a.hysteretic_count()) + "\n";
    text += "# " + describe(a, problem.signals) + "\n";
    text += render_assignment(a, problem.signals, circuit ? &*circuit : nullptr);
  }
  emit(spec.output, text, out);
  return results.empty() ? exit_code::verify : exit_code::ok;
}

int cmd_plot(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  const CircuitModel circuit = load_netlist(spec.inputs.at(0), err);
  std::optional<StateTransitionChart> chart;
  if (!spec.chart.empty()) chart = load_chart(spec.chart, err);
  const Trace trace = obtain_trace(spec, circuit);
  PlotOptions options;
  options.title = std::filesystem::path(spec.inputs[0]).filename().string();
  emit(spec.output, render_svg(trace, rail_monitors(circuit, chart ? &*chart : nullptr), options),
       out);
  return exit_code::ok;
}

}  // namespace

int run(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.inputs.empty()) {
      err << "no input file\n";
      return exit_code::usage;
    }
    switch (spec.command) {
      case Subcommand::Check: return cmd_check(spec, out);
      case Subcommand::Simulate: return cmd_simulate(spec, out, err);
      case Subcommand::Discretize: return cmd_discretize(spec, out, err);
      case Subcommand::Verify: return cmd_verify(spec, out, err);
      case Subcommand::Synthesize: return cmd_synthesize(spec, out, err);
      case Subcommand::Plot: return cmd_plot(spec, out, err);
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
  return exit_code::usage;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate, verify and synthesize pneumatic logic circuits", "pneu"};
  app.require_subcommand(1);
  CommandSpec spec;

  auto sim_flags = [&spec](CLI::App* sub) {
    sub->add_option("--t-end", spec.t_end, "Simulated time in seconds")->check(CLI::PositiveNumber);
    sub->add_option("--dt-max", spec.dt_max, "Integration step in seconds")
        ->check(CLI::PositiveNumber);
    sub->add_option("--event-tol", spec.event_tol, "Crossing tolerance in psi")
        ->check(CLI::PositiveNumber);
    sub->add_option("--stride", spec.record_stride, "Record every n-th step")
        ->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Parse netlists and charts and print diagnostics");
  check->add_option("files", spec.inputs, "Netlist (.pneu) or chart (.chart) files")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate netlists and write trace CSV");
  simulate_cmd->add_option("netlists", spec.inputs, "Netlist files")->required();
  simulate_cmd->add_option("-o,--output", spec.output, "Output CSV (single netlist)");
  simulate_cmd->add_option("--out-dir", spec.out_dir, "Directory for <stem>.csv per netlist");
  sim_flags(simulate_cmd);

  auto* discretize_cmd = app.add_subcommand("discretize", "Convert a trace CSV to logic signals");
  discretize_cmd->add_option("trace", spec.inputs, "Trace CSV")->required()->expected(1);
  discretize_cmd->add_option("--netlist", spec.netlist, "Netlist with the monitors")->required();
  discretize_cmd->add_option("--chart", spec.chart, "Chart selecting the signals");
  discretize_cmd->add_option("-o,--output", spec.output, "Output CSV");

  auto* verify_cmd = app.add_subcommand("verify", "Check a circuit against a chart");
  verify_cmd->add_option("chart", spec.inputs, "Chart file")->required()->expected(1);
  verify_cmd->add_option("--netlist", spec.netlist, "Netlist file")->required();
  auto* trace_opt = verify_cmd->add_option("--trace", spec.trace, "Verify a saved trace CSV");
  auto* abstract_flag = verify_cmd->add_flag("--abstract", "Verify the discrete abstraction");
  trace_opt->excludes(abstract_flag);
  verify_cmd->add_option("--dwell-min", spec.dwell_min, "Minimum state duration in seconds")
      ->check(CLI::NonNegativeNumber);
  sim_flags(verify_cmd);

  auto* synth_cmd = app.add_subcommand("synthesize", "Enumerate gate networks for a chart");
  synth_cmd->add_option("chart", spec.inputs, "Chart file")->required()->expected(1);
  synth_cmd->add_option("--netlist", spec.netlist, "Netlist supplying threshold values");
  synth_cmd->add_flag("--allow-fixed-vents", spec.allow_fixed_vents,
                      "Allow outputs held by a fixed vent");
  synth_cmd->add_option("--limit", spec.limit, "Assignments to print")->check(CLI::PositiveNumber);
  synth_cmd->add_option("-o,--output", spec.output, "Output file");

  auto* plot_cmd = app.add_subcommand("plot", "Render a trace as SVG");
  plot_cmd->add_option("netlist", spec.inputs, "Netlist file")->required()->expected(1);
  plot_cmd->add_option("--trace", spec.trace, "Plot a saved trace instead of simulating");
  plot_cmd->add_option("--chart", spec.chart, "Chart selecting the logic rails");
  plot_cmd->add_option("-o,--output", spec.output, "Output SVG");
  sim_flags(plot_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  if (*check) spec.command = Subcommand::Check;
  if (*simulate_cmd) spec.command = Subcommand::Simulate;
  if (*discretize_cmd) spec.command = Subcommand::Discretize;
  if (*verify_cmd) {
    spec.command = Subcommand::Verify;
    spec.source = *abstract_flag   ? VerifySource::Abstract
                  : *trace_opt     ? VerifySource::Trace
                                   : VerifySource::Simulate;
  }
  if (*synth_cmd) spec.command = Subcommand::Synthesize;
  if (*plot_cmd) spec.command = Subcommand::Plot;
  return run(spec, out, err);
}

}  // namespace pneu
