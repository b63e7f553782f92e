#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace gainswitch::cli;

int main(int argc, char** argv) {
  CLI::App app{"Gain-switched semiconductor laser toolkit"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--laser", common.laser, "Laser parameter file or fixture name")
      ->capture_default_str();
  app.add_option("--out", common.out, "Output file (default stdout)");
  app.add_option("--sidecar", common.sidecar, "Summary JSON path (default: --out with .json)");
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", common.seed, "Seed for randomized fitting")->capture_default_str();

  int rc = kOk;
  auto guarded = [&rc](auto fn) {
    return [&rc, fn] { rc = fn(); };
  };

  OptimalOptions opt;
  auto* optimal = app.add_subcommand("optimal", "Closed-form optimal drive current");
  optimal->add_option("--T", opt.T, "Pulse duration, s")->required();
  optimal->add_option("--dt", opt.dt, "Sample spacing, s (default T/1000)");
  optimal->add_option("--slew-max", opt.slew_max, "Driver slew-rate limit, A/s");
  optimal->callback(guarded([&] { return cmd_optimal(common, opt); }));

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the rate equations");
  simulate->add_option("--drive", sim.drive, "Drive source")
      ->check(CLI::IsMember({"optimal", "zero", "trace", "topology"}))
      ->capture_default_str();
  simulate->add_option("--T", sim.T, "Drive duration, s (default 2.5 tau_N)");
  simulate->add_option("--cutoff", sim.cutoff, "Drive cutoff policy")
      ->check(CLI::IsMember({"at-T", "at-S-peak", "none"}))
      ->capture_default_str();
  simulate->add_option("--trace", sim.trace, "Drive current CSV for --drive trace");
  simulate->add_option("--trace-column", sim.trace_column, "Current column in the trace");
  simulate->add_option("--topology", sim.topology, "Driver topology for --drive topology");
  simulate->add_option("--param", sim.params, "Topology parameter override name=value");
  simulate->add_option("--branches", sim.branches, "Multi-resonant branch count")
      ->capture_default_str();
  simulate->add_option("--t-end", sim.t_end, "End time, s");
  simulate->add_option("--dt", sim.dt, "Output sample spacing, s")->capture_default_str();
  simulate->add_option("--initial-N", sim.initial_N, "Initial carrier density, 1/m^3");
  simulate->add_option("--initial-S", sim.initial_S, "Initial photon density, 1/m^3");
  simulate->callback(guarded([&] { return cmd_simulate(common, sim); }));

  SweepCliOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep the pulse duration T");
  sweep->add_option("--grid", sw.grid, "start:stop:count in seconds");
  sweep->add_option("--grid-tau", sw.grid_tau, "start:stop:count in units of tau_N");
  sweep->add_option("--cutoff", sw.cutoff, "Drive cutoff policy")
      ->check(CLI::IsMember({"at-T", "at-S-peak", "none"}))
      ->capture_default_str();
  sweep->add_option("--threads", sw.threads, "Worker threads")->capture_default_str();
  sweep->add_option("--dt", sw.dt, "Simulation output spacing, s")->capture_default_str();
  sweep->callback(guarded([&] { return cmd_sweep(common, sw); }));

  MetricOptions met;
  auto* metric = app.add_subcommand("metric", "Pulse metrics of a sampled trace");
  metric->add_option("--trace", met.trace, "Trace CSV (time in s, then signal)")->required();
  metric->add_option("--column", met.column, "Signal column name (default: second)");
  metric->add_option("--window-start", met.window_start, "Window start time, s");
  metric->add_option("--window-end", met.window_end, "Window end time, s");
  metric->add_flag("--clamp-negative", met.clamp_negative, "Clamp negative samples to zero");
  metric->add_option("--rel-threshold", met.rel_threshold, "Pulse-count threshold")
      ->capture_default_str();
  metric->callback(guarded([&] { return cmd_metric(common, met); }));

  CircuitOptions cir;
  auto* circuit = app.add_subcommand("circuit", "Driver circuit waveforms and fits");
  circuit->add_option("--topology", cir.topology, "Driver topology")
      ->required()
      ->check(CLI::IsMember({"bjt", "multi-resonant", "rlc", "sat-inductor", "resonant-ring"}));
  circuit->add_option("--T", cir.T, "Reference pulse duration, s")->capture_default_str();
  circuit->add_option("--dt", cir.dt, "Sample spacing, s (default T/500)");
  circuit->add_option("--t-end", cir.t_end, "Waveform end time, s (default T)");
  circuit->add_option("--param", cir.params, "Parameter override name=value");
  circuit->add_option("--bound", cir.bounds, "Fit bound override name=lo:hi");
  circuit->add_option("--branches", cir.branches, "Multi-resonant branch count")
      ->capture_default_str();
  circuit->add_flag("--fit", cir.fit, "Fit the topology to the reference");
  circuit->add_option("--reference", cir.reference, "Fit reference")
      ->check(CLI::IsMember({"optimal", "self"}))
      ->capture_default_str();
  circuit->add_option("--report", cir.report, "Fit report path");
  circuit->callback(guarded([&] { return cmd_circuit(common, cir); }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return rc;
}
