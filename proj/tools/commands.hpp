#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gainswitch::cli {

/// Bad flag values detected after parsing; mapped to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

struct CommonOptions {
  std::string laser = "default-1W-850nm";
  std::string out;      // empty or "-": stdout
  std::string sidecar;  // empty: derived from `out`
  std::string format = "csv";
  std::uint64_t seed = 0;
};

struct OptimalOptions {
  double T = 0.0;
  std::optional<double> dt;
  std::optional<double> slew_max;
};

struct SimulateOptions {
  std::string drive = "optimal";  // optimal | zero | trace | topology
  std::optional<double> T;
  std::string cutoff = "at-S-peak";
  std::string trace;
  std::string trace_column;
  std::string topology;
  std::vector<std::string> params;
  std::size_t branches = 3;
  std::optional<double> t_end;
  double dt = 1e-12;
  double initial_N = 0.0;
  double initial_S = 0.0;
};

struct SweepCliOptions {
  std::string grid;      // start:stop:count in seconds
  std::string grid_tau;  // start:stop:count in units of tau_N
  std::string cutoff = "at-S-peak";
  unsigned threads = 1;
  double dt = 0.5e-12;
};

struct MetricOptions {
  std::string trace;
  std::string column;
  std::optional<double> window_start;
  std::optional<double> window_end;
  bool clamp_negative = false;
  double rel_threshold = 0.1;
};

struct CircuitOptions {
  std::string topology;
  double T = 5e-9;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::vector<std::string> params;
  std::vector<std::string> bounds;
  std::size_t branches = 3;
  bool fit = false;
  std::string reference = "optimal";  // optimal | self
  std::string report;
};

int cmd_optimal(const CommonOptions&, const OptimalOptions&);
int cmd_simulate(const CommonOptions&, const SimulateOptions&);
int cmd_sweep(const CommonOptions&, const SweepCliOptions&);
int cmd_metric(const CommonOptions&, const MetricOptions&);
int cmd_circuit(const CommonOptions&, const CircuitOptions&);

}  // namespace gainswitch::cli
