#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace thermo {

/// Everything a subcommand reads. Defaults of 0 / empty mean "the
/// subcommand's own default", resolved in run().
struct RunConfig {
  std::string command;
  std::string map = "doubling";
  std::string potential = "const:0";
  std::string observable = "branch:0,1";
  std::string method;  // pressure: single method; scgf/rate: "pressure" or "monte-carlo"
  std::string source;  // ldp-check: "preimages", "periodic", "birkhoff" or "all"

  int n_min = 1;
  int n_max = 0;
  int periodic_n_max = 0;
  std::vector<int> m;  // transfer sizes
  double tolerance = 1e-3;
  std::optional<double> x0;
  std::optional<double> prune_delta;  // preimages: threshold pruning

  // scgf: [-2, 2] with 41 points; rate and ldp-check: [-4, 4] with 81.
  std::optional<double> t_min, t_max;
  std::optional<int> t_count;
  double s_min = 0.05, s_max = 0.95;
  int s_count = 19;
  double s0 = 0.7;
  int mc_n = 30;
  std::uint64_t trials = 10000;
  std::vector<int> weakstar_n = {5, 10, 15, 20};
  int growth_n = 0;  // ulam: normalized growth rows up to this n

  double rho0 = 0.05;  // shrinking
  int margin_n = 12;   // hyperbolic-check

  std::string c = "0";  // complex-pressure: parameter and root, "re,im"
  std::string z0 = "";

  std::uint64_t seed = 1;
  int threads = 1;  // never part of the report
  std::string format = "json";
  std::string output;   // empty: the stream passed to run()
  std::string records;  // preimages, periodic, ldp-check: line-delimited samples
};

std::vector<std::string> command_names();

struct RunResult {
  int exit_code = 0;
  std::string report;  // empty on failure
  std::string error;
};

/// Runs one subcommand and returns the report text. Exit codes: 0 success,
/// 2 validation error, 3 numerical failure. The wall_time_s field is left
/// out when include_wall_time is false, so reports compare byte for byte.
RunResult execute(const RunConfig& config, bool include_wall_time = true);

/// execute(), then writes the report to config.output (or `out`) and any
/// error message to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace thermo
