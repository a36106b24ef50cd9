#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlspec/config.hpp"
#include "nlspec/experiments.hpp"

namespace nlspec {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvariant = 2,
  kExitNonConvergence = 3,
};

/// Header of results.csv, byte for byte.
inline constexpr std::string_view kResultsHeader =
    "\xCF\x83,m,lambda_p,lambda_v,cw_lower,cw_upper,iv_lo,iv_hi,n_nodes,h,existence,wall_ms";

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  /// Warnings turn into an invariant-violation exit code.
  bool strict = false;
  std::string config_path;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;
  std::vector<std::string> files;
};

/// 17 significant digits, '.' decimal point, independent of the locale.
std::string format_number(double v);

/// results.csv body for a list of records.
std::string results_csv(std::span<const SweepRecord> records);

/// Runs the configured experiment and writes results.csv, manifest.json and
/// plotdata/*.dat under opts.out_dir. Diagnostics go to `log`.
RunOutcome run(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace nlspec
