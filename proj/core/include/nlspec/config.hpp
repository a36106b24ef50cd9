#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlspec/assembly.hpp"
#include "nlspec/coefficient.hpp"
#include "nlspec/experiments.hpp"
#include "nlspec/grid.hpp"
#include "nlspec/kernel.hpp"

namespace nlspec {

enum class ExperimentKind { eig, sweep, exhaust, compare_local, eigfn_conv, growth, invariance, mono_m0, check_all };

std::string_view to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_string(std::string_view s);

struct GridConfig {
  int dimension = 1;
  std::vector<double> lower{0.0};
  std::vector<double> upper{1.0};
  std::vector<std::int64_t> nodes{64};

  bool operator==(const GridConfig&) const = default;
};

struct SolverConfig {
  double tol = 1e-10;
  /// Zero selects 200 n.
  std::int64_t max_iter = 0;

  bool operator==(const SolverConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> sigmas;
  std::vector<double> m{2.0};
  ResolutionRule rule = ResolutionRule::aligned;
  double nodes_per_radius = 16.0;
  /// Spacing for the fixed rule.
  double h = 0.0;
  /// Empty: no limit estimate.
  std::optional<LimitTarget> target;
  LimitDirection direction = LimitDirection::to_zero;
  int order = 1;

  bool operator==(const SweepConfig&) const = default;
};

struct ExhaustConfig {
  std::vector<double> half_widths;
  double h = 0.0625;
  double stagnation_tol = 1e-8;
  bool lambda_v = false;

  bool operator==(const ExhaustConfig&) const = default;
};

struct EigfnConfig {
  std::vector<double> sigmas;
  std::vector<double> margins{0.0};
  double nodes_per_radius = 16.0;

  bool operator==(const EigfnConfig&) const = default;
};

struct GrowthConfig {
  double t_end = 20.0;
  /// Zero selects 0.25 / |A|_inf.
  double dt = 0.0;

  bool operator==(const GrowthConfig&) const = default;
};

struct InvarianceConfig {
  std::vector<double> factors{0.5, 2.0, 10.0};

  bool operator==(const InvarianceConfig&) const = default;
};

struct MonoConfig {
  std::vector<double> sigmas;
  double h = 0.0625;
  double initial_half_width = 4.0;
  double step = 2.0;
  double max_half_width = 32.0;
  double change_tol = 1e-8;
  double mono_tol = 1e-6;

  bool operator==(const MonoConfig&) const = default;
};

struct CheckConfig {
  /// Randomised instances per property.
  std::int64_t instances = 20;
  std::int64_t max_nodes = 120;

  bool operator==(const CheckConfig&) const = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::eig;
  std::int64_t seed = 0;
  std::string output = "nlspec-out";
  GridConfig grid;
  KernelSpec kernel;
  CoefficientSpec coefficient;
  OperatorVariant variant = OperatorVariant::L_plus_a;
  SolverConfig solver;
  SweepConfig sweep;
  ExhaustConfig exhaust;
  EigfnConfig eigfn;
  GrowthConfig growth;
  InvarianceConfig invariance;
  MonoConfig mono;
  CheckConfig check;

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
  /// 1-based; 0 when the issue is not tied to a line.
  int line = 0;
  std::string message;
};

std::string format_issue(const ConfigIssue& issue);

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> errors;

  bool ok() const { return config.has_value(); }
};

/// Parses and validates a config document. All problems are collected.
/// A kind given here replaces the document's; a conflicting declared kind is
/// an error.
ParseOutcome parse_config(std::string_view text, std::optional<ExperimentKind> kind = std::nullopt);

/// Document that parses back to an equal config.
std::string render_config(const ExperimentConfig& cfg);

/// The [grid] table as a Grid.
Grid make_grid(const GridConfig& g);

SolverOptions solver_options(const ExperimentConfig& cfg);

}  // namespace nlspec
