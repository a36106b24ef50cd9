#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlspec/assembly.hpp"
#include "nlspec/coefficient.hpp"
#include "nlspec/grid.hpp"
#include "nlspec/kernel.hpp"
#include "nlspec/spectral.hpp"

namespace nlspec {

struct SweepRecord {
  double sigma = 0.0;
  double m = 0.0;
  double lambda_p = 0.0;
  /// NaN for non-symmetric operators.
  double lambda_v = 0.0;
  double cw_lower = 0.0;
  double cw_upper = 0.0;
  double iv_lo = 0.0;
  double iv_hi = 0.0;
  std::size_t n_nodes = 0;
  double h = 0.0;
  ExistenceVerdict existence = ExistenceVerdict::boundary_case;
  double wall_ms = 0.0;
  bool converged = false;
  /// Sandwich or bounds_iv check failed for this record.
  bool invariant_violation = false;
  /// Non-empty when assembly or the solver threw; the numbers are then unset.
  std::string error;
  Eigen::VectorXd eigvec;
  std::vector<Point> nodes;
};

enum class ResolutionRule {
  /// h = sigma r / nodes_per_radius on every axis (rounded down to fit the box).
  aligned,
  /// The same spacing for every sigma.
  fixed,
};

std::string_view to_string(ResolutionRule r);
std::optional<ResolutionRule> resolution_rule_from_string(std::string_view s);

struct SweepSpec {
  KernelSpec kernel;
  CoefficientSpec coefficient;
  std::vector<AxisBounds> domain{AxisBounds{0.0, 1.0}};
  OperatorVariant variant = OperatorVariant::M_plus_a;
  double m = 0.0;
  /// Strictly monotone.
  std::vector<double> sigmas;
  ResolutionRule rule = ResolutionRule::aligned;
  double nodes_per_radius = 16.0;
  double fixed_h = 0.0;
  SolverOptions solver;
  unsigned threads = 1;
};

/// Record for an operator already solved; wall_ms is left at zero.
SweepRecord make_record(const DiscreteOperator& op, const SpectralResult& res);

/// Assembles and solves one operator, filling every record field. Errors
/// are caught and stored in `error`.
SweepRecord solve_record(const Grid& grid, const KernelSpec& k, const CoefficientSpec& a, OperatorVariant variant,
                         const SolverOptions& opts, unsigned threads = 1);

/// Grid used for one sigma of a sweep.
Grid sweep_grid(const SweepSpec& spec, double sigma);

/// One record per sigma, in list order. Records are independent and may run
/// in parallel; a failing record keeps its error message and the sweep goes on.
std::vector<SweepRecord> sigma_sweep(const SweepSpec& spec);

enum class LimitTarget { minus_nu, one_minus_nu, lambda1 };
enum class LimitDirection { to_zero, to_infinity };

std::string_view to_string(LimitTarget t);
std::optional<LimitTarget> limit_target_from_string(std::string_view s);

struct LimitEstimate {
  double value = 0.0;
  bool extrapolated = false;
  int order = 1;
  /// Values ordered from the coarsest to the finest sweep parameter.
  std::vector<double> tail;
  LimitTarget target_kind = LimitTarget::lambda1;
  double target = 0.0;
  double gap = 0.0;
};

/// Richardson extrapolation over the two finest parameters, with
/// t = sigma (to_zero) or t = 1/sigma (to_infinity). When the last three
/// values are not monotone the raw finest value is reported instead.
LimitEstimate limit_estimate(std::span<const double> sigmas, std::span<const double> values, double target,
                             LimitTarget kind, LimitDirection dir, int order = 1);
LimitEstimate limit_estimate(std::span<const SweepRecord> records, double target, LimitTarget kind,
                             LimitDirection dir, int order = 1);

/// Analytic target of a sweep: -nu, 1 - nu, or the Dirichlet eigenvalue of
/// D_2/(2N) Delta + a on a fine finite-difference grid. nu is the maximum
/// of a over the nodes of the finest sweep grid.
double limit_target(const SweepSpec& spec, LimitTarget kind);

struct ExhaustionSpec {
  KernelSpec kernel;
  CoefficientSpec coefficient;
  OperatorVariant variant = OperatorVariant::L_plus_a;
  int dimension = 1;
  /// Boxes [-L, L]^N, increasing. Every L must be a multiple of h.
  std::vector<double> half_widths;
  double h = 0.0625;
  double stagnation_tol = 1e-8;
  bool with_lambda_v = false;
  SolverOptions solver;
};

struct ExhaustionLevel {
  double half_width = 0.0;
  SweepRecord record;
  /// From lambda_v_min; NaN unless requested.
  double lambda_v_min = 0.0;
};

struct ExhaustionResult {
  std::vector<ExhaustionLevel> levels;
  /// lambda_p(level i) <= lambda_p(level i - 1) + 1e-12 throughout.
  bool nonincreasing = true;
  /// Every grid contains the nodes of its predecessor.
  bool nested = true;
  /// First level whose change from its predecessor is below stagnation_tol.
  std::optional<std::size_t> stagnation_index;
};

ExhaustionResult domain_exhaustion(const ExhaustionSpec& spec);

struct InvarianceReport {
  double max_discrepancy = 0.0;
  double max_matrix_difference = 0.0;
  double base_lambda_p = 0.0;
  std::vector<double> factors;
  std::vector<double> lambda_p;
  std::vector<double> discrepancies;
};

/// |lambda_p(op) - lambda_p(scaled op)| over the factors.
InvarianceReport scaling_invariance_suite(const DiscreteOperator& op, std::span<const double> factors,
                                          const SolverOptions& opts = {});

struct EigfnSpec {
  KernelSpec kernel;
  CoefficientSpec coefficient;
  std::vector<AxisBounds> domain{AxisBounds{0.0, 1.0}};
  /// Decreasing.
  std::vector<double> sigmas;
  std::vector<double> margins{0.0};
  double nodes_per_radius = 16.0;
  SolverOptions solver;
  unsigned threads = 1;
};

struct EigfnRecord {
  double sigma = 0.0;
  SweepRecord record;
  /// One distance per margin; empty when the record was aborted.
  std::vector<double> distances;
  bool aborted = false;
  std::string note;
};

/// Weighted l2 distance between the M-variant (m = 2) Perron vector and the
/// finite-difference Dirichlet eigenvector on the same nodes, restricted to
/// nodes at least `margin` from the boundary.
std::vector<EigfnRecord> eigfn_convergence(const EigfnSpec& spec);

enum class MonotonicityVerdict { monotone, violated, inconclusive };

std::string_view to_string(MonotonicityVerdict v);

struct MonotonicitySpec {
  KernelSpec kernel;
  CoefficientSpec coefficient;
  int dimension = 1;
  /// Increasing.
  std::vector<double> sigmas;
  double h = 0.0625;
  /// Boxes [-L, L]^N with L = initial, initial + step, ... up to max.
  double initial_half_width = 4.0;
  double step = 2.0;
  double max_half_width = 32.0;
  double change_tol = 1e-8;
  double mono_tol = 1e-6;
  SolverOptions solver;
  unsigned threads = 1;
};

struct MonotonicityPoint {
  double sigma = 0.0;
  double half_width = 0.0;
  bool box_converged = false;
  /// Solve on the last box.
  SweepRecord record;
};

struct MonotonicityResult {
  MonotonicityVerdict verdict = MonotonicityVerdict::inconclusive;
  std::vector<MonotonicityPoint> points;
};

/// m = 0 M-variant lambda_p per sigma on a box enlarged until one more
/// enlargement changes it by less than change_tol.
MonotonicityResult m0_monotonicity(const MonotonicitySpec& spec);

struct GrowthResult {
  double rate = 0.0;
  std::size_t steps = 0;
  /// (t, log |u(t)|_2), thinned to at most ~1000 samples.
  std::vector<std::pair<double, double>> trajectory;
};

/// Explicit Euler for u' = A u with renormalisation every step; the rate is
/// the least-squares slope of log |u(t)|_2 over [T/2, T].
/// Requires dt <= 0.25 / |A|_inf.
GrowthResult growth_rate(const DiscreteOperator& op, double t_end, double dt, const Eigen::VectorXd& u0);

/// Largest stable Euler step, 0.25 / |A|_inf.
double max_growth_step(const DiscreteOperator& op);

}  // namespace nlspec
