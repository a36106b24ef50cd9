#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlspec/assembly.hpp"
#include "nlspec/kernel.hpp"

namespace nlspec {

struct SolverOptions {
  double tol = 1e-10;
  /// Zero selects 200 n.
  std::size_t max_iter = 0;
  /// Keep the Collatz-Wielandt pair of every iterate.
  bool record_history = false;
};

enum class ExistenceVerdict { eigenpair, boundary_case };

std::string_view to_string(ExistenceVerdict v);

struct CwBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct SpectralResult {
  double lambda_p = 0.0;
  /// Positive Perron vector, unit weighted l2 norm, zero off the selected
  /// component when the support graph is disconnected.
  Eigen::VectorXd eigvec;
  /// Weighted l2 norm of A phi - mu phi, mu = -lambda_p.
  double residual = 0.0;
  double cw_lower = 0.0;
  double cw_upper = 0.0;
  /// Quadratic-form value at eigvec; symmetric operators only.
  std::optional<double> lambda_v;
  std::size_t iterations = 0;
  bool converged = false;
  ExistenceVerdict existence = ExistenceVerdict::boundary_case;
  double concentration_index = 1.0;
  /// Distance -effective_sup - lambda_p and the tolerance it was tested against.
  double existence_gap = 0.0;
  double gap_tol = 0.0;
  std::vector<CwBounds> history;
  std::vector<std::string> warnings;

  /// On a finite connected grid the two dual characterisations coincide with
  /// the Perron value, so both are reported as lambda_p.
  double lambda_p_prime() const { return lambda_p; }
  double lambda_p_double_prime() const { return lambda_p; }
};

/// lambda_p = -(Perron value of A), by power iteration on A + c I with
/// c = |shift| + max|a| + 1. Converged when successive Rayleigh quotients
/// differ by at most tol, the Collatz-Wielandt width is at most 10 tol and
/// the residual is at most tol. A non-converged run returns the last iterate
/// with converged = false.
SpectralResult principal_eig(const DiscreteOperator& op, const SolverOptions& opts = {});

/// min_i and max_i of -(A phi)_i / phi_i. phi must be strictly positive.
CwBounds cw_bounds(const DiscreteOperator& op, const Eigen::VectorXd& phi);

/// Weighted Rayleigh quotient written as the nonlocal quadratic form
/// [1/2 sum w_i w_j K_ij (phi_i - phi_j)^2 - sum w_i (a_i + shift + p_i) phi_i^2] / |phi|_w^2.
double lambda_v_quadratic(const DiscreteOperator& op, const Eigen::VectorXd& phi);

struct VariationalResult {
  double lambda_v = 0.0;
  Eigen::VectorXd eigvec;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimum of the quadratic-form quotient: minus the top eigenvalue of
/// W^1/2 A W^-1/2, by shifted power iteration.
VariationalResult lambda_v_min(const DiscreteOperator& op, double tol = 1e-10, std::size_t max_iter = 0);

/// lo = -max_i (a_i + shift + p_i), hi = -max_i (a_i + shift).
CwBounds bounds_iv(const DiscreteOperator& op);

struct ExistenceReport {
  ExistenceVerdict verdict = ExistenceVerdict::boundary_case;
  double gap = 0.0;
  double gap_tol = 0.0;
  double concentration_index = 1.0;
};

/// eigenpair iff lambda_p < -effective_sup(op) - gap_tol with
/// gap_tol = 10 h^holder + 100 tol.
ExistenceReport existence_check(const SpectralResult& res, const DiscreteOperator& op, double tol = 1e-10);

/// (sum phi^2)^2 / (n sum phi^4).
double participation_ratio(const Eigen::VectorXd& phi);

struct ExpTestBound {
  double bound = 0.0;
  double argmin = 0.0;
  double min_value = 0.0;
  /// The minimum sits at an end of the search interval.
  bool boundary_minimum = false;
};

/// mhat(lambda) = integral of J_sigma(z - drift) exp(-lambda z) dz by
/// composite Gauss-Legendre with `panels` panels on each side of the drift.
double exp_moment(const KernelSpec& k, double lambda, int panels = 16);

/// -min over [lambda_lo, lambda_hi] of exp_moment, by golden-section search.
ExpTestBound exp_test_lower_bound(const KernelSpec& k, double lambda_lo, double lambda_hi, int panels = 16);

}  // namespace nlspec
