#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <memory>

#include "nlspec/coefficient.hpp"
#include "nlspec/grid.hpp"
#include "nlspec/kernel.hpp"

namespace nlspec {

struct LocalEigenResult {
  /// Smallest eigenvalue of -c Delta_h - a with Dirichlet data.
  double lambda_1 = 0.0;
  /// Positive eigenvector, unit weighted l2 norm.
  Eigen::VectorXd phi_1;
  double c = 0.0;
  std::shared_ptr<const Grid> grid;
  /// |T phi - lambda phi| / (max(1, |lambda|) |phi|).
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Cell-centred finite-difference matrix of -c Delta_h - diag(a). Dirichlet
/// data sit half a cell outside the first and last nodes (ghost value -phi).
Eigen::SparseMatrix<double> dirichlet_stencil(const Grid& grid, double c, const Coefficient& a);

/// Smallest Dirichlet eigenvalue of -c Delta - a by shifted inverse iteration.
/// Throws Error when the iteration does not converge within max_iter.
LocalEigenResult dirichlet_lambda1(const Grid& grid, double c, const Coefficient& a, double tol = 1e-10,
                                   std::size_t max_iter = 2000);

/// D_2(J) / (2N). Even convolution kernels only.
double diffusivity(const KernelSpec& k);

/// h^N phi^T (-Delta_h) phi, the discrete Dirichlet energy of phi.
double gradient_energy(const Grid& grid, const Eigen::VectorXd& phi);

}  // namespace nlspec
