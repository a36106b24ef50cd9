#include "nlspec/local_ref.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

using Triplet = Eigen::Triplet<double>;

// Negative Laplacian with ghost reflection, scaled by c.
Eigen::SparseMatrix<double> neg_laplacian(const Grid& grid, double c) {
  const int dim = grid.dimension();
  const std::size_t n = grid.size();
  const std::size_t nx = grid.nodes_along(0);
  const std::size_t ny = dim == 2 ? grid.nodes_along(1) : 1;
  std::vector<Triplet> t;
  t.reserve(n * (1 + 2 * static_cast<std::size_t>(dim)));
  auto add_axis = [&](std::size_t idx, std::size_t pos, std::size_t count, std::size_t stride, double h) {
    const double k = c / (h * h);
    const auto i = static_cast<int>(idx);
    double diag = 2.0 * k;
    if (pos == 0) diag += k;
    else t.emplace_back(i, static_cast<int>(idx - stride), -k);
    if (pos + 1 == count) diag += k;
    else t.emplace_back(i, static_cast<int>(idx + stride), -k);
    t.emplace_back(i, i, diag);
  };
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const std::size_t idx = ix * ny + iy;
      add_axis(idx, ix, nx, ny, grid.spacing(0));
      if (dim == 2) add_axis(idx, iy, ny, 1, grid.spacing(1));
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(n), static_cast<int>(n));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> dirichlet_stencil(const Grid& grid, double c, const Coefficient& a) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("diffusivity must be positive");
  if (a.size() != grid.size()) throw InvalidArgument("coefficient and grid do not share nodes");
  Eigen::SparseMatrix<double> m = neg_laplacian(grid, c);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m.coeffRef(static_cast<int>(i), static_cast<int>(i)) -= a[i];
  }
  m.makeCompressed();
  return m;
}

LocalEigenResult dirichlet_lambda1(const Grid& grid, double c, const Coefficient& a, double tol,
                                   std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const Eigen::SparseMatrix<double> t = dirichlet_stencil(grid, c, a);
  const auto n = static_cast<Eigen::Index>(grid.size());

  // lambda_1 >= -sup a, so T + (sup a + 1) I is positive definite.
  const double s = -a.sup() - 1.0;
  Eigen::SparseMatrix<double> shifted = t;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(static_cast<int>(i), static_cast<int>(i)) -= s;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) throw Error("factorization of the shifted Dirichlet matrix failed");

  LocalEigenResult out;
  out.c = c;
  out.grid = std::make_shared<const Grid>(grid);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd y = solver.solve(x);
    x = y.normalized();
    const Eigen::VectorXd tx = t * x;
    lambda = x.dot(tx);
    out.residual = (tx - lambda * x).norm() / std::max(1.0, std::abs(lambda));
    out.iterations = it;
    if (out.residual <= tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) throw Error("Dirichlet inverse iteration did not converge");
  if (x.sum() < 0.0) x = -x;
  const double h_n = grid.weights()[0];
  out.lambda_1 = lambda;
  out.phi_1 = x / std::sqrt(h_n * x.squaredNorm());
  return out;
}

double diffusivity(const KernelSpec& k) {
  if (k.variant != KernelVariant::convolution) throw InvalidArgument("diffusivity needs a convolution kernel");
  if (k.drift != 0.0) throw InvalidArgument("diffusivity needs an even kernel");
  return second_moment(k) / (2.0 * k.dimension);
}

double gradient_energy(const Grid& grid, const Eigen::VectorXd& phi) {
  if (phi.size() != static_cast<Eigen::Index>(grid.size())) throw InvalidArgument("vector size does not match grid");
  const Eigen::SparseMatrix<double> l = neg_laplacian(grid, 1.0);
  return grid.weights()[0] * phi.dot(l * phi);
}

}  // namespace nlspec
