#include "nlspec/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

double weighted_dot(std::span<const double> w, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += w[static_cast<std::size_t>(i)] * x[i] * y[i];
  return acc;
}

double weighted_norm(std::span<const double> w, const Eigen::VectorXd& x) {
  return std::sqrt(weighted_dot(w, x, x));
}

void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

double zero_order_sup_abs(const DiscreteOperator& op) {
  double m = 0.0;
  for (double a : op.zero_order()) m = std::max(m, std::abs(a));
  return m;
}

SpectralResult solve_connected(const DiscreteOperator& op, const SolverOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto w = op.weights();
  const double c = std::abs(op.shift()) + zero_order_sup_abs(op) + 1.0;
  Eigen::MatrixXd b = op.matrix();
  b.diagonal().array() += c;

  const std::size_t max_iter = opts.max_iter ? opts.max_iter : 200 * op.size();
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(n);
  phi /= weighted_norm(w, phi);
  Eigen::VectorXd y(n);

  SpectralResult res;
  double rho_prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    y.noalias() = b * phi;
    const double rho = weighted_dot(w, y, phi);
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = -rmin;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = y[i] / phi[i];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    const CwBounds cw{c - rmax, c - rmin};
    if (opts.record_history) res.history.push_back(cw);
    const double residual = weighted_norm(w, y - rho * phi);
    if (!std::isfinite(rho) || !std::isfinite(residual)) {
      throw NonFiniteError("power iteration produced a non-finite iterate");
    }

    res.iterations = it;
    res.cw_lower = cw.lower;
    res.cw_upper = cw.upper;
    res.residual = residual;
    res.lambda_p = std::clamp(c - rho, cw.lower, cw.upper);
    res.eigvec = phi;

    const bool done = std::abs(rho - rho_prev) <= opts.tol && cw.upper - cw.lower <= 10.0 * opts.tol &&
                      residual <= opts.tol;
    if (done) {
      res.converged = true;
      break;
    }
    rho_prev = rho;
    phi = y / weighted_norm(w, y);
  }
  fix_sign(res.eigvec);
  return res;
}

}  // namespace

std::string_view to_string(ExistenceVerdict v) {
  return v == ExistenceVerdict::eigenpair ? "eigenpair" : "boundary_case";
}

SpectralResult principal_eig(const DiscreteOperator& op, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (!op.matrix().allFinite()) throw NonFiniteError("operator matrix contains non-finite entries");

  SpectralResult res;
  if (op.connected()) {
    res = solve_connected(op, opts);
  } else {
    // Largest Perron value over the components, i.e. the smallest lambda_p.
    bool first = true;
    std::size_t best = 0;
    const auto& comps = op.components();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const DiscreteOperator sub = op.restricted(comps[k]);
      SpectralResult r = solve_connected(sub, opts);
      if (first || r.lambda_p < res.lambda_p) {
        res = std::move(r);
        best = k;
        first = false;
      }
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.size()));
    for (std::size_t i = 0; i < comps[best].size(); ++i) {
      full[static_cast<Eigen::Index>(comps[best][i])] = res.eigvec[static_cast<Eigen::Index>(i)];
    }
    res.eigvec = std::move(full);
    std::ostringstream os;
    os << "support graph has " << comps.size() << " components; lambda_p taken on component " << best;
    res.warnings.push_back(os.str());
  }
  if (!res.converged) {
    std::ostringstream os;
    os << "power iteration stopped after " << res.iterations << " iterations without converging";
    res.warnings.push_back(os.str());
  }
  if (op.symmetric()) res.lambda_v = lambda_v_quadratic(op, res.eigvec);
  const ExistenceReport ex = existence_check(res, op, opts.tol);
  res.existence = ex.verdict;
  res.existence_gap = ex.gap;
  res.gap_tol = ex.gap_tol;
  res.concentration_index = ex.concentration_index;
  return res;
}

CwBounds cw_bounds(const DiscreteOperator& op, const Eigen::VectorXd& phi) {
  if (phi.size() != static_cast<Eigen::Index>(op.size())) throw InvalidArgument("vector size does not match operator");
  if (!(phi.array() > 0.0).all()) throw InvalidArgument("Collatz-Wielandt bounds need a strictly positive vector");
  const Eigen::VectorXd y = op.matrix() * phi;
  CwBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const double r = -y[i] / phi[i];
    b.lower = std::min(b.lower, r);
    b.upper = std::max(b.upper, r);
  }
  return b;
}

double lambda_v_quadratic(const DiscreteOperator& op, const Eigen::VectorXd& phi) {
  if (!op.symmetric()) throw InvalidArgument("the quadratic form requires a symmetric operator");
  const auto n = static_cast<Eigen::Index>(op.size());
  if (phi.size() != n) throw InvalidArgument("vector size does not match operator");
  const auto w = op.weights();
  const auto a = op.zero_order();
  const auto p = op.row_mass();
  const Eigen::MatrixXd& m = op.matrix();
  // w_i A_ij = w_i w_j K_ij off the diagonal; diagonal terms vanish.
  double form = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = phi[i] - phi[j];
      form += w[static_cast<std::size_t>(i)] * m(i, j) * d * d;
    }
  }
  form *= 0.5;
  double norm2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    form -= w[iu] * (a[iu] + op.shift() + p[iu]) * phi[i] * phi[i];
    norm2 += w[iu] * phi[i] * phi[i];
  }
  if (!(norm2 > 0.0)) throw InvalidArgument("the quadratic form needs a nonzero vector");
  return form / norm2;
}

VariationalResult lambda_v_min(const DiscreteOperator& op, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (!op.symmetric()) throw InvalidArgument("lambda_v_min requires a symmetric operator");
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto w = op.weights();
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw[i] = std::sqrt(w[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd s = sw.asDiagonal() * op.matrix() * sw.cwiseInverse().asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  if (!s.allFinite()) throw NonFiniteError("operator matrix contains non-finite entries");

  // Gershgorin lower end and largest diagonal bound the spectrum from below
  // and the top eigenvalue from below; the shift makes the top eigenvalue
  // dominant in magnitude.
  double g_lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = s.row(i).cwiseAbs().sum() - std::abs(s(i, i));
    g_lo = std::min(g_lo, s(i, i) - off);
  }
  const double d_max = s.diagonal().maxCoeff();
  const double shift = std::max(0.0, -(d_max + g_lo) / 2.0 + 1.0);
  s.diagonal().array() += shift;

  if (max_iter == 0) max_iter = 200 * op.size();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::cos(static_cast<double>(i));
  x.normalize();

  VariationalResult out;
  double theta_prev = std::numeric_limits<double>::quiet_NaN();
  double theta = 0.0;
  Eigen::VectorXd y(n);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    y.noalias() = s * x;
    theta = x.dot(y);
    const double residual = (y - theta * x).norm();
    out.iterations = it;
    if (residual <= tol && std::abs(theta - theta_prev) <= tol) {
      out.converged = true;
      break;
    }
    const double ny = y.norm();
    if (ny == 0.0) {
      out.converged = true;
      break;
    }
    theta_prev = theta;
    x = y / ny;
  }
  out.lambda_v = -(theta - shift);
  Eigen::VectorXd phi = x.cwiseQuotient(sw);
  phi /= weighted_norm(w, phi);
  fix_sign(phi);
  out.eigvec = std::move(phi);
  return out;
}

CwBounds bounds_iv(const DiscreteOperator& op) {
  const auto a = op.zero_order();
  const auto p = op.row_mass();
  double full = -std::numeric_limits<double>::infinity();
  double diag = full;
  for (std::size_t i = 0; i < op.size(); ++i) {
    full = std::max(full, a[i] + op.shift() + p[i]);
    diag = std::max(diag, a[i] + op.shift());
  }
  return {-full, -diag};
}

double participation_ratio(const Eigen::VectorXd& phi) {
  const double s2 = phi.squaredNorm();
  const double s4 = phi.array().pow(4).sum();
  if (!(s4 > 0.0)) throw InvalidArgument("participation ratio of a zero vector");
  return s2 * s2 / (static_cast<double>(phi.size()) * s4);
}

ExistenceReport existence_check(const SpectralResult& res, const DiscreteOperator& op, double tol) {
  ExistenceReport r;
  const double h = op.metadata().h;
  r.gap_tol = 10.0 * std::pow(h, op.metadata().holder) + 100.0 * tol;
  r.gap = -effective_sup(op) - res.lambda_p;
  r.verdict = r.gap > r.gap_tol ? ExistenceVerdict::eigenpair : ExistenceVerdict::boundary_case;
  r.concentration_index = participation_ratio(res.eigvec);
  return r;
}

double exp_moment(const KernelSpec& k, double lambda, int panels) {
  if (k.variant != KernelVariant::convolution || k.dimension != 1) {
    throw InvalidArgument("the exponential test needs a 1-D convolution kernel");
  }
  if (panels < 1) throw InvalidArgument("panel count must be positive");
  static constexpr std::array<double, 4> kNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
  static constexpr std::array<double, 4> kWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};
  const double half = k.sigma * k.radius;
  const double d = k.drift;
  const Point origin{0.0, 0.0};
  auto integrand = [&](double z) { return eval_kernel(k, Point{z, 0.0}, origin) * std::exp(-lambda * z); };
  double acc = 0.0;
  for (double lo : {d - half, d}) {
    const double width = half / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * width;
      const double hw = 0.5 * width;
      for (std::size_t q = 0; q < kNodes.size(); ++q) {
        acc += kWeights[q] * hw * (integrand(mid - hw * kNodes[q]) + integrand(mid + hw * kNodes[q]));
      }
    }
  }
  return acc;
}

ExpTestBound exp_test_lower_bound(const KernelSpec& k, double lambda_lo, double lambda_hi, int panels) {
  validate(k);
  if (!(lambda_lo >= 0.0) || !(lambda_hi > lambda_lo) || !std::isfinite(lambda_hi)) {
    throw InvalidArgument("lambda range must satisfy 0 <= lo < hi < inf");
  }
  auto f = [&](double l) { return exp_moment(k, l, panels); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lambda_lo;
  double b = lambda_hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > 1e-10 * std::max(1.0, std::abs(b))) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  ExpTestBound out;
  out.argmin = f1 <= f2 ? x1 : x2;
  out.min_value = std::min(f1, f2);
  const double flo = f(lambda_lo);
  const double fhi = f(lambda_hi);
  if (flo <= out.min_value) {
    out.argmin = lambda_lo;
    out.min_value = flo;
  }
  if (fhi < out.min_value) {
    out.argmin = lambda_hi;
    out.min_value = fhi;
  }
  const double edge = 1e-6 * (lambda_hi - lambda_lo);
  out.boundary_minimum = out.argmin - lambda_lo <= edge || lambda_hi - out.argmin <= edge;
  out.bound = -out.min_value;
  return out;
}

}  // namespace nlspec
