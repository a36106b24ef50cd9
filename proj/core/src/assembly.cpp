#include "nlspec/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nlspec/error.hpp"
#include "parallel.hpp"

namespace nlspec {

namespace {

double min_over_nodes(const CoefficientSpec& spec, const Grid& grid, double scale) {
  if (spec.family == CoefficientFamily::constant) return spec.value;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& p : grid.nodes()) lo = std::min(lo, evaluate(spec, Point{p[0] / scale, p[1] / scale}));
  return lo;
}

void require_finite(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw NonFiniteError("operator matrix contains non-finite entries");
}

}  // namespace

std::string_view to_string(OperatorVariant v) {
  return v == OperatorVariant::L_plus_a ? "L_plus_a" : "M_plus_a";
}

std::optional<OperatorVariant> operator_variant_from_string(std::string_view s) {
  if (s == "L_plus_a") return OperatorVariant::L_plus_a;
  if (s == "M_plus_a") return OperatorVariant::M_plus_a;
  return std::nullopt;
}

double prefactor(OperatorVariant v, double sigma, double m) {
  return v == OperatorVariant::M_plus_a ? std::pow(sigma, -m) : 1.0;
}

DiscreteOperator DiscreteOperator::from_matrix(Eigen::MatrixXd a, std::vector<double> zero_order,
                                               std::vector<double> weights, double shift) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("operator matrix must be square and nonempty");
  const auto n = static_cast<std::size_t>(a.rows());
  if (zero_order.empty()) zero_order.assign(n, 0.0);
  if (weights.empty()) weights.assign(n, 1.0);
  if (zero_order.size() != n || weights.size() != n) {
    throw InvalidArgument("zero-order and weight vectors must match the matrix size");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be positive");
  }
  require_finite(a);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j && a(i, j) < 0.0) throw InvalidArgument("off-diagonal entries must be nonnegative");
    }
  }
  DiscreteOperator op;
  op.matrix_ = std::move(a);
  op.zero_order_ = std::move(zero_order);
  op.weights_ = std::move(weights);
  op.shift_ = shift;
  op.row_mass_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    op.row_mass_[i] = op.matrix_.row(static_cast<Eigen::Index>(i)).sum() - op.zero_order_[i] - shift;
  }
  op.metadata_.coefficient_id = "raw";
  op.metadata_.kernel_id = "raw";
  op.finish();
  return op;
}

void DiscreteOperator::finish() {
  const auto n = static_cast<Eigen::Index>(size());
  double amax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) amax = std::max(amax, std::abs(weights_[i] * matrix_(i, j)));
  }
  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      asym = std::max(asym, std::abs(weights_[i] * matrix_(i, j) - weights_[j] * matrix_(j, i)));
    }
  }
  symmetric_ = asym <= 1e-14 * amax;

  components_.clear();
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < size(); ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      comp.push_back(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (seen[ju] || ju == i) continue;
        if (matrix_(static_cast<Eigen::Index>(i), j) > 0.0 || matrix_(j, static_cast<Eigen::Index>(i)) > 0.0) {
          seen[ju] = 1;
          stack.push_back(ju);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components_.push_back(std::move(comp));
  }
  if (components_.size() > 1) {
    std::ostringstream os;
    os << "support graph has " << components_.size()
       << " components; lambda_p is taken over components";
    warnings_.push_back(os.str());
  }
}

DiscreteOperator DiscreteOperator::restricted(std::span<const std::size_t> nodes) const {
  const auto k = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd sub(k, k);
  std::vector<double> a(nodes.size());
  std::vector<double> w(nodes.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    a[i] = zero_order_[nodes[i]];
    w[i] = weights_[nodes[i]];
    for (Eigen::Index j = 0; j < k; ++j) {
      sub(i, j) = matrix_(static_cast<Eigen::Index>(nodes[i]), static_cast<Eigen::Index>(nodes[j]));
    }
  }
  auto op = from_matrix(std::move(sub), std::move(a), std::move(w), shift_);
  op.metadata_ = metadata_;
  return op;
}

double max_spacing(const KernelSpec& k, const Grid& grid) {
  const double s = k.domain_scale;
  switch (k.variant) {
    case KernelVariant::convolution:
      return k.sigma * k.radius * s / 8.0;
    case KernelVariant::general:
      return k.radius * min_over_nodes(k.modulation_g, grid, s) * min_over_nodes(k.modulation_h, grid, s) * s /
             8.0;
    case KernelVariant::slow_decay_1d:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

void check_resolution(const Grid& grid, const KernelSpec& k) {
  const double limit = max_spacing(k, grid);
  // Relative slack absorbs rounding in h = sigma r / 8 exactly.
  if (grid.spacing() > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "resolution rule violated: grid spacing h = " << grid.spacing()
       << " exceeds sigma*r/8 = " << limit << " (at least 16 nodes across the kernel diameter are required)";
    throw ResolutionError(os.str());
  }
}

DiscreteOperator assemble(const Grid& grid, const KernelSpec& k, const Coefficient& a, OperatorVariant variant,
                          unsigned threads) {
  validate(k);
  if (k.dimension != grid.dimension()) throw InvalidArgument("kernel and grid dimensions differ");
  if (a.size() != grid.size()) throw InvalidArgument("coefficient and grid do not share nodes");
  if (grid.size() > kMaxDenseNodes) {
    std::ostringstream os;
    os << "dense assembly is limited to " << kMaxDenseNodes << " nodes, got " << grid.size();
    throw InvalidArgument(os.str());
  }
  if (variant == OperatorVariant::M_plus_a && k.variant != KernelVariant::convolution) {
    throw InvalidArgument("the M variant requires a convolution kernel");
  }
  check_resolution(grid, k);

  const double pre = prefactor(variant, k.sigma, k.m);
  const double shift = variant == OperatorVariant::M_plus_a ? -pre : 0.0;
  const std::size_t n = grid.size();
  const auto ni = static_cast<Eigen::Index>(n);

  DiscreteOperator op;
  op.matrix_.resize(ni, ni);
  op.row_mass_.assign(n, 0.0);
  const auto nodes = grid.nodes();
  const auto w = grid.weights();
  const auto av = a.values();
  Eigen::MatrixXd& m = op.matrix_;
  detail::parallel_for(n, threads, [&](std::size_t i) {
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = pre * w[j] * eval_kernel(k, nodes[i], nodes[j]);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      mass += v;
    }
    op.row_mass_[i] = mass;
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += av[i] + shift;
  });
  require_finite(op.matrix_);

  op.weights_.assign(w.begin(), w.end());
  op.zero_order_.assign(av.begin(), av.end());
  op.shift_ = shift;
  op.grid_ = std::make_shared<const Grid>(grid);
  op.kernel_ = k;
  op.coefficient_ = a;
  op.metadata_.variant = variant;
  op.metadata_.sigma = k.sigma;
  op.metadata_.m = variant == OperatorVariant::M_plus_a ? k.m : 0.0;
  op.metadata_.h = grid.spacing();
  op.metadata_.holder = a.holder();
  op.metadata_.kernel_id = describe(k);
  op.metadata_.coefficient_id = std::string(to_string(a.spec().family));
  op.finish();
  return op;
}

DiscreteOperator assemble_scaled(const DiscreteOperator& op, double factor, unsigned threads) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("scale factor must be positive");
  if (!op.grid() || !op.kernel() || !op.coefficient()) {
    throw InvalidArgument("scaled assembly needs an operator built from a grid, kernel and coefficient");
  }
  if (op.metadata().variant != OperatorVariant::L_plus_a) {
    throw InvalidArgument("scaled assembly applies to the L variant only");
  }
  KernelSpec k = *op.kernel();
  k.domain_scale *= factor;
  const Grid grid = op.grid()->scaled(factor);
  const Coefficient& c = *op.coefficient();
  Coefficient a = c;
  if (c.spec().family != CoefficientFamily::tabulated) {
    CoefficientSpec spec = c.spec();
    spec.domain_scale *= factor;
    a = Coefficient::sample(spec, grid);
  }
  return assemble(grid, k, a, OperatorVariant::L_plus_a, threads);
}

double effective_sup(const DiscreteOperator& op) {
  const auto a = op.zero_order();
  return *std::max_element(a.begin(), a.end()) + op.shift();
}

}  // namespace nlspec
