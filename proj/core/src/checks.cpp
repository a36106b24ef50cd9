#include "nlspec/checks.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

class Tracker {
 public:
  explicit Tracker(std::string name) { check_.name = std::move(name); }

  void observe(double violation_measure) {
    ++check_.cases;
    worst_ = std::max(worst_, violation_measure);
  }

  void fail(const std::string& why) {
    check_.passed = false;
    if (check_.detail.empty()) check_.detail = why;
  }

  PropertyCheck done(const std::string& measure) {
    if (check_.passed) check_.detail = measure + " " + sci(worst_);
    return check_;
  }

 private:
  PropertyCheck check_;
  double worst_ = 0.0;
};

CoefficientSpec random_coefficient(std::mt19937_64& rng, double lo, double hi) {
  CoefficientSpec c;
  const double mid = 0.5 * (lo + hi);
  switch (pick(rng, 5)) {
    case 0:
      c = CoefficientSpec::constant_value(uniform(rng, -1.0, 1.0));
      break;
    case 1:
      c.family = CoefficientFamily::cosine_bump;
      c.amplitude = uniform(rng, -2.0, 2.0);
      c.frequency = uniform(rng, 0.25, 2.0);
      c.offset = uniform(rng, -0.5, 0.5);
      c.center = {uniform(rng, lo, hi), 0.0};
      break;
    case 2:
      c.family = CoefficientFamily::gaussian_bump;
      c.amplitude = uniform(rng, 0.0, 2.0);
      c.width = uniform(rng, 0.05, 0.5) * (hi - lo);
      c.offset = uniform(rng, -0.5, 0.5);
      c.center = {uniform(rng, lo, hi), 0.0};
      break;
    case 3:
      c.family = CoefficientFamily::power_cusp;
      c.nu = uniform(rng, -0.5, 1.0);
      c.beta = 2.0;
      c.center = {mid, 0.0};
      break;
    default:
      c.family = CoefficientFamily::piecewise;
      c.knots = {lo, mid, hi};
      c.values = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
      break;
  }
  return c;
}

// Radial Gauss-Legendre moment of J: integral of |z|^p J(z) over R^N.
double radial_moment(const KernelSpec& k, int power) {
  static constexpr double kNodes[] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                      0.9602898564975363};
  static constexpr double kWeights[] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                        0.1012285362903763};
  const int panels = 64;
  const double width = k.radius / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int q = 0; q < 4; ++q) {
      for (double s : {mid - 0.5 * width * kNodes[q], mid + 0.5 * width * kNodes[q]}) {
        const double surface = k.dimension == 1 ? 2.0 : 2.0 * std::numbers::pi * s;
        acc += 0.5 * width * kWeights[q] * surface * std::pow(s, power) * density(k, Point{s, 0.0});
      }
    }
  }
  return acc;
}

}  // namespace

bool PropertySuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_nodes) {
  const std::size_t n = 16 + pick(rng, std::max<std::size_t>(max_nodes, 17) - 15);
  const double lo = uniform(rng, -1.0, 1.0);
  const double len = uniform(rng, 0.5, 2.0);
  const std::array<AxisBounds, 1> b{AxisBounds{lo, lo + len}};
  const std::array<std::size_t, 1> counts{n};
  Grid grid = Grid::uniform(b, counts);

  KernelSpec k;
  k.family = static_cast<KernelFamily>(pick(rng, 4));
  k.radius = uniform(rng, 0.5, 1.5);
  const double sigma_min = 8.0 * grid.spacing() / k.radius;
  const double sigma_max = std::max(sigma_min * 1.01, 1.5 * len / k.radius);
  k.sigma = sigma_min * std::exp(uniform(rng, 0.0, std::log(sigma_max / sigma_min)));
  k.m = uniform(rng, 0.0, 2.0);
  const OperatorVariant v = pick(rng, 2) == 0 ? OperatorVariant::L_plus_a : OperatorVariant::M_plus_a;
  return RandomInstance{std::move(grid), k, random_coefficient(rng, lo, lo + len), v};
}

double dense_lambda_p(const DiscreteOperator& op) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix(), false);
  if (es.info() != Eigen::Success) throw Error("dense eigensolver failed");
  return -es.eigenvalues().real().maxCoeff();
}

PropertySuiteResult run_property_suite(const PropertySuiteOptions& opts) {
  PropertySuiteResult out;
  std::mt19937_64 rng(opts.seed);
  SolverOptions solver;
  solver.tol = opts.tol;
  solver.record_history = true;
  SolverOptions tight;
  tight.tol = 1e-13;

  // Collatz-Wielandt sandwich, dense oracle, bounds (iv), lambda_v routes.
  Tracker sandwich("cw_sandwich_every_iterate");
  Tracker width("cw_final_width");
  Tracker oracle("dense_oracle_agreement");
  Tracker iv("bounds_iv_bracket");
  Tracker equiv("lambda_p_equals_lambda_v");
  Tracker form("quadratic_form_identity");
  Tracker linear("linearity_in_a");
  for (std::size_t t = 0; t < opts.instances; ++t) {
    RandomInstance inst = random_instance(rng, opts.max_nodes);
    const Coefficient a = Coefficient::sample(inst.coefficient, inst.grid);
    const DiscreteOperator op = assemble(inst.grid, inst.kernel, a, inst.variant, 1);
    const SpectralResult res = principal_eig(op, solver);
    if (!res.converged) sandwich.fail("power iteration did not converge on instance " + std::to_string(t));

    double worst = 0.0;
    for (const auto& h : res.history) worst = std::max({worst, h.lower - res.lambda_p, res.lambda_p - h.upper});
    sandwich.observe(std::max(0.0, worst));
    if (worst > 0.0) sandwich.fail("iterate bound excludes lambda_p by " + sci(worst));

    width.observe(res.cw_upper - res.cw_lower);
    if (res.cw_upper - res.cw_lower > 1e-8) width.fail("final width " + sci(res.cw_upper - res.cw_lower));

    const double ref = dense_lambda_p(op);
    oracle.observe(std::abs(ref - res.lambda_p));
    if (std::abs(ref - res.lambda_p) > 1e-9) oracle.fail("oracle gap " + sci(std::abs(ref - res.lambda_p)));

    const CwBounds b = bounds_iv(op);
    const double iv_violation = std::max({0.0, b.lower - res.lambda_p, res.lambda_p - b.upper});
    iv.observe(iv_violation);
    if (iv_violation > 1e-12) iv.fail("bounds_iv excluded lambda_p by " + sci(iv_violation));

    const VariationalResult var = lambda_v_min(op, opts.tol);
    const double eq_gap = std::abs(var.lambda_v - res.lambda_p);
    equiv.observe(eq_gap);
    if (eq_gap > 10.0 * opts.tol) equiv.fail("routes differ by " + sci(eq_gap));

    const double fq = std::abs(lambda_v_quadratic(op, res.eigvec) - res.lambda_p);
    form.observe(fq);
    if (fq > 1e-10) form.fail("quadratic form differs from lambda_p by " + sci(fq));

    const double c = uniform(rng, -1.0, 1.0);
    const DiscreteOperator shifted = assemble(inst.grid, inst.kernel, a.shifted(c), inst.variant, 1);
    Eigen::MatrixXd diff = shifted.matrix() - op.matrix();
    diff.diagonal().array() -= c;
    const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
    const double lin = diff.cwiseAbs().maxCoeff() / scale;
    linear.observe(lin);
    if (lin > 4.0 * std::numeric_limits<double>::epsilon()) linear.fail("shift changed the matrix by " + sci(lin));

    SweepRecord r;
    r.sigma = inst.kernel.sigma;
    r.m = inst.variant == OperatorVariant::M_plus_a ? inst.kernel.m : 0.0;
    r.lambda_p = res.lambda_p;
    r.lambda_v = var.lambda_v;
    r.cw_lower = res.cw_lower;
    r.cw_upper = res.cw_upper;
    r.iv_lo = b.lower;
    r.iv_hi = b.upper;
    r.n_nodes = op.size();
    r.h = inst.grid.spacing();
    r.existence = res.existence;
    r.converged = res.converged;
    out.records.push_back(std::move(r));
  }
  out.checks.push_back(sandwich.done("max violation"));
  out.checks.push_back(width.done("max width"));
  out.checks.push_back(oracle.done("max gap"));
  out.checks.push_back(iv.done("max violation"));
  out.checks.push_back(equiv.done("max gap"));
  out.checks.push_back(form.done("max gap"));
  out.checks.push_back(linear.done("max relative change"));

  // Monotonicity and Lipschitz continuity in a.
  Tracker mono("monotone_in_a");
  Tracker lip("lipschitz_in_a");
  for (std::size_t t = 0; t < opts.instances; ++t) {
    RandomInstance inst = random_instance(rng, std::min<std::size_t>(opts.max_nodes, 80));
    const Coefficient a = Coefficient::sample(inst.coefficient, inst.grid);
    std::vector<double> lower(a.values().begin(), a.values().end());
    const double eps = std::exp(uniform(rng, std::log(1e-3), std::log(0.5)));
    double dmax = 0.0;
    for (double& v : lower) {
      const double d = eps * uniform(rng, 0.0, 1.0);
      v -= d;
      dmax = std::max(dmax, d);
    }
    const Coefficient b = Coefficient::from_values(std::move(lower));
    const double la = principal_eig(assemble(inst.grid, inst.kernel, a, inst.variant, 1), tight).lambda_p;
    const double lb = principal_eig(assemble(inst.grid, inst.kernel, b, inst.variant, 1), tight).lambda_p;
    mono.observe(std::max(0.0, la - lb));
    if (lb < la - 1e-12) mono.fail("lowering a decreased lambda_p by " + sci(la - lb));
    const double excess = std::abs(la - lb) - dmax;
    lip.observe(std::max(0.0, excess));
    if (excess > 1e-12) lip.fail("Lipschitz bound exceeded by " + sci(excess));
  }
  out.checks.push_back(mono.done("max violation"));
  out.checks.push_back(lip.done("max excess"));

  // Scaling invariance.
  Tracker scaling("scaling_invariance");
  const std::array<double, 3> factors{0.5, 2.0, 10.0};
  for (std::size_t t = 0; t < std::max<std::size_t>(3, opts.instances / 4); ++t) {
    RandomInstance inst = random_instance(rng, std::min<std::size_t>(opts.max_nodes, 80));
    const Coefficient a = Coefficient::sample(inst.coefficient, inst.grid);
    const DiscreteOperator op = assemble(inst.grid, inst.kernel, a, OperatorVariant::L_plus_a, 1);
    const InvarianceReport rep = scaling_invariance_suite(op, factors, solver);
    scaling.observe(rep.max_discrepancy);
    if (rep.max_discrepancy > 1e-11) scaling.fail("discrepancy " + sci(rep.max_discrepancy));
  }
  out.checks.push_back(scaling.done("max discrepancy"));

  // Monotonicity along nested boxes.
  Tracker exhaust("exhaustion_nonincreasing");
  for (std::size_t t = 0; t < 3; ++t) {
    ExhaustionSpec spec;
    spec.kernel.family = static_cast<KernelFamily>(pick(rng, 4));
    spec.kernel.sigma = uniform(rng, 0.25, 0.75);
    spec.h = 1.0 / 32.0;
    spec.coefficient.family = CoefficientFamily::gaussian_bump;
    spec.coefficient.amplitude = uniform(rng, 0.5, 2.0);
    spec.coefficient.width = uniform(rng, 0.2, 0.6);
    spec.half_widths = {0.5, 1.0, 1.5, 2.0};
    spec.solver = tight;
    const ExhaustionResult res = domain_exhaustion(spec);
    double worst = 0.0;
    for (std::size_t i = 1; i < res.levels.size(); ++i) {
      worst = std::max(worst, res.levels[i].record.lambda_p - res.levels[i - 1].record.lambda_p);
    }
    exhaust.observe(std::max(0.0, worst));
    if (!res.nonincreasing || !res.nested) exhaust.fail("sequence increased by " + sci(worst));
  }
  out.checks.push_back(exhaust.done("max increase"));

  // Kernel-level identities.
  Tracker mass("kernel_unit_mass");
  Tracker moment("second_moment_quadrature");
  Tracker symmetric("kernel_symmetry");
  Tracker witness("nondegeneracy_witness");
  for (int dim : {1, 2}) {
    for (int f = 0; f < 4; ++f) {
      KernelSpec k;
      k.family = static_cast<KernelFamily>(f);
      k.dimension = dim;
      k.radius = uniform(rng, 0.5, 2.0);
      k.sigma = uniform(rng, 0.1, 2.0);
      const double m0 = radial_moment(k, 0);
      mass.observe(std::abs(m0 - 1.0));
      if (std::abs(m0 - 1.0) > 1e-10) mass.fail(std::string(to_string(k.family)) + " mass " + sci(m0));
      const double m2 = radial_moment(k, 2);
      const double d2 = second_moment(k);
      moment.observe(std::abs(m2 - d2));
      if (std::abs(m2 - d2) > 1e-8) moment.fail(std::string(to_string(k.family)) + " moment gap " + sci(m2 - d2));
      const double scaled = scaled_second_moment(k) - k.sigma * k.sigma * d2;
      if (std::abs(scaled) > 1e-10) moment.fail("sigma scaling off by " + sci(scaled));

      const std::array<AxisBounds, 2> b{AxisBounds{0.0, 2.0}, AxisBounds{0.0, 2.0}};
      const std::array<std::size_t, 2> counts{24, 24};
      const Grid grid = Grid::uniform(std::span(b.data(), static_cast<std::size_t>(dim)),
                                      std::span(counts.data(), static_cast<std::size_t>(dim)));
      const NondegeneracyWitness w = nondegeneracy(k, grid);
      double sym = 0.0;
      for (int s = 0; s < 200; ++s) {
        const Point x{uniform(rng, -2.0, 2.0), dim == 2 ? uniform(rng, -2.0, 2.0) : 0.0};
        const Point y{uniform(rng, -2.0, 2.0), dim == 2 ? uniform(rng, -2.0, 2.0) : 0.0};
        const double kxy = eval_kernel(k, x, y);
        sym = std::max(sym, std::abs(kxy - eval_kernel(k, y, x)));
        const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
        const bool upper_ok = kxy <= (dist <= w.r0 * (1.0 + 1e-12) ? w.C0 : 0.0) * (1.0 + 1e-12);
        const bool lower_ok = kxy >= (dist <= w.r1 ? w.c0 : 0.0) * (1.0 - 1e-12);
        if (!upper_ok || !lower_ok || !(w.r1 <= w.r0) || !(w.c0 > 0.0)) {
          witness.fail(std::string(to_string(k.family)) + " witness fails at distance " + sci(dist));
        }
      }
      witness.observe(0.0);
      symmetric.observe(sym);
      if (sym != 0.0) symmetric.fail("asymmetry " + sci(sym));
    }
  }
  KernelSpec slow;
  slow.variant = KernelVariant::slow_decay_1d;
  slow.amplitude = 0.5;
  slow.alpha = 2.0;
  slow.truncation = 50.0;
  for (int s = 0; s < 200; ++s) {
    const Point x{uniform(rng, -60.0, 60.0), 0.0};
    const Point y{uniform(rng, -60.0, 60.0), 0.0};
    const double d = std::abs(eval_kernel(slow, x, y) - eval_kernel(slow, y, x));
    symmetric.observe(d);
    if (d != 0.0) symmetric.fail("slow-decay asymmetry " + sci(d));
  }
  out.checks.push_back(mass.done("max mass error"));
  out.checks.push_back(moment.done("max moment error"));
  out.checks.push_back(symmetric.done("max asymmetry"));
  out.checks.push_back(witness.done("violations"));
  return out;
}

}  // namespace nlspec
