#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nlspec/assembly.hpp"
#include "nlspec/error.hpp"
#include "nlspec/spectral.hpp"
#include "oracles.hpp"

namespace nlspec {
namespace {

Grid line(double lo, double hi, std::size_t n) {
  const std::array<AxisBounds, 1> b{AxisBounds{lo, hi}};
  const std::array<std::size_t, 1> c{n};
  return Grid::uniform(b, c);
}

KernelSpec kernel(KernelFamily f, double sigma, double m = 0.0) {
  KernelSpec k;
  k.family = f;
  k.sigma = sigma;
  k.m = m;
  return k;
}

CoefficientSpec bump(double amp = 1.0) {
  CoefficientSpec c;
  c.family = CoefficientFamily::cosine_bump;
  c.amplitude = amp;
  c.frequency = 0.5;
  c.center = {0.5, 0};
  return c;
}

DiscreteOperator random_symmetric(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd k = oracle::random_nonnegative(rng, n, 0.6);
  k = (0.5 * (k + k.transpose())).eval();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] = u(rng);
    k(i, i) += a[static_cast<std::size_t>(i)];
  }
  return DiscreteOperator::from_matrix(k, a);
}

TEST(PrincipalEig, TwoByTwoSwap) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  const auto r = principal_eig(DiscreteOperator::from_matrix(a));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.lambda_p, -1.0, 1e-12);
  EXPECT_NEAR(r.eigvec[0], 1.0 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(r.eigvec[1], 1.0 / std::sqrt(2.0), 1e-10);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(PrincipalEig, ConstantShiftCovariance) {
  const Grid g = line(0.0, 1.0, 64);
  const KernelSpec k = kernel(KernelFamily::triangle, 0.3);
  const auto zero = Coefficient::sample(CoefficientSpec::constant_value(0.0), g);
  const auto l0 = principal_eig(assemble(g, k, zero, OperatorVariant::L_plus_a)).lambda_p;
  const auto l1 = principal_eig(assemble(g, k, zero.shifted(0.75), OperatorVariant::L_plus_a)).lambda_p;
  EXPECT_NEAR(l1, l0 - 0.75, 1e-9);
}

TEST(PrincipalEig, RandomSymmetricAgainstDenseOracle) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto op = random_symmetric(rng, 50);
    const auto r = principal_eig(op);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.lambda_p, oracle::perron_lambda(op.matrix()), 1e-9);
    EXPECT_LE(r.cw_lower, r.lambda_p);
    EXPECT_LE(r.lambda_p, r.cw_upper);
    EXPECT_LE(r.cw_upper - r.cw_lower, 1e-9);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_TRUE((r.eigvec.array() > 0).all());
  }
}

TEST(PrincipalEig, NonSymmetricDriftAgainstOracle) {
  const Grid g = line(0.0, 1.0, 96);
  KernelSpec k = kernel(KernelFamily::epanechnikov, 0.25);
  k.drift = 0.1;
  const auto op = assemble(g, k, Coefficient::sample(bump(), g), OperatorVariant::L_plus_a);
  EXPECT_FALSE(op.symmetric());
  const auto r = principal_eig(op);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.lambda_p, oracle::perron_lambda(op.matrix()), 1e-9);
  EXPECT_FALSE(r.lambda_v.has_value());
}

TEST(PrincipalEig, EverySandwichBracketsTheFinalValue) {
  const Grid g = line(0.0, 1.0, 120);
  const auto op = assemble(g, kernel(KernelFamily::uniform, 0.2, 2.0), Coefficient::sample(bump(), g),
                           OperatorVariant::M_plus_a);
  SolverOptions o;
  o.record_history = true;
  const auto r = principal_eig(op, o);
  ASSERT_FALSE(r.history.empty());
  for (const auto& h : r.history) {
    EXPECT_LE(h.lower, r.lambda_p);
    EXPECT_GE(h.upper, r.lambda_p);
  }
  EXPECT_EQ(r.lambda_p_prime(), r.lambda_p);
  EXPECT_EQ(r.lambda_p_double_prime(), r.lambda_p);
}

TEST(PrincipalEig, WeightedUnitNorm) {
  const Grid g = line(0.0, 2.0, 50);
  const auto op = assemble(g, kernel(KernelFamily::quartic, 0.5), Coefficient::sample(bump(), g),
                           OperatorVariant::L_plus_a);
  const auto r = principal_eig(op);
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.eigvec.size(); ++i) s += g.weights()[static_cast<std::size_t>(i)] * r.eigvec[i] * r.eigvec[i];
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(PrincipalEig, NonConvergenceIsFlagged) {
  const Grid g = line(0.0, 1.0, 64);
  const auto op = assemble(g, kernel(KernelFamily::uniform, 0.2, 2.0), Coefficient::sample(bump(), g),
                           OperatorVariant::M_plus_a);
  SolverOptions o;
  o.max_iter = 3;
  const auto r = principal_eig(op, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_LE(r.cw_lower, r.lambda_p);
  EXPECT_LE(r.lambda_p, r.cw_upper);
}

TEST(PrincipalEig, DisconnectedSupportTakesLargestPerronValue) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 1) = a(1, 0) = 1.0;
  a(2, 3) = a(3, 2) = 2.0;
  const auto r = principal_eig(DiscreteOperator::from_matrix(a));
  EXPECT_NEAR(r.lambda_p, -2.0, 1e-10);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.eigvec[0], 0.0);
  EXPECT_GT(r.eigvec[2], 0.0);
}

TEST(CwBounds, PerronVectorAndOnes) {
  std::mt19937_64 rng(9);
  const auto op = random_symmetric(rng, 30);
  const auto r = principal_eig(op);
  const CwBounds at = cw_bounds(op, r.eigvec);
  EXPECT_NEAR(at.lower, r.lambda_p, 1e-9);
  EXPECT_NEAR(at.upper, r.lambda_p, 1e-9);

  const CwBounds ones = cw_bounds(op, Eigen::VectorXd::Ones(30));
  const double oracle_lambda = oracle::perron_lambda(op.matrix());
  EXPECT_LE(ones.lower, oracle_lambda);
  EXPECT_GE(ones.upper, oracle_lambda);

  const Grid g = line(0.0, 1.0, 40);
  const auto k0 = assemble(g, kernel(KernelFamily::uniform, 0.3), Coefficient::sample(CoefficientSpec::constant_value(0.0), g),
                           OperatorVariant::L_plus_a);
  const Eigen::VectorXd rows = k0.matrix().rowwise().sum();
  const CwBounds b = cw_bounds(k0, Eigen::VectorXd::Ones(40));
  EXPECT_DOUBLE_EQ(b.lower, -rows.maxCoeff());
  EXPECT_DOUBLE_EQ(b.upper, -rows.minCoeff());

  Eigen::VectorXd bad = Eigen::VectorXd::Ones(40);
  bad[3] = 0.0;
  EXPECT_THROW(cw_bounds(k0, bad), InvalidArgument);
}

TEST(LambdaV, QuadraticFormIdentities) {
  const Grid g = line(0.0, 1.0, 80);
  const double sigma = 0.3, m = 1.0;
  const auto op = assemble(g, kernel(KernelFamily::triangle, sigma, m), Coefficient::sample(bump(), g),
                           OperatorVariant::M_plus_a);
  const auto r = principal_eig(op);
  EXPECT_NEAR(lambda_v_quadratic(op, r.eigvec), r.lambda_p, 1e-10);
  ASSERT_TRUE(r.lambda_v.has_value());

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd phi(80);
    for (auto& x : phi) x = n01(rng);
    EXPECT_GE(lambda_v_quadratic(op, phi), r.lambda_p - 1e-10);
  }

  const auto z = assemble(g, kernel(KernelFamily::triangle, sigma, m),
                          Coefficient::sample(CoefficientSpec::constant_value(0.0), g), OperatorVariant::M_plus_a);
  double mean_p = 0.0;
  for (std::size_t i = 0; i < 80; ++i) mean_p += g.weights()[i] * z.row_mass()[i];
  // row_mass includes the sigma^-m prefactor
  const double expected = std::pow(sigma, -m) - mean_p;
  EXPECT_NEAR(lambda_v_quadratic(z, Eigen::VectorXd::Ones(80)), expected, 1e-12);
}

TEST(LambdaV, MinimumMatchesPrincipalEigAndOracle) {
  const Grid g = line(0.0, 1.0, 64);
  const auto op = assemble(g, kernel(KernelFamily::uniform, 0.25, 2.0), Coefficient::sample(bump(2.0), g),
                           OperatorVariant::M_plus_a);
  const auto v = lambda_v_min(op);
  ASSERT_TRUE(v.converged);
  EXPECT_NEAR(v.lambda_v, principal_eig(op).lambda_p, 1e-8);

  std::mt19937_64 rng(40);
  const auto r = random_symmetric(rng, 40);
  EXPECT_NEAR(lambda_v_min(r).lambda_v, oracle::symmetric_lambda(r), 1e-9);

  const auto zero = DiscreteOperator::from_matrix(Eigen::MatrixXd::Zero(5, 5));
  EXPECT_NEAR(lambda_v_min(zero).lambda_v, 0.0, 1e-14);
}

TEST(LambdaV, RejectsNonSymmetric) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 2, 1, 0;
  EXPECT_THROW(lambda_v_min(DiscreteOperator::from_matrix(a)), InvalidArgument);
  EXPECT_THROW(lambda_v_quadratic(DiscreteOperator::from_matrix(a), Eigen::VectorXd::Ones(2)), InvalidArgument);
}

TEST(BoundsIv, Examples) {
  const auto diag = DiscreteOperator::from_matrix(5.0 * Eigen::MatrixXd::Identity(3, 3), {5.0, 5.0, 5.0});
  const CwBounds d = bounds_iv(diag);
  EXPECT_DOUBLE_EQ(d.lower, -5.0);
  EXPECT_DOUBLE_EQ(d.upper, -5.0);
  EXPECT_NEAR(principal_eig(diag).lambda_p, -5.0, 1e-12);

  const Grid g = line(0.0, 1.0, 160);
  const auto l = assemble(g, kernel(KernelFamily::uniform, 0.1), Coefficient::sample(CoefficientSpec::constant_value(0.0), g),
                          OperatorVariant::L_plus_a);
  const CwBounds b = bounds_iv(l);
  EXPECT_NEAR(b.lower, -1.0, 1e-12);
  EXPECT_EQ(b.upper, 0.0);

  const auto m = assemble(g, kernel(KernelFamily::uniform, 50.0, 0.0),
                          Coefficient::sample(CoefficientSpec::constant_value(0.0), g), OperatorVariant::M_plus_a);
  double pmax = 0.0;
  for (double p : m.row_mass()) pmax = std::max(pmax, p);
  const CwBounds bm = bounds_iv(m);
  EXPECT_NEAR(bm.lower, 1.0 - pmax, 1e-14);
  EXPECT_DOUBLE_EQ(bm.upper, 1.0);
  const double lp = principal_eig(m).lambda_p;
  // rank-one kernel: the bound is attained, so only roundoff separates them
  EXPECT_LE(bm.lower, lp + 1e-12);
  EXPECT_LE(lp, bm.upper + 1e-12);
}

TEST(Existence, MVariantSmallSigmaIsEigenpair) {
  const Grid g = line(0.0, 1.0, 320);
  const auto op = assemble(g, kernel(KernelFamily::uniform, 0.05, 2.0), Coefficient::sample(bump(), g),
                           OperatorVariant::M_plus_a);
  const auto r = principal_eig(op);
  EXPECT_EQ(r.existence, ExistenceVerdict::eigenpair);
  const ExistenceReport e = existence_check(r, op);
  EXPECT_EQ(e.verdict, ExistenceVerdict::eigenpair);
  EXPECT_NEAR(e.gap_tol, 10.0 * g.spacing() + 100e-10, 1e-15);
}

TEST(Existence, ConstantCoefficientIsEigenpair) {
  const Grid g = line(0.0, 1.0, 64);
  const auto op = assemble(g, kernel(KernelFamily::uniform, 1.0), Coefficient::sample(CoefficientSpec::constant_value(0.4), g),
                           OperatorVariant::L_plus_a);
  EXPECT_EQ(principal_eig(op).existence, ExistenceVerdict::eigenpair);
}

TEST(Existence, IntegrableCuspConcentrates) {
  KernelSpec k = kernel(KernelFamily::uniform, 4.0);
  CoefficientSpec cusp;
  cusp.family = CoefficientFamily::power_cusp;
  cusp.nu = 1.0;
  cusp.beta = 0.5;
  double prev = 1.0;
  for (std::size_t n : {64u, 256u}) {
    const Grid g = line(-1.0, 1.0, n);
    const auto op = assemble(g, k, Coefficient::sample(cusp, g), OperatorVariant::L_plus_a);
    const auto r = principal_eig(op);
    const double dense = oracle::symmetric_lambda(op);
    EXPECT_NEAR(r.lambda_p, dense, 1e-9);
    EXPECT_EQ(r.existence, ExistenceVerdict::boundary_case);
    EXPECT_LT(r.concentration_index, prev);
    prev = r.concentration_index;
  }
}

TEST(ParticipationRatio, Extremes) {
  EXPECT_DOUBLE_EQ(participation_ratio(Eigen::VectorXd::Ones(10)), 1.0);
  Eigen::VectorXd spike = Eigen::VectorXd::Zero(10);
  spike[4] = 3.0;
  EXPECT_DOUBLE_EQ(participation_ratio(spike), 0.1);
}

TEST(ExpTest, EvenKernelMinimumAtZero) {
  const KernelSpec k = kernel(KernelFamily::uniform, 1.0);
  const ExpTestBound b = exp_test_lower_bound(k, 0.0, 5.0);
  EXPECT_NEAR(b.bound, -1.0, 1e-12);
  EXPECT_NEAR(b.argmin, 0.0, 1e-6);
  EXPECT_TRUE(b.boundary_minimum);
}

TEST(ExpTest, MomentMatchesClosedForm) {
  KernelSpec k = kernel(KernelFamily::uniform, 1.0);
  k.drift = 0.5;
  for (double lam : {0.0, 0.3, 1.0, 4.0, 9.5})
    EXPECT_NEAR(exp_moment(k, lam), oracle::uniform_exp_moment(lam, 0.5, 1.0), 1e-13) << lam;
}

TEST(ExpTest, DriftQuarticMatchesGridSearch) {
  KernelSpec k = kernel(KernelFamily::quartic, 0.8);
  k.drift = 0.3;
  const ExpTestBound b = exp_test_lower_bound(k, 0.0, 8.0);
  // brute force: midpoint moment on a fine grid, scanned over lambda
  double best = INFINITY;
  for (int i = 0; i <= 4000; ++i) {
    const double lam = 8.0 * i / 4000;
    const double mom = oracle::midpoint(
        [&](double z) { return eval_kernel(k, {z, 0}, {0, 0}) * std::exp(-lam * z); }, 0.3 - 0.8, 0.3 + 0.8, 4000);
    best = std::min(best, mom);
  }
  EXPECT_GT(b.bound, -1.0);
  EXPECT_NEAR(b.bound, -best, 1e-6);
}

}  // namespace
}  // namespace nlspec
