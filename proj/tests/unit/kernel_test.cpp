#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nlspec/coefficient.hpp"
#include "nlspec/error.hpp"
#include "nlspec/kernel.hpp"
#include "oracles.hpp"

namespace nlspec {
namespace {

constexpr KernelFamily kFamilies[] = {KernelFamily::uniform, KernelFamily::triangle, KernelFamily::epanechnikov,
                                      KernelFamily::quartic};

KernelSpec conv(KernelFamily f, double sigma = 1.0, int dim = 1, double radius = 1.0) {
  KernelSpec k;
  k.family = f;
  k.sigma = sigma;
  k.dimension = dim;
  k.radius = radius;
  return k;
}

Grid line(double lo, double hi, std::size_t n) {
  const std::array<AxisBounds, 1> b{AxisBounds{lo, hi}};
  const std::array<std::size_t, 1> c{n};
  return Grid::uniform(b, c);
}

TEST(Kernel, UniformPointValues) {
  EXPECT_DOUBLE_EQ(eval_kernel(conv(KernelFamily::uniform, 1.0), {0.3, 0}, {0.3, 0}), 0.5);
  EXPECT_DOUBLE_EQ(eval_kernel(conv(KernelFamily::uniform, 0.5), {0.3, 0}, {0.3, 0}), 1.0);
  EXPECT_EQ(eval_kernel(conv(KernelFamily::uniform, 1.0), {0.0, 0}, {1.5, 0}), 0.0);
}

TEST(Kernel, UnitMassByQuadrature) {
  for (KernelFamily f : kFamilies) {
    const KernelSpec k1 = conv(f, 1.0, 1, 0.7);
    const double m1 = oracle::midpoint([&](double z) { return density(k1, {z, 0}); }, -0.7, 0.7, 200000);
    EXPECT_NEAR(m1, 1.0, 1e-8) << to_string(f);

    // 2-D: radial integral 2 pi int rho J(rho) d rho
    const KernelSpec k2 = conv(f, 1.0, 2, 0.7);
    const double m2 = oracle::midpoint(
        [&](double r) { return 2.0 * std::numbers::pi * r * density(k2, {r, 0}); }, 0.0, 0.7, 200000);
    EXPECT_NEAR(m2, 1.0, 1e-8) << to_string(f);
  }
}

TEST(Kernel, SecondMomentClosedForms) {
  EXPECT_NEAR(second_moment(conv(KernelFamily::uniform)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(second_moment(conv(KernelFamily::triangle)), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(second_moment(conv(KernelFamily::uniform, 1.0, 2)), 0.5, 1e-15);
}

TEST(Kernel, SecondMomentMatchesQuadrature) {
  for (KernelFamily f : kFamilies) {
    for (int dim : {1, 2}) {
      const KernelSpec k = conv(f, 1.0, dim, 1.3);
      const double q =
          dim == 1
              ? oracle::midpoint([&](double z) { return z * z * density(k, {z, 0}); }, -1.3, 1.3, 200000)
              : oracle::midpoint(
                    [&](double r) { return 2.0 * std::numbers::pi * r * r * r * density(k, {r, 0}); }, 0.0, 1.3,
                    200000);
      EXPECT_NEAR(second_moment(k), q, 1e-8) << to_string(f) << " N=" << dim;
    }
  }
}

TEST(Kernel, ScaledSecondMomentIsSigmaSquared) {
  for (KernelFamily f : kFamilies) {
    for (double sigma : {0.1, 0.5, 3.0}) {
      const KernelSpec k = conv(f, sigma);
      const double q = oracle::midpoint(
          [&](double z) { return z * z * eval_kernel(k, {z, 0}, {0, 0}); }, -sigma, sigma, 200000);
      EXPECT_NEAR(scaled_second_moment(k), sigma * sigma * second_moment(k), 1e-15);
      EXPECT_NEAR(q, sigma * sigma * second_moment(k), 1e-10 * std::max(1.0, sigma * sigma));
    }
  }
}

TEST(Kernel, EvenAndSymmetric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (KernelFamily f : kFamilies) {
    const KernelSpec k = conv(f, 0.8);
    KernelSpec k2 = conv(f, 0.8, 2);
    for (int t = 0; t < 200; ++t) {
      const Point x{u(rng), u(rng)}, y{u(rng), u(rng)};
      EXPECT_EQ(eval_kernel(k, x, y), eval_kernel(k, y, x));
      EXPECT_EQ(eval_kernel(k2, x, y), eval_kernel(k2, y, x));
      EXPECT_EQ(density(k, {x[0], 0}), density(k, {-x[0], 0}));
    }
  }
  KernelSpec s;
  s.variant = KernelVariant::slow_decay_1d;
  s.truncation = 5.0;
  for (int t = 0; t < 100; ++t) {
    const Point x{5 * u(rng), 0}, y{5 * u(rng), 0};
    EXPECT_EQ(eval_kernel(s, x, y), eval_kernel(s, y, x));
  }
}

TEST(Kernel, UniformEdgeTakesHalfValue) {
  EXPECT_DOUBLE_EQ(profile(KernelFamily::uniform, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(profile(KernelFamily::uniform, 0.999), 1.0);
  EXPECT_EQ(profile(KernelFamily::uniform, 1.001), 0.0);
  EXPECT_EQ(profile(KernelFamily::triangle, 1.0), 0.0);
}

TEST(Kernel, MassInteriorBoundaryAndEscaping) {
  const KernelSpec k = conv(KernelFamily::uniform, 0.1);
  const Grid g = line(0.0, 1.0, 160);  // h = sigma / 16
  EXPECT_NEAR(kernel_mass(k, g, {0.5, 0}), 1.0, 1e-3);

  // boundary node: brute-force integral of K over [0, 1]
  const Point left = g.node(0);
  const double ref = oracle::midpoint([&](double y) { return eval_kernel(k, left, {y, 0}); }, 0.0, 1.0, 400000);
  EXPECT_NEAR(kernel_mass(k, g, left), ref, 1e-3);
  EXPECT_NEAR(ref, 0.5 + g.spacing() / 2 / 0.2, 1e-4);

  const KernelSpec wide = conv(KernelFamily::uniform, 3.0);
  EXPECT_LT(kernel_mass(wide, g, {0.5, 0}), 1.0);
}

TEST(Kernel, MassQuadratureConvergesQuadratically) {
  // support edges 0.5 +- 0.25 fall on cell edges at every level, so the
  // derivative jump of the profile sits at the same relative position
  const KernelSpec k = conv(KernelFamily::epanechnikov, 0.25);
  std::vector<double> err;
  for (std::size_t n : {64u, 128u, 256u, 512u}) err.push_back(std::abs(kernel_mass(k, line(0.0, 1.0, n), {0.5, 0}) - 1.0));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    EXPECT_GE(ratio, 3.0) << i;
    EXPECT_LE(ratio, 5.0) << i;
  }
}

TEST(Kernel, SlowDecayMomentMatchesQuadrature) {
  KernelSpec s;
  s.variant = KernelVariant::slow_decay_1d;
  s.amplitude = 0.5;
  s.alpha = 2.0;
  s.truncation = 50.0;
  const double q = oracle::midpoint([&](double z) { return z * z * eval_kernel(s, {z, 0}, {0, 0}); }, -50, 50, 2000000);
  EXPECT_NEAR(second_moment(s) / q, 1.0, 1e-8);

  s.truncation = INFINITY;
  s.alpha = 4.0;
  EXPECT_NEAR(second_moment(s), 4.0 * 0.5 / (3.0 * 2.0 * 1.0), 1e-14);
  s.alpha = 2.5;
  EXPECT_THROW(second_moment(s), InvalidArgument);
}

TEST(Kernel, NondegeneracyWitnessHoldsOnSamples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid g = line(0.0, 1.0, 64);
  std::vector<KernelSpec> specs;
  for (KernelFamily f : kFamilies) specs.push_back(conv(f, 0.3));
  KernelSpec drift = conv(KernelFamily::triangle, 0.3);
  drift.drift = 0.1;
  specs.push_back(drift);
  KernelSpec gen = conv(KernelFamily::epanechnikov, 1.0, 1, 0.4);
  gen.variant = KernelVariant::general;
  gen.modulation_g = CoefficientSpec::constant_value(1.5);
  gen.modulation_h.family = CoefficientFamily::cosine_bump;
  gen.modulation_h.offset = 1.0;
  gen.modulation_h.amplitude = 0.3;
  specs.push_back(gen);
  KernelSpec slow;
  slow.variant = KernelVariant::slow_decay_1d;
  slow.truncation = 0.6;
  specs.push_back(slow);

  for (const auto& k : specs) {
    const NondegeneracyWitness w = nondegeneracy(k, g);
    ASSERT_GT(w.c0, 0.0) << describe(k);
    ASSERT_LE(w.r1, w.r0) << describe(k);
    for (int t = 0; t < 2000; ++t) {
      const Point x = g.node(static_cast<std::size_t>(u(rng) * 64));
      const Point y = g.node(static_cast<std::size_t>(u(rng) * 64));
      const double kv = eval_kernel(k, x, y);
      const double d = std::abs(x[0] - y[0]);
      EXPECT_LE(kv, (d <= w.r0 ? w.C0 : 0.0) + 1e-12) << describe(k);
      if (d <= w.r1) EXPECT_GE(kv, w.c0 - 1e-12) << describe(k);
    }
  }
}

TEST(Kernel, DriftShiftsTheDensity) {
  KernelSpec k = conv(KernelFamily::uniform, 1.0);
  k.drift = 0.5;
  EXPECT_DOUBLE_EQ(eval_kernel(k, {1.4, 0}, {0.0, 0}), 0.5);
  EXPECT_EQ(eval_kernel(k, {-0.6, 0}, {0.0, 0}), 0.0);
  EXPECT_THROW(second_moment(k), InvalidArgument);
}

TEST(Kernel, ValidationRejectsOutOfRange) {
  KernelSpec k = conv(KernelFamily::uniform);
  k.m = 2.5;
  EXPECT_THROW(validate(k), InvalidArgument);
  k = conv(KernelFamily::uniform, -1.0);
  EXPECT_THROW(validate(k), InvalidArgument);
  k = conv(KernelFamily::uniform, 1.0, 2);
  k.drift = 0.1;
  EXPECT_THROW(validate(k), InvalidArgument);
  KernelSpec s;
  s.variant = KernelVariant::slow_decay_1d;
  s.alpha = 1.2;
  EXPECT_THROW(validate(s), InvalidArgument);
}

TEST(Kernel, NamesRoundTrip) {
  for (KernelFamily f : kFamilies) EXPECT_EQ(kernel_family_from_string(to_string(f)), f);
  for (KernelVariant v : {KernelVariant::convolution, KernelVariant::general, KernelVariant::slow_decay_1d})
    EXPECT_EQ(kernel_variant_from_string(to_string(v)), v);
  EXPECT_FALSE(kernel_family_from_string("gaussian"));
}

TEST(Coefficient, FamiliesEvaluate) {
  CoefficientSpec c;
  c.family = CoefficientFamily::cosine_bump;
  c.amplitude = 2.0;
  c.frequency = 1.0;
  EXPECT_NEAR(evaluate(c, {0.25, 0}), 0.0, 1e-15);
  EXPECT_NEAR(evaluate(c, {0.5, 0}), -2.0, 1e-15);
  c.support = 0.25;
  EXPECT_NEAR(evaluate(c, {0.9, 0}), 0.0, 1e-15);

  CoefficientSpec cusp;
  cusp.family = CoefficientFamily::power_cusp;
  cusp.nu = 1.0;
  cusp.beta = 0.5;
  EXPECT_DOUBLE_EQ(evaluate(cusp, {0.25, 0}), 0.5);
  EXPECT_DOUBLE_EQ(holder_exponent(cusp), 0.5);
  cusp.beta = 2.0;
  EXPECT_DOUBLE_EQ(holder_exponent(cusp), 1.0);

  CoefficientSpec pw;
  pw.family = CoefficientFamily::piecewise;
  pw.knots = {0.0, 1.0};
  pw.values = {1.0, 3.0};
  EXPECT_DOUBLE_EQ(evaluate(pw, {0.25, 0}), 1.5);
  EXPECT_DOUBLE_EQ(evaluate(pw, {-3.0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(pw, {3.0, 0}), 3.0);
}

TEST(Coefficient, SupIsMaxOverNodes) {
  CoefficientSpec c;
  c.family = CoefficientFamily::gaussian_bump;
  c.amplitude = 1.0;
  c.width = 0.1;
  c.center = {0.5, 0};
  const Grid g = line(0.0, 1.0, 10);
  const Coefficient a = Coefficient::sample(c, g);
  double m = -INFINITY;
  for (double v : a.values()) m = std::max(m, v);
  EXPECT_EQ(a.sup(), m);
  EXPECT_LT(a.sup(), 1.0);
  EXPECT_EQ(a.shifted(2.0).sup(), m + 2.0);
}

TEST(Coefficient, RejectsNonFiniteAndMismatchedTables) {
  EXPECT_THROW(Coefficient::from_values({1.0, NAN}), NonFiniteError);
  CoefficientSpec t;
  t.family = CoefficientFamily::tabulated;
  t.table = {1.0, 2.0};
  EXPECT_THROW(Coefficient::sample(t, line(0, 1, 3)), InvalidArgument);
  CoefficientSpec pw;
  pw.family = CoefficientFamily::piecewise;
  pw.knots = {0.0, 0.0};
  pw.values = {1.0, 2.0};
  EXPECT_THROW(validate(pw), InvalidArgument);
}

}  // namespace
}  // namespace nlspec
