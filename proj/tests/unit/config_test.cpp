#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "nlspec/config.hpp"

namespace nlspec {
namespace {

bool has_error(const ParseOutcome& o, const std::string& needle, int line = -1) {
  return std::any_of(o.errors.begin(), o.errors.end(), [&](const ConfigIssue& e) {
    return e.message.find(needle) != std::string::npos && (line < 0 || e.line == line);
  });
}

TEST(Config, MinimalEigGetsDefaults) {
  const auto o = parse_config(R"(kind = "eig"
[grid]
nodes = [64]
[kernel]
sigma = 0.5
[coefficient]
family = "cosine_bump"
amplitude = 0.3
)");
  ASSERT_TRUE(o.ok()) << (o.errors.empty() ? "" : format_issue(o.errors[0]));
  const auto& c = *o.config;
  EXPECT_EQ(c.kind, ExperimentKind::eig);
  EXPECT_EQ(c.grid.dimension, 1);
  EXPECT_EQ(c.grid.lower, std::vector<double>{0.0});
  EXPECT_EQ(c.solver.tol, 1e-10);
  EXPECT_EQ(c.variant, OperatorVariant::L_plus_a);
  EXPECT_EQ(c.kernel.family, KernelFamily::uniform);
  EXPECT_EQ(c.coefficient.amplitude, 0.3);
  EXPECT_EQ(solver_options(c).tol, 1e-10);
  EXPECT_EQ(make_grid(c.grid).size(), 64u);
}

TEST(Config, MOutOfRange) {
  const auto o = parse_config("kind = \"eig\"\n[kernel]\nm = 2.5\n");
  EXPECT_FALSE(o.ok());
  EXPECT_TRUE(has_error(o, "m must lie in [0,2]", 3));
}

TEST(Config, ResolutionRuleNamed) {
  const auto o = parse_config("kind = \"eig\"\n[grid]\nnodes = [16]\n[kernel]\nsigma = 0.1\n");
  ASSERT_FALSE(o.ok());
  EXPECT_TRUE(has_error(o, "resolution rule"));
}

TEST(Config, ErrorsAreCollectedNotFailFast) {
  const auto o = parse_config(R"(kind = "eig"
bogus = 1
[kernel]
m = 2.5
sigma = "wide"
[solver]
tol = -1.0
[nowhere]
x = 1
)");
  EXPECT_FALSE(o.ok());
  EXPECT_TRUE(has_error(o, "bogus", 2));
  EXPECT_TRUE(has_error(o, "m must lie in [0,2]", 4));
  EXPECT_TRUE(has_error(o, "sigma", 5));
  EXPECT_TRUE(has_error(o, "tol", 7));
  EXPECT_TRUE(has_error(o, "nowhere", 8));
  for (std::size_t i = 1; i < o.errors.size(); ++i) EXPECT_LE(o.errors[i - 1].line, o.errors[i].line);
}

TEST(Config, SyntaxErrorsCarryLines) {
  const auto o = parse_config("kind = \"eig\"\n[grid\nnodes = [4, \n");
  EXPECT_FALSE(o.ok());
  EXPECT_TRUE(std::any_of(o.errors.begin(), o.errors.end(), [](const ConfigIssue& e) { return e.line == 2; }));
  EXPECT_EQ(format_issue({7, "boom"}), "line 7: boom");
}

TEST(Config, KindFromCommandLine) {
  const std::string body = "[sweep]\nsigmas = [0.2, 0.1, 0.05]\n";
  const auto o = parse_config(body, ExperimentKind::sweep);
  ASSERT_TRUE(o.ok());
  EXPECT_EQ(o.config->kind, ExperimentKind::sweep);
  const auto clash = parse_config("kind = \"eig\"\n" + body, ExperimentKind::sweep);
  EXPECT_FALSE(clash.ok());
}

TEST(Config, SweepListChecks) {
  EXPECT_FALSE(parse_config("kind = \"sweep\"\n[sweep]\nsigmas = [0.1, 0.2, 0.15]\n").ok());
  EXPECT_FALSE(parse_config("kind = \"sweep\"\n[sweep]\nsigmas = [0.1]\nm = [0.0, 3.0]\n").ok());
  EXPECT_FALSE(parse_config("kind = \"sweep\"\n[sweep]\nsigmas = [0.1, 0.2]\nnodes_per_radius = 4.0\n").ok());
  EXPECT_TRUE(parse_config("kind = \"sweep\"\n[sweep]\nsigmas = [0.4, 0.2]\ntarget = \"lambda1\"\n").ok());
}

TEST(Config, CommentsStringsAndInfinity) {
  const auto o = parse_config(R"(# leading comment
kind = "eig"   # trailing
output = "out dir/with \"quotes\""
[grid]
nodes = [32]
[kernel]
variant = "slow_decay_1d"
truncation = inf
alpha = 4
)");
  ASSERT_TRUE(o.ok()) << format_issue(o.errors.front());
  EXPECT_EQ(o.config->output, "out dir/with \"quotes\"");
  EXPECT_TRUE(std::isinf(o.config->kernel.truncation));
  EXPECT_EQ(o.config->kernel.alpha, 4.0);
}

TEST(Config, RoundTrip) {
  std::vector<ExperimentConfig> samples;
  {
    ExperimentConfig c;
    samples.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::sweep;
    c.seed = 17;
    c.output = "a\\b \"c\"";
    c.kernel.family = KernelFamily::quartic;
    c.kernel.m = 2.0;
    c.kernel.radius = 0.1 + 0.2;
    c.coefficient.family = CoefficientFamily::cosine_bump;
    c.coefficient.amplitude = 1.0 / 3.0;
    c.coefficient.center = {0.5, 0.0};
    c.coefficient.holder = 0.5;
    c.variant = OperatorVariant::M_plus_a;
    c.sweep.sigmas = {0.2, 0.1, 0.05, 0.025};
    c.sweep.m = {0.0, 1.0, 2.0};
    c.sweep.target = LimitTarget::lambda1;
    c.sweep.order = 2;
    c.solver.tol = 1e-12;
    c.solver.max_iter = 12345;
    samples.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::exhaust;
    c.kernel.variant = KernelVariant::slow_decay_1d;
    c.kernel.alpha = 2.0;
    c.kernel.truncation = 50.0;
    c.kernel.amplitude = 0.5;
    c.coefficient.family = CoefficientFamily::piecewise;
    c.coefficient.knots = {-1.0, 0.0, 1.0};
    c.coefficient.values = {0.0, 1.0, 0.0};
    c.exhaust.half_widths = {5, 10, 20};
    c.exhaust.h = 0.25;
    c.exhaust.lambda_v = true;
    samples.push_back(c);
  }
  {
    ExperimentConfig c;
    c.kind = ExperimentKind::invariance;
    c.grid.dimension = 2;
    c.grid.lower = {0.0, -1.0};
    c.grid.upper = {1.0, 1.0};
    c.grid.nodes = {16, 32};
    c.kernel.dimension = 2;
    c.kernel.variant = KernelVariant::general;
    c.kernel.modulation_g = CoefficientSpec::constant_value(1.5);
    c.kernel.modulation_h.family = CoefficientFamily::gaussian_bump;
    c.kernel.modulation_h.offset = 1.0;
    c.invariance.factors = {0.25, 7.0};
    samples.push_back(c);
  }
  for (const auto& c : samples) {
    const std::string text = render_config(c);
    const auto o = parse_config(text);
    ASSERT_TRUE(o.ok()) << text << "\n" << format_issue(o.errors.front());
    EXPECT_TRUE(*o.config == c) << text;
    EXPECT_EQ(render_config(*o.config), text);
  }
}

TEST(Config, TabulatedNeedsOneValuePerNode) {
  const auto o = parse_config(R"(kind = "eig"
[grid]
nodes = [4]
[kernel]
sigma = 8.0
[coefficient]
family = "tabulated"
table = [1.0, 2.0, 3.0]
)");
  EXPECT_FALSE(o.ok());
  EXPECT_TRUE(has_error(o, "table"));
}

}  // namespace
}  // namespace nlspec
