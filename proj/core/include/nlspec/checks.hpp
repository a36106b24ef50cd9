#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nlspec/assembly.hpp"
#include "nlspec/coefficient.hpp"
#include "nlspec/experiments.hpp"
#include "nlspec/grid.hpp"
#include "nlspec/kernel.hpp"
#include "nlspec/spectral.hpp"

namespace nlspec {

/// A resolved 1-D operator instance with a symmetric kernel.
struct RandomInstance {
  Grid grid;
  KernelSpec kernel;
  CoefficientSpec coefficient;
  OperatorVariant variant;
};

/// Draws a random instance with at most max_nodes nodes that satisfies the
/// resolution rule. Coefficients are smooth or Lipschitz.
RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_nodes);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  /// Largest violation measure observed, or a failure description.
  std::string detail;
};

struct PropertySuiteOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 20;
  std::size_t max_nodes = 120;
  double tol = 1e-10;
};

struct PropertySuiteResult {
  std::vector<PropertyCheck> checks;
  /// One record per random instance of the sandwich check.
  std::vector<SweepRecord> records;

  bool passed() const;
};

/// Runs every invariant of the library on randomised and fixed instances,
/// comparing against dense eigendecompositions where an oracle is needed.
PropertySuiteResult run_property_suite(const PropertySuiteOptions& opts);

/// -max Re(eig(A)) from a dense general eigensolver.
double dense_lambda_p(const DiscreteOperator& op);

}  // namespace nlspec
