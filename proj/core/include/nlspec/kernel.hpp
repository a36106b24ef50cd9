#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "nlspec/coefficient.hpp"
#include "nlspec/grid.hpp"

namespace nlspec {

enum class KernelVariant { convolution, general, slow_decay_1d };
enum class KernelFamily { uniform, triangle, epanechnikov, quartic };

std::string_view to_string(KernelVariant v);
std::string_view to_string(KernelFamily f);
std::optional<KernelVariant> kernel_variant_from_string(std::string_view s);
std::optional<KernelFamily> kernel_family_from_string(std::string_view s);

/// Dispersal kernel description.
///
/// convolution:   K(x,y) = sigma^-N J((x - y - drift) / sigma)
/// general:       K(x,y) = J((x - y) / (g(y) h(x)))
/// slow_decay_1d: K(x,y) = amplitude (1 + |x-y|)^-alpha for |x-y| <= truncation
///
/// J is one of the compactly supported, even, unit-mass radial families with
/// support radius `radius`. A domain_scale s != 1 evaluates the scaled kernel
/// s^-N K(x/s, y/s).
struct KernelSpec {
  KernelVariant variant = KernelVariant::convolution;
  KernelFamily family = KernelFamily::uniform;
  int dimension = 1;
  double radius = 1.0;
  double sigma = 1.0;
  double m = 0.0;
  /// Shift d of a 1-D drift kernel J(z - d). Only the drift lower bound and
  /// non-symmetric assembly use it.
  double drift = 0.0;
  double domain_scale = 1.0;
  CoefficientSpec modulation_g = CoefficientSpec::constant_value(1.0);
  CoefficientSpec modulation_h = CoefficientSpec::constant_value(1.0);
  double amplitude = 1.0;
  double alpha = 2.0;
  double truncation = std::numeric_limits<double>::infinity();

  bool operator==(const KernelSpec&) const = default;
};

/// Throws InvalidArgument for parameters outside their documented ranges.
void validate(const KernelSpec& k);

/// Short human-readable identifier, e.g. "convolution/uniform/r=1".
std::string describe(const KernelSpec& k);

/// Unnormalized radial profile on s = |z| / radius. The uniform family takes
/// the mean of its one-sided limits at s = 1.
double profile(KernelFamily f, double s);

/// Constant c such that c * profile(|z| / r) has unit mass on R^N.
double normalization(KernelFamily f, int dimension, double radius);

/// Unit-mass density J(z) of the family (no sigma scaling).
double density(const KernelSpec& k, const Point& z);

double eval_kernel(const KernelSpec& k, const Point& x, const Point& y);

/// D_2(J) = integral of J(z) |z|^2, from closed forms. Convolution kernels use
/// the unscaled J; slow_decay_1d uses the truncated tail.
double second_moment(const KernelSpec& k);

/// Second moment of J_sigma (including domain_scale), i.e. (sigma s)^2 D_2(J).
double scaled_second_moment(const KernelSpec& k);

/// Quadrature of K(x, .) over the grid.
double kernel_mass(const KernelSpec& k, const Grid& grid, const Point& x);

/// Radius beyond which K(x, .) vanishes; infinite for untruncated slow decay.
double interaction_radius(const KernelSpec& k, const Grid& grid);

/// Constants with C0 1_{B_r0} >= K >= c0 1_{B_r1}.
struct NondegeneracyWitness {
  double c0 = 0.0;
  double C0 = 0.0;
  double r0 = 0.0;
  double r1 = 0.0;
};

/// Witness constants; g and h bounds are taken over the grid nodes.
NondegeneracyWitness nondegeneracy(const KernelSpec& k, const Grid& grid);

}  // namespace nlspec
