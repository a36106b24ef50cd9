#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlspec/grid.hpp"

namespace nlspec {

enum class CoefficientFamily { constant, cosine_bump, gaussian_bump, power_cusp, piecewise, tabulated };

std::string_view to_string(CoefficientFamily f);
std::optional<CoefficientFamily> coefficient_family_from_string(std::string_view s);

/// Pointwise definition of a zeroth-order field a(x).
///
/// With r = |x/s - center| (s = domain_scale) the families are
///   constant        value
///   cosine_bump     offset + amplitude * cos(2 pi frequency min(r, support))
///   gaussian_bump   offset + amplitude * exp(-r^2 / (2 width^2))
///   power_cusp      nu - r^beta
///   piecewise       linear interpolation through (knots, values) along the
///                   first axis, constant beyond the end knots
///   tabulated       explicit node values; only usable on a grid of equal size
struct CoefficientSpec {
  CoefficientFamily family = CoefficientFamily::constant;
  double value = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  double offset = 0.0;
  double width = 1.0;
  double support = std::numeric_limits<double>::infinity();
  double nu = 1.0;
  double beta = 1.0;
  Point center{0.0, 0.0};
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<double> table;
  /// Declared Hölder exponent in (0, 1]; family default when empty.
  std::optional<double> holder;
  /// Evaluates a(x / domain_scale); used by the scaled-domain operator.
  double domain_scale = 1.0;

  bool operator==(const CoefficientSpec&) const = default;

  static CoefficientSpec constant_value(double v);
};

/// Throws InvalidArgument when the parameters are outside the family's range.
void validate(const CoefficientSpec& spec);

/// Evaluates a pointwise family. Tabulated fields throw.
double evaluate(const CoefficientSpec& spec, const Point& x);

/// Hölder exponent: the declared one, else min(beta, 1) for power_cusp and 1
/// for the smooth or Lipschitz families.
double holder_exponent(const CoefficientSpec& spec);

/// A coefficient sampled on the nodes of a grid.
class Coefficient {
 public:
  static Coefficient sample(const CoefficientSpec& spec, const Grid& grid);

  /// Raw node values, e.g. for perturbation studies.
  static Coefficient from_values(std::vector<double> values, double holder = 1.0);

  const CoefficientSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Maximum over the nodes.
  double sup() const { return sup_; }
  double sup_abs() const;
  double holder() const { return holder_; }

  /// a + c, node by node.
  Coefficient shifted(double c) const;

 private:
  Coefficient() = default;
  void finish();

  CoefficientSpec spec_;
  std::vector<double> values_;
  double sup_ = 0.0;
  double holder_ = 1.0;
};

}  // namespace nlspec
