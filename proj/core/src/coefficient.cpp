#include "nlspec/coefficient.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

constexpr std::array<std::pair<CoefficientFamily, std::string_view>, 6> kNames{{
    {CoefficientFamily::constant, "constant"},
    {CoefficientFamily::cosine_bump, "cosine_bump"},
    {CoefficientFamily::gaussian_bump, "gaussian_bump"},
    {CoefficientFamily::power_cusp, "power_cusp"},
    {CoefficientFamily::piecewise, "piecewise"},
    {CoefficientFamily::tabulated, "tabulated"},
}};

double radius_from_center(const CoefficientSpec& s, const Point& x) {
  const double dx = x[0] / s.domain_scale - s.center[0];
  const double dy = x[1] / s.domain_scale - s.center[1];
  return std::hypot(dx, dy);
}

}  // namespace

std::string_view to_string(CoefficientFamily f) {
  for (const auto& [fam, name] : kNames) {
    if (fam == f) return name;
  }
  return "unknown";
}

std::optional<CoefficientFamily> coefficient_family_from_string(std::string_view s) {
  for (const auto& [fam, name] : kNames) {
    if (name == s) return fam;
  }
  return std::nullopt;
}

CoefficientSpec CoefficientSpec::constant_value(double v) {
  CoefficientSpec s;
  s.family = CoefficientFamily::constant;
  s.value = v;
  return s;
}

void validate(const CoefficientSpec& s) {
  if (!(s.domain_scale > 0.0) || !std::isfinite(s.domain_scale)) {
    throw InvalidArgument("coefficient domain scale must be positive");
  }
  if (s.holder && !(*s.holder > 0.0 && *s.holder <= 1.0)) {
    throw InvalidArgument("declared Hölder exponent must lie in (0,1]");
  }
  switch (s.family) {
    case CoefficientFamily::constant:
      if (!std::isfinite(s.value)) throw InvalidArgument("constant coefficient must be finite");
      break;
    case CoefficientFamily::cosine_bump:
      if (!std::isfinite(s.amplitude) || !std::isfinite(s.frequency) || !std::isfinite(s.offset)) {
        throw InvalidArgument("cosine_bump parameters must be finite");
      }
      if (!(s.support > 0.0)) throw InvalidArgument("cosine_bump support must be positive");
      break;
    case CoefficientFamily::gaussian_bump:
      if (!(s.width > 0.0) || !std::isfinite(s.amplitude) || !std::isfinite(s.offset)) {
        throw InvalidArgument("gaussian_bump needs a positive width and finite amplitude");
      }
      break;
    case CoefficientFamily::power_cusp:
      if (!(s.beta > 0.0) || !std::isfinite(s.nu)) {
        throw InvalidArgument("power_cusp needs beta > 0 and finite nu");
      }
      break;
    case CoefficientFamily::piecewise:
      if (s.knots.size() < 2 || s.knots.size() != s.values.size()) {
        throw InvalidArgument("piecewise coefficient needs matching knots and values (at least 2)");
      }
      if (!std::is_sorted(s.knots.begin(), s.knots.end()) ||
          std::adjacent_find(s.knots.begin(), s.knots.end()) != s.knots.end()) {
        throw InvalidArgument("piecewise knots must be strictly increasing");
      }
      break;
    case CoefficientFamily::tabulated:
      if (s.table.empty()) throw InvalidArgument("tabulated coefficient has no values");
      break;
  }
}

double evaluate(const CoefficientSpec& s, const Point& x) {
  switch (s.family) {
    case CoefficientFamily::constant:
      return s.value;
    case CoefficientFamily::cosine_bump: {
      const double r = std::min(radius_from_center(s, x), s.support);
      return s.offset + s.amplitude * std::cos(2.0 * std::numbers::pi * s.frequency * r);
    }
    case CoefficientFamily::gaussian_bump: {
      const double r = radius_from_center(s, x);
      return s.offset + s.amplitude * std::exp(-r * r / (2.0 * s.width * s.width));
    }
    case CoefficientFamily::power_cusp:
      return s.nu - std::pow(radius_from_center(s, x), s.beta);
    case CoefficientFamily::piecewise: {
      const double t = x[0] / s.domain_scale;
      if (t <= s.knots.front()) return s.values.front();
      if (t >= s.knots.back()) return s.values.back();
      const auto it = std::upper_bound(s.knots.begin(), s.knots.end(), t);
      const auto k = static_cast<std::size_t>(it - s.knots.begin());
      const double u = (t - s.knots[k - 1]) / (s.knots[k] - s.knots[k - 1]);
      return (1.0 - u) * s.values[k - 1] + u * s.values[k];
    }
    case CoefficientFamily::tabulated:
      throw InvalidArgument("tabulated coefficients have no pointwise definition");
  }
  return 0.0;
}

double holder_exponent(const CoefficientSpec& s) {
  if (s.holder) return *s.holder;
  if (s.family == CoefficientFamily::power_cusp) return std::min(s.beta, 1.0);
  return 1.0;
}

Coefficient Coefficient::sample(const CoefficientSpec& spec, const Grid& grid) {
  validate(spec);
  Coefficient c;
  c.spec_ = spec;
  c.holder_ = holder_exponent(spec);
  if (spec.family == CoefficientFamily::tabulated) {
    if (spec.table.size() != grid.size()) {
      throw InvalidArgument("tabulated coefficient has " + std::to_string(spec.table.size()) +
                            " values but the grid has " + std::to_string(grid.size()) + " nodes");
    }
    c.values_ = spec.table;
  } else {
    c.values_.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c.values_[i] = evaluate(spec, grid.node(i));
  }
  c.finish();
  return c;
}

Coefficient Coefficient::from_values(std::vector<double> values, double holder) {
  Coefficient c;
  c.spec_.family = CoefficientFamily::tabulated;
  c.spec_.table = values;
  c.spec_.holder = holder;
  c.holder_ = holder;
  c.values_ = std::move(values);
  c.finish();
  return c;
}

void Coefficient::finish() {
  if (values_.empty()) throw InvalidArgument("coefficient has no node values");
  for (double v : values_) {
    if (!std::isfinite(v)) throw NonFiniteError("coefficient has a non-finite node value");
  }
  sup_ = *std::max_element(values_.begin(), values_.end());
}

double Coefficient::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Coefficient Coefficient::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x += c;
  Coefficient out = from_values(std::move(v), holder_);
  return out;
}

}  // namespace nlspec
