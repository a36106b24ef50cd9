#include "nlspec/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

constexpr std::array<std::pair<KernelVariant, std::string_view>, 3> kVariantNames{{
    {KernelVariant::convolution, "convolution"},
    {KernelVariant::general, "general"},
    {KernelVariant::slow_decay_1d, "slow_decay_1d"},
}};

constexpr std::array<std::pair<KernelFamily, std::string_view>, 4> kFamilyNames{{
    {KernelFamily::uniform, "uniform"},
    {KernelFamily::triangle, "triangle"},
    {KernelFamily::epanechnikov, "epanechnikov"},
    {KernelFamily::quartic, "quartic"},
}};

// Radial moments M_k = int_0^1 s^k f(s) ds, k = 0..3.
std::array<double, 4> radial_moments(KernelFamily f) {
  switch (f) {
    case KernelFamily::uniform:
      return {1.0, 1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0};
    case KernelFamily::triangle:
      return {1.0 / 2.0, 1.0 / 6.0, 1.0 / 12.0, 1.0 / 20.0};
    case KernelFamily::epanechnikov:
      return {2.0 / 3.0, 1.0 / 4.0, 2.0 / 15.0, 1.0 / 12.0};
    case KernelFamily::quartic:
      return {8.0 / 15.0, 1.0 / 6.0, 8.0 / 105.0, 1.0 / 24.0};
  }
  return {1.0, 1.0, 1.0, 1.0};
}

// int_1^U u^p du
double power_integral(double p, double upper) {
  if (std::abs(p + 1.0) < 1e-14) return std::log(upper);
  return (std::pow(upper, p + 1.0) - 1.0) / (p + 1.0);
}

struct Bounds {
  double lo = 1.0;
  double hi = 1.0;
};

Bounds field_bounds(const CoefficientSpec& spec, const Grid& grid, double scale) {
  if (spec.family == CoefficientFamily::constant) return {spec.value, spec.value};
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : grid.nodes()) {
    const Point q{p[0] / scale, p[1] / scale};
    const double v = evaluate(spec, q);
    b.lo = std::min(b.lo, v);
    b.hi = std::max(b.hi, v);
  }
  return b;
}

}  // namespace

std::string_view to_string(KernelVariant v) {
  for (const auto& [var, name] : kVariantNames) {
    if (var == v) return name;
  }
  return "unknown";
}

std::string_view to_string(KernelFamily f) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (fam == f) return name;
  }
  return "unknown";
}

std::optional<KernelVariant> kernel_variant_from_string(std::string_view s) {
  for (const auto& [var, name] : kVariantNames) {
    if (name == s) return var;
  }
  return std::nullopt;
}

std::optional<KernelFamily> kernel_family_from_string(std::string_view s) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (name == s) return fam;
  }
  return std::nullopt;
}

void validate(const KernelSpec& k) {
  if (k.dimension != 1 && k.dimension != 2) throw InvalidArgument("kernel dimension must be 1 or 2");
  if (!(k.radius > 0.0) || !std::isfinite(k.radius)) throw InvalidArgument("kernel radius must be positive");
  if (!(k.sigma > 0.0) || !std::isfinite(k.sigma)) throw InvalidArgument("sigma must be positive");
  if (!(k.m >= 0.0 && k.m <= 2.0)) throw InvalidArgument("m must lie in [0,2]");
  if (!(k.domain_scale > 0.0) || !std::isfinite(k.domain_scale)) {
    throw InvalidArgument("kernel domain scale must be positive");
  }
  if (!std::isfinite(k.drift)) throw InvalidArgument("drift must be finite");
  if (k.drift != 0.0 && (k.variant != KernelVariant::convolution || k.dimension != 1)) {
    throw InvalidArgument("drift is only available for 1-D convolution kernels");
  }
  if (k.variant == KernelVariant::general) {
    validate(k.modulation_g);
    validate(k.modulation_h);
    if (k.modulation_g.family == CoefficientFamily::tabulated ||
        k.modulation_h.family == CoefficientFamily::tabulated) {
      throw InvalidArgument("kernel modulation functions must be pointwise families");
    }
  }
  if (k.variant == KernelVariant::slow_decay_1d) {
    if (k.dimension != 1) throw InvalidArgument("slow_decay_1d kernels are one-dimensional");
    if (!(k.amplitude > 0.0)) throw InvalidArgument("slow-decay amplitude must be positive");
    if (!(k.alpha > 1.5)) throw InvalidArgument("slow-decay exponent alpha must exceed 3/2");
    if (!(k.truncation > 0.0)) throw InvalidArgument("slow-decay truncation radius must be positive");
  }
}

std::string describe(const KernelSpec& k) {
  std::ostringstream os;
  os << to_string(k.variant);
  if (k.variant != KernelVariant::slow_decay_1d) os << '/' << to_string(k.family) << "/r=" << k.radius;
  if (k.variant == KernelVariant::slow_decay_1d) {
    os << "/C=" << k.amplitude << "/alpha=" << k.alpha << "/R=" << k.truncation;
  }
  if (k.drift != 0.0) os << "/drift=" << k.drift;
  os << "/N=" << k.dimension;
  return os.str();
}

double profile(KernelFamily f, double s) {
  s = std::abs(s);
  constexpr double kEdge = 1e-9;
  if (s > 1.0 + kEdge) return 0.0;
  switch (f) {
    case KernelFamily::uniform:
      return s >= 1.0 - kEdge ? 0.5 : 1.0;
    case KernelFamily::triangle:
      return std::max(0.0, 1.0 - s);
    case KernelFamily::epanechnikov:
      return std::max(0.0, 1.0 - s * s);
    case KernelFamily::quartic: {
      const double t = std::max(0.0, 1.0 - s * s);
      return t * t;
    }
  }
  return 0.0;
}

double normalization(KernelFamily f, int dimension, double radius) {
  const auto mom = radial_moments(f);
  if (dimension == 1) return 1.0 / (2.0 * radius * mom[0]);
  return 1.0 / (2.0 * std::numbers::pi * radius * radius * mom[1]);
}

double density(const KernelSpec& k, const Point& z) {
  const double r = k.dimension == 1 ? std::abs(z[0]) : std::hypot(z[0], z[1]);
  return normalization(k.family, k.dimension, k.radius) * profile(k.family, r / k.radius);
}

double eval_kernel(const KernelSpec& k, const Point& x, const Point& y) {
  const double s = k.domain_scale;
  const int n = k.dimension;
  const double scale_factor = n == 1 ? 1.0 / s : 1.0 / (s * s);
  const Point xs{x[0] / s, x[1] / s};
  const Point ys{y[0] / s, y[1] / s};
  switch (k.variant) {
    case KernelVariant::convolution: {
      const double inv = 1.0 / k.sigma;
      const Point z{(xs[0] - ys[0] - k.drift) * inv, n == 2 ? (xs[1] - ys[1]) * inv : 0.0};
      const double sigma_n = n == 1 ? inv : inv * inv;
      return scale_factor * sigma_n * density(k, z);
    }
    case KernelVariant::general: {
      const double gh = evaluate(k.modulation_g, ys) * evaluate(k.modulation_h, xs);
      const Point z{(xs[0] - ys[0]) / gh, n == 2 ? (xs[1] - ys[1]) / gh : 0.0};
      return scale_factor * density(k, z);
    }
    case KernelVariant::slow_decay_1d: {
      const double d = std::abs(xs[0] - ys[0]);
      if (d > k.truncation) return 0.0;
      return scale_factor * k.amplitude * std::pow(1.0 + d, -k.alpha);
    }
  }
  return 0.0;
}

double second_moment(const KernelSpec& k) {
  switch (k.variant) {
    case KernelVariant::convolution: {
      if (k.drift != 0.0) throw InvalidArgument("second moment is defined for even kernels only");
      const auto mom = radial_moments(k.family);
      const double r2 = k.radius * k.radius;
      return k.dimension == 1 ? r2 * mom[2] / mom[0] : r2 * mom[3] / mom[1];
    }
    case KernelVariant::slow_decay_1d: {
      if (std::isinf(k.truncation)) {
        if (k.alpha <= 3.0) {
          throw InvalidArgument("untruncated slow-decay kernel has no second moment for alpha <= 3");
        }
        return 4.0 * k.amplitude / ((k.alpha - 1.0) * (k.alpha - 2.0) * (k.alpha - 3.0));
      }
      const double u = 1.0 + k.truncation;
      return 2.0 * k.amplitude *
             (power_integral(2.0 - k.alpha, u) - 2.0 * power_integral(1.0 - k.alpha, u) +
              power_integral(-k.alpha, u));
    }
    case KernelVariant::general:
      break;
  }
  throw InvalidArgument("second moment requires a convolution or slow-decay kernel");
}

double scaled_second_moment(const KernelSpec& k) {
  const double s = k.domain_scale;
  if (k.variant == KernelVariant::convolution) {
    return k.sigma * k.sigma * s * s * second_moment(k);
  }
  return s * s * second_moment(k);
}

double kernel_mass(const KernelSpec& k, const Grid& grid, const Point& x) {
  double acc = 0.0;
  const auto w = grid.weights();
  for (std::size_t j = 0; j < grid.size(); ++j) acc += w[j] * eval_kernel(k, x, grid.node(j));
  return acc;
}

double interaction_radius(const KernelSpec& k, const Grid& grid) {
  const double s = k.domain_scale;
  switch (k.variant) {
    case KernelVariant::convolution:
      return (k.sigma * k.radius + std::abs(k.drift)) * s;
    case KernelVariant::general: {
      const auto g = field_bounds(k.modulation_g, grid, s);
      const auto h = field_bounds(k.modulation_h, grid, s);
      return k.radius * g.hi * h.hi * s;
    }
    case KernelVariant::slow_decay_1d:
      return k.truncation * s;
  }
  return 0.0;
}

NondegeneracyWitness nondegeneracy(const KernelSpec& k, const Grid& grid) {
  validate(k);
  const double s = k.domain_scale;
  const double sn = k.dimension == 1 ? s : s * s;
  const double c = normalization(k.family, k.dimension, k.radius);
  NondegeneracyWitness w;
  switch (k.variant) {
    case KernelVariant::convolution: {
      const double sig_n = k.dimension == 1 ? k.sigma : k.sigma * k.sigma;
      w.C0 = c / (sig_n * sn);
      w.r0 = (k.sigma * k.radius + std::abs(k.drift)) * s;
      w.r1 = std::max(0.0, 0.5 * k.sigma * k.radius - std::abs(k.drift)) * s;
      w.c0 = w.r1 > 0.0 ? c * profile(k.family, 0.5) / (sig_n * sn) : 0.0;
      break;
    }
    case KernelVariant::general: {
      const auto g = field_bounds(k.modulation_g, grid, s);
      const auto h = field_bounds(k.modulation_h, grid, s);
      w.C0 = c / sn;
      w.r0 = k.radius * g.hi * h.hi * s;
      w.r1 = 0.5 * k.radius * g.lo * h.lo * s;
      w.c0 = c * profile(k.family, 0.5) / sn;
      break;
    }
    case KernelVariant::slow_decay_1d: {
      w.C0 = k.amplitude / s;
      w.r0 = k.truncation * s;
      w.r1 = std::min(1.0, k.truncation) * s;
      w.c0 = k.amplitude * std::pow(1.0 + w.r1 / s, -k.alpha) / s;
      break;
    }
  }
  return w;
}

}  // namespace nlspec
