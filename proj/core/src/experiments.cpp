#include "nlspec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlspec/error.hpp"
#include "nlspec/local_ref.hpp"
#include "parallel.hpp"

namespace nlspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool strictly_monotone(std::span<const double> v) {
  if (v.size() < 2) return true;
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    up = up && v[i] > v[i - 1];
    down = down && v[i] < v[i - 1];
  }
  return up || down;
}

std::size_t axis_count(double length, double h) {
  // Smallest count whose spacing does not exceed h.
  const double q = length / h;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(q));
}

Grid box_grid(int dimension, double half_width, double h) {
  std::vector<AxisBounds> b(static_cast<std::size_t>(dimension), AxisBounds{-half_width, half_width});
  return Grid::lattice(b, h);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view to_string(ResolutionRule r) { return r == ResolutionRule::aligned ? "aligned" : "fixed"; }

std::optional<ResolutionRule> resolution_rule_from_string(std::string_view s) {
  if (s == "aligned") return ResolutionRule::aligned;
  if (s == "fixed") return ResolutionRule::fixed;
  return std::nullopt;
}

std::string_view to_string(LimitTarget t) {
  switch (t) {
    case LimitTarget::minus_nu:
      return "minus_nu";
    case LimitTarget::one_minus_nu:
      return "one_minus_nu";
    case LimitTarget::lambda1:
      return "lambda1";
  }
  return "unknown";
}

std::optional<LimitTarget> limit_target_from_string(std::string_view s) {
  for (LimitTarget t : {LimitTarget::minus_nu, LimitTarget::one_minus_nu, LimitTarget::lambda1}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(MonotonicityVerdict v) {
  switch (v) {
    case MonotonicityVerdict::monotone:
      return "monotone";
    case MonotonicityVerdict::violated:
      return "violated";
    case MonotonicityVerdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Grid sweep_grid(const SweepSpec& spec, double sigma) {
  double h = spec.fixed_h;
  if (spec.rule == ResolutionRule::aligned) {
    if (!(spec.nodes_per_radius > 0.0)) throw InvalidArgument("nodes_per_radius must be positive");
    h = sigma * spec.kernel.radius * spec.kernel.domain_scale / spec.nodes_per_radius;
  }
  if (!(h > 0.0)) throw InvalidArgument("sweep grid spacing must be positive");
  std::vector<std::size_t> counts;
  for (const auto& b : spec.domain) counts.push_back(axis_count(b.upper - b.lower, h));
  return Grid::uniform(spec.domain, counts);
}

SweepRecord make_record(const DiscreteOperator& op, const SpectralResult& res) {
  SweepRecord r;
  r.sigma = op.metadata().sigma;
  r.m = op.metadata().m;
  r.n_nodes = op.size();
  r.h = op.metadata().h;
  const CwBounds iv = bounds_iv(op);
  r.lambda_p = res.lambda_p;
  r.lambda_v = res.lambda_v.value_or(kNaN);
  r.cw_lower = res.cw_lower;
  r.cw_upper = res.cw_upper;
  r.iv_lo = iv.lower;
  r.iv_hi = iv.upper;
  r.existence = res.existence;
  r.converged = res.converged;
  r.invariant_violation = !(res.cw_lower <= res.lambda_p && res.lambda_p <= res.cw_upper) ||
                          !(iv.lower <= res.lambda_p + 1e-12 && res.lambda_p <= iv.upper + 1e-12);
  r.eigvec = res.eigvec;
  if (op.grid()) r.nodes.assign(op.grid()->nodes().begin(), op.grid()->nodes().end());
  return r;
}

SweepRecord solve_record(const Grid& grid, const KernelSpec& k, const CoefficientSpec& spec, OperatorVariant variant,
                         const SolverOptions& opts, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  SweepRecord r;
  try {
    const Coefficient a = Coefficient::sample(spec, grid);
    const DiscreteOperator op = assemble(grid, k, a, variant, threads);
    r = make_record(op, principal_eig(op, opts));
  } catch (const std::exception& e) {
    r.sigma = k.sigma;
    r.m = variant == OperatorVariant::M_plus_a ? k.m : 0.0;
    r.lambda_p = r.lambda_v = r.cw_lower = r.cw_upper = r.iv_lo = r.iv_hi = kNaN;
    r.n_nodes = grid.size();
    r.h = grid.spacing();
    r.error = e.what();
  }
  r.wall_ms = elapsed_ms(start);
  return r;
}

std::vector<SweepRecord> sigma_sweep(const SweepSpec& spec) {
  if (spec.sigmas.empty()) throw InvalidArgument("sigma list is empty");
  if (!strictly_monotone(spec.sigmas)) throw InvalidArgument("sigma list must be strictly monotone");
  if (static_cast<int>(spec.domain.size()) != spec.kernel.dimension) {
    throw InvalidArgument("domain and kernel dimensions differ");
  }
  std::vector<SweepRecord> out(spec.sigmas.size());
  detail::parallel_for(spec.sigmas.size(), spec.threads, [&](std::size_t idx) {
    KernelSpec k = spec.kernel;
    k.sigma = spec.sigmas[idx];
    k.m = spec.m;
    try {
      out[idx] = solve_record(sweep_grid(spec, k.sigma), k, spec.coefficient, spec.variant, spec.solver);
    } catch (const std::exception& e) {
      out[idx].sigma = k.sigma;
      out[idx].m = spec.m;
      out[idx].error = e.what();
    }
  });
  return out;
}

LimitEstimate limit_estimate(std::span<const double> sigmas, std::span<const double> values, double target,
                             LimitTarget kind, LimitDirection dir, int order) {
  if (sigmas.size() != values.size()) throw InvalidArgument("sigma and value lists differ in length");
  if (sigmas.size() < 3) throw InvalidArgument("limit estimation needs at least three values");
  if (order != 1 && order != 2) throw InvalidArgument("extrapolation order must be 1 or 2");
  struct Sample {
    double t;
    double v;
  };
  std::vector<Sample> s;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw InvalidArgument("sigma values must be positive");
    if (!std::isfinite(values[i])) throw InvalidArgument("tail values must be finite");
    s.push_back({dir == LimitDirection::to_zero ? sigmas[i] : 1.0 / sigmas[i], values[i]});
  }
  // Coarsest first: decreasing t.
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.t > b.t; });

  LimitEstimate est;
  est.order = order;
  est.target_kind = kind;
  est.target = target;
  for (const auto& x : s) est.tail.push_back(x.v);
  const std::size_t n = s.size();
  const double d1 = s[n - 2].v - s[n - 3].v;
  const double d2 = s[n - 1].v - s[n - 2].v;
  const bool monotone = (d1 >= 0.0 && d2 >= 0.0) || (d1 <= 0.0 && d2 <= 0.0);
  if (monotone) {
    const double ratio = std::pow(s[n - 2].t / s[n - 1].t, order);
    est.value = s[n - 1].v + (s[n - 1].v - s[n - 2].v) / (ratio - 1.0);
    est.extrapolated = true;
  } else {
    est.value = s[n - 1].v;
  }
  est.gap = std::abs(est.value - target);
  return est;
}

LimitEstimate limit_estimate(std::span<const SweepRecord> records, double target, LimitTarget kind,
                             LimitDirection dir, int order) {
  std::vector<double> sig;
  std::vector<double> val;
  for (const auto& r : records) {
    if (!r.error.empty() || !std::isfinite(r.lambda_p)) continue;
    sig.push_back(r.sigma);
    val.push_back(r.lambda_p);
  }
  return limit_estimate(sig, val, target, kind, dir, order);
}

double limit_target(const SweepSpec& spec, LimitTarget kind) {
  if (kind == LimitTarget::lambda1) {
    std::vector<std::size_t> counts(spec.domain.size(), spec.domain.size() == 1 ? 1024 : 128);
    const Grid fine = Grid::uniform(spec.domain, counts);
    const Coefficient a = Coefficient::sample(spec.coefficient, fine);
    return dirichlet_lambda1(fine, diffusivity(spec.kernel), a).lambda_1;
  }
  double nu = -std::numeric_limits<double>::infinity();
  for (double sigma : spec.sigmas) nu = std::max(nu, Coefficient::sample(spec.coefficient, sweep_grid(spec, sigma)).sup());
  return kind == LimitTarget::minus_nu ? -nu : 1.0 - nu;
}

ExhaustionResult domain_exhaustion(const ExhaustionSpec& spec) {
  if (spec.half_widths.empty()) throw InvalidArgument("exhaustion needs at least one box");
  for (std::size_t i = 1; i < spec.half_widths.size(); ++i) {
    if (!(spec.half_widths[i] > spec.half_widths[i - 1])) throw InvalidArgument("box half-widths must increase");
  }
  ExhaustionResult out;
  std::optional<Grid> prev;
  for (double half : spec.half_widths) {
    const Grid grid = box_grid(spec.dimension, half, spec.h);
    if (prev && !grid.contains_nodes_of(*prev)) out.nested = false;
    ExhaustionLevel level;
    level.half_width = half;
    level.record = solve_record(grid, spec.kernel, spec.coefficient, spec.variant, spec.solver);
    if (!level.record.error.empty()) throw Error("exhaustion level L = " + std::to_string(half) + ": " + level.record.error);
    level.lambda_v_min = kNaN;
    if (spec.with_lambda_v) {
      const DiscreteOperator op =
          assemble(grid, spec.kernel, Coefficient::sample(spec.coefficient, grid), spec.variant, 1);
      level.lambda_v_min = lambda_v_min(op, spec.solver.tol, spec.solver.max_iter).lambda_v;
    }
    if (!out.levels.empty()) {
      const double before = out.levels.back().record.lambda_p;
      const double now = level.record.lambda_p;
      if (now > before + 1e-12) out.nonincreasing = false;
      if (!out.stagnation_index && std::abs(now - before) < spec.stagnation_tol) {
        out.stagnation_index = out.levels.size();
      }
    }
    out.levels.push_back(level);
    prev = grid;
  }
  return out;
}

InvarianceReport scaling_invariance_suite(const DiscreteOperator& op, std::span<const double> factors,
                                          const SolverOptions& opts) {
  InvarianceReport rep;
  const double base = principal_eig(op, opts).lambda_p;
  rep.base_lambda_p = base;
  for (double f : factors) {
    const DiscreteOperator scaled = assemble_scaled(op, f);
    const double v = principal_eig(scaled, opts).lambda_p;
    const double d = std::abs(v - base);
    rep.factors.push_back(f);
    rep.lambda_p.push_back(v);
    rep.discrepancies.push_back(d);
    rep.max_discrepancy = std::max(rep.max_discrepancy, d);
    rep.max_matrix_difference =
        std::max(rep.max_matrix_difference, (scaled.matrix() - op.matrix()).cwiseAbs().maxCoeff());
  }
  return rep;
}

std::vector<EigfnRecord> eigfn_convergence(const EigfnSpec& spec) {
  if (spec.sigmas.empty()) throw InvalidArgument("sigma list is empty");
  for (std::size_t i = 1; i < spec.sigmas.size(); ++i) {
    if (!(spec.sigmas[i] < spec.sigmas[i - 1])) throw InvalidArgument("sigma list must decrease");
  }
  SweepSpec sweep;
  sweep.kernel = spec.kernel;
  sweep.coefficient = spec.coefficient;
  sweep.domain = spec.domain;
  sweep.nodes_per_radius = spec.nodes_per_radius;
  const double c = diffusivity(spec.kernel);

  std::vector<EigfnRecord> out(spec.sigmas.size());
  detail::parallel_for(spec.sigmas.size(), spec.threads, [&](std::size_t idx) {
    EigfnRecord& r = out[idx];
    r.sigma = spec.sigmas[idx];
    const Grid grid = sweep_grid(sweep, r.sigma);
    KernelSpec k = spec.kernel;
    k.sigma = r.sigma;
    k.m = 2.0;
    r.record = solve_record(grid, k, spec.coefficient, OperatorVariant::M_plus_a, spec.solver);
    if (!r.record.error.empty()) {
      r.aborted = true;
      r.note = r.record.error;
      return;
    }
    if (r.record.existence != ExistenceVerdict::eigenpair) {
      r.aborted = true;
      r.note = "existence check returned boundary_case";
      return;
    }
    const Coefficient a = Coefficient::sample(spec.coefficient, grid);
    const LocalEigenResult ref = dirichlet_lambda1(grid, c, a);
    const auto w = grid.weights();
    for (double margin : spec.margins) {
      double acc = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.distance_to_boundary(i) < margin) continue;
        const double d = r.record.eigvec[static_cast<Eigen::Index>(i)] - ref.phi_1[static_cast<Eigen::Index>(i)];
        acc += w[i] * d * d;
      }
      r.distances.push_back(std::sqrt(acc));
    }
  });
  return out;
}

MonotonicityResult m0_monotonicity(const MonotonicitySpec& spec) {
  for (std::size_t i = 1; i < spec.sigmas.size(); ++i) {
    if (!(spec.sigmas[i] > spec.sigmas[i - 1])) throw InvalidArgument("sigma list must increase");
  }
  if (!(spec.step > 0.0)) throw InvalidArgument("box enlargement step must be positive");
  MonotonicityResult out;
  out.points.resize(spec.sigmas.size());
  detail::parallel_for(spec.sigmas.size(), spec.threads, [&](std::size_t idx) {
    MonotonicityPoint& p = out.points[idx];
    p.sigma = spec.sigmas[idx];
    KernelSpec k = spec.kernel;
    k.sigma = p.sigma;
    k.m = 0.0;
    std::optional<double> prev;
    for (double half = spec.initial_half_width; half <= spec.max_half_width + 1e-12; half += spec.step) {
      p.record = solve_record(box_grid(spec.dimension, half, spec.h), k, spec.coefficient, OperatorVariant::M_plus_a,
                              spec.solver);
      if (!p.record.error.empty()) return;
      p.half_width = half;
      if (prev && std::abs(p.record.lambda_p - *prev) < spec.change_tol) {
        p.box_converged = true;
        break;
      }
      prev = p.record.lambda_p;
    }
  });
  const bool all_converged =
      std::all_of(out.points.begin(), out.points.end(), [](const MonotonicityPoint& p) { return p.box_converged; });
  if (!all_converged) {
    out.verdict = MonotonicityVerdict::inconclusive;
    return out;
  }
  out.verdict = MonotonicityVerdict::monotone;
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i - 1].record.lambda_p > out.points[i].record.lambda_p + spec.mono_tol) {
      out.verdict = MonotonicityVerdict::violated;
    }
  }
  return out;
}

double max_growth_step(const DiscreteOperator& op) {
  return 0.25 / op.matrix().cwiseAbs().rowwise().sum().maxCoeff();
}

GrowthResult growth_rate(const DiscreteOperator& op, double t_end, double dt, const Eigen::VectorXd& u0) {
  if (!(dt > 0.0) || !(t_end > dt)) throw InvalidArgument("growth rate needs 0 < dt < T");
  const double limit = max_growth_step(op);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "explicit Euler step dt = " << dt << " exceeds 0.25/|A|_inf = " << limit;
    throw InvalidArgument(os.str());
  }
  if (u0.size() != static_cast<Eigen::Index>(op.size())) throw InvalidArgument("initial vector size mismatch");
  if (!(u0.array() > 0.0).all()) throw InvalidArgument("initial vector must be positive");

  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const std::size_t stride = std::max<std::size_t>(1, steps / 1000);
  GrowthResult out;
  Eigen::VectorXd u = u0 / u0.norm();
  Eigen::VectorXd au(u.size());
  double log_norm = 0.0;
  // Running sums for the least-squares slope over the second half.
  double sn = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    au.noalias() = op.matrix() * u;
    u += dt * au;
    const double nrm = u.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NonFiniteError("growth iteration lost its norm");
    log_norm += std::log(nrm);
    u /= nrm;
    const double t = static_cast<double>(k) * dt;
    if (k % stride == 0 || k == steps) out.trajectory.emplace_back(t, log_norm);
    if (2 * k >= steps) {
      sn += 1.0;
      st += t;
      sy += log_norm;
      stt += t * t;
      sty += t * log_norm;
    }
  }
  out.steps = steps;
  out.rate = (sn * sty - st * sy) / (sn * stt - st * st);
  return out;
}

}  // namespace nlspec
