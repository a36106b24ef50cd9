#include "nlspec/runner.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nlspec/checks.hpp"
#include "nlspec/error.hpp"
#include "nlspec/local_ref.hpp"
#include "nlspec/spectral.hpp"

#ifndef NLSPEC_VERSION
#define NLSPEC_VERSION "0.0.0"
#endif

namespace nlspec {

namespace {

using Json = nlohmann::ordered_json;
using Series = std::vector<std::pair<double, double>>;

struct Collector {
  RunOutcome out;
  bool nonconverged = false;
  bool invariant = false;
  Json summary = Json::object();
  std::vector<SweepRecord> rows;
  std::map<std::string, Series> plots;

  void warn(std::string msg) { out.warnings.push_back(std::move(msg)); }

  void violation(std::string msg) {
    invariant = true;
    out.violations.push_back(std::move(msg));
  }

  void stall(std::string msg) {
    nonconverged = true;
    out.violations.push_back(std::move(msg));
  }

  void add(const SweepRecord& r, const std::string& where) {
    if (!r.error.empty()) {
      stall(where + ": " + r.error);
    } else {
      if (!r.converged) stall(where + ": power iteration did not converge");
      if (r.invariant_violation) violation(where + ": sandwich or bounds_iv check failed");
    }
    rows.push_back(r);
  }
};

std::string tag(double v) {
  std::string s = format_number(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  std::replace(s.begin(), s.end(), '+', '_');
  return s;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json record_json(const SweepRecord& r) {
  Json j;
  j["sigma"] = r.sigma;
  j["m"] = r.m;
  j["lambda_p"] = nullable(r.lambda_p);
  j["converged"] = r.converged;
  j["existence"] = std::string(to_string(r.existence));
  j["wall_ms"] = r.wall_ms;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

Series eigvec_series(const SweepRecord& r) {
  Series s;
  for (Eigen::Index i = 0; i < r.eigvec.size(); ++i) {
    const bool one_d = r.nodes.size() == static_cast<std::size_t>(r.eigvec.size());
    s.emplace_back(one_d ? r.nodes[static_cast<std::size_t>(i)][0] : static_cast<double>(i), r.eigvec[i]);
  }
  return s;
}

SweepSpec sweep_spec(const ExperimentConfig& cfg, double m, unsigned threads) {
  SweepSpec s;
  s.kernel = cfg.kernel;
  s.coefficient = cfg.coefficient;
  s.domain.clear();
  for (std::size_t i = 0; i < cfg.grid.lower.size(); ++i) s.domain.push_back({cfg.grid.lower[i], cfg.grid.upper[i]});
  s.variant = cfg.variant;
  s.m = m;
  s.sigmas = cfg.sweep.sigmas;
  s.rule = cfg.sweep.rule;
  s.nodes_per_radius = cfg.sweep.nodes_per_radius;
  s.fixed_h = cfg.sweep.h;
  s.solver = solver_options(cfg);
  s.threads = threads;
  return s;
}

Json estimate_json(const LimitEstimate& e) {
  Json j;
  j["target_kind"] = std::string(to_string(e.target_kind));
  j["target"] = e.target;
  j["value"] = e.value;
  j["extrapolated"] = e.extrapolated;
  j["order"] = e.order;
  j["tail"] = e.tail;
  j["gap"] = e.gap;
  j["relative_gap"] = e.target != 0.0 ? e.gap / std::abs(e.target) : e.gap;
  return j;
}

void run_eig(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  const Grid grid = make_grid(cfg.grid);
  const Coefficient a = Coefficient::sample(cfg.coefficient, grid);
  const DiscreteOperator op = assemble(grid, cfg.kernel, a, cfg.variant, opts.threads);
  const SolverOptions so = solver_options(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const SpectralResult res = principal_eig(op, so);
  SweepRecord r = make_record(op, res);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  c.add(r, "eig");
  for (const auto& w : res.warnings) c.warn(w);
  Json s;
  s["lambda_p"] = r.lambda_p;
  s["lambda_p_prime"] = r.lambda_p;
  s["lambda_p_double_prime"] = r.lambda_p;
  s["cw"] = {r.cw_lower, r.cw_upper};
  s["bounds_iv"] = {r.iv_lo, r.iv_hi};
  s["existence"] = std::string(to_string(r.existence));
  s["effective_sup"] = effective_sup(op);
  s["symmetric"] = op.symmetric();
  s["components"] = op.components().size();
  s["residual"] = res.residual;
  s["iterations"] = res.iterations;
  s["concentration_index"] = res.concentration_index;
  s["existence_gap"] = res.existence_gap;
  s["gap_tol"] = res.gap_tol;
  if (op.symmetric()) {
    const VariationalResult v = lambda_v_min(op, so.tol, so.max_iter);
    s["lambda_v_min"] = v.lambda_v;
    const double gap = std::abs(v.lambda_v - r.lambda_p);
    s["lambda_v_gap"] = gap;
    if (!v.converged) c.stall("lambda_v_min did not converge");
    if (gap > 10.0 * so.tol) c.violation("lambda_p and lambda_v_min differ by " + format_number(gap));
  }
  c.summary["eig"] = s;
  c.plots["eigvec"] = eigvec_series(r);
}

void run_sweep(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  Json list = Json::array();
  for (double m : cfg.sweep.m) {
    const SweepSpec spec = sweep_spec(cfg, m, opts.threads);
    const auto records = sigma_sweep(spec);
    Json j;
    j["m"] = m;
    j["records"] = Json::array();
    Series plot;
    for (const auto& r : records) {
      c.add(r, "sweep m=" + format_number(m) + " sigma=" + format_number(r.sigma));
      j["records"].push_back(record_json(r));
      if (r.error.empty()) plot.emplace_back(r.sigma, r.lambda_p);
    }
    c.plots["sweep_m" + tag(m)] = plot;
    if (cfg.sweep.direction == LimitDirection::to_zero && m < 2.0) {
      c.warn("sigma -> 0 with m < 2: the limit -sup a is approached slowly (concentration regime)");
    }
    if (cfg.sweep.target && plot.size() >= 3) {
      const double target = limit_target(spec, *cfg.sweep.target);
      const LimitEstimate e = limit_estimate(records, target, *cfg.sweep.target, cfg.sweep.direction, cfg.sweep.order);
      j["limit"] = estimate_json(e);
      if (!e.extrapolated) c.warn("m=" + format_number(m) + ": tail not monotone, extrapolation skipped");
    }
    list.push_back(j);
  }
  c.summary["sweeps"] = list;
}

void run_compare_local(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  const SweepSpec spec = sweep_spec(cfg, 2.0, opts.threads);
  const auto records = sigma_sweep(spec);
  Series plot;
  for (const auto& r : records) {
    c.add(r, "compare_local sigma=" + format_number(r.sigma));
    if (r.error.empty()) plot.emplace_back(r.sigma, r.lambda_p);
  }
  c.plots["compare_local"] = plot;
  Json s;
  s["diffusivity"] = diffusivity(cfg.kernel);
  const double target = limit_target(spec, LimitTarget::lambda1);
  s["lambda1"] = target;
  if (plot.size() >= 3) {
    const LimitEstimate e = limit_estimate(records, target, LimitTarget::lambda1, LimitDirection::to_zero, cfg.sweep.order);
    s["limit"] = estimate_json(e);
    if (!e.extrapolated) c.warn("tail not monotone, extrapolation skipped");
  } else {
    c.warn("fewer than three successful records; no extrapolation");
  }
  c.summary["compare_local"] = s;
}

void run_exhaust(const ExperimentConfig& cfg, const RunOptions&, Collector& c) {
  ExhaustionSpec spec;
  spec.kernel = cfg.kernel;
  spec.coefficient = cfg.coefficient;
  spec.variant = cfg.variant;
  spec.dimension = cfg.grid.dimension;
  spec.half_widths = cfg.exhaust.half_widths;
  spec.h = cfg.exhaust.h;
  spec.stagnation_tol = cfg.exhaust.stagnation_tol;
  spec.with_lambda_v = cfg.exhaust.lambda_v;
  spec.solver = solver_options(cfg);
  const ExhaustionResult res = domain_exhaustion(spec);
  Json levels = Json::array();
  Series plot;
  for (const auto& l : res.levels) {
    c.add(l.record, "exhaust L=" + format_number(l.half_width));
    plot.emplace_back(l.half_width, l.record.lambda_p);
    Json j = record_json(l.record);
    j["half_width"] = l.half_width;
    j["n_nodes"] = l.record.n_nodes;
    if (cfg.exhaust.lambda_v) {
      j["lambda_v_min"] = nullable(l.lambda_v_min);
      if (l.record.lambda_p > l.lambda_v_min + 10.0 * spec.solver.tol) {
        c.violation("exhaust L=" + format_number(l.half_width) + ": lambda_p exceeds lambda_v_min");
      }
    }
    levels.push_back(j);
  }
  c.plots["exhaust"] = plot;
  Json s;
  s["levels"] = levels;
  s["nonincreasing"] = res.nonincreasing;
  s["nested"] = res.nested;
  if (res.stagnation_index) {
    s["stagnation_half_width"] = res.levels[*res.stagnation_index].half_width;
  } else {
    s["stagnation_half_width"] = nullptr;
    c.warn("exhaustion did not stagnate within the box family");
  }
  if (!res.nonincreasing) c.violation("exhaustion sequence increased");
  if (!res.nested) c.violation("box grids are not node-nested");
  c.summary["exhaust"] = s;
}

void run_eigfn(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  EigfnSpec spec;
  spec.kernel = cfg.kernel;
  spec.coefficient = cfg.coefficient;
  spec.domain.clear();
  for (std::size_t i = 0; i < cfg.grid.lower.size(); ++i) spec.domain.push_back({cfg.grid.lower[i], cfg.grid.upper[i]});
  spec.sigmas = cfg.eigfn.sigmas;
  spec.margins = cfg.eigfn.margins;
  spec.nodes_per_radius = cfg.eigfn.nodes_per_radius;
  spec.solver = solver_options(cfg);
  spec.threads = opts.threads;
  const auto records = eigfn_convergence(spec);
  Json list = Json::array();
  std::vector<Series> plots(spec.margins.size());
  for (const auto& r : records) {
    c.add(r.record, "eigfn sigma=" + format_number(r.sigma));
    Json j = record_json(r.record);
    j["aborted"] = r.aborted;
    if (r.aborted) {
      j["note"] = r.note;
      c.warn("eigfn sigma=" + format_number(r.sigma) + " aborted: " + r.note);
    }
    j["distances"] = r.distances;
    for (std::size_t k = 0; k < r.distances.size(); ++k) plots[k].emplace_back(r.sigma, r.distances[k]);
    list.push_back(j);
  }
  for (std::size_t k = 0; k < spec.margins.size(); ++k) c.plots["eigfn_margin" + tag(spec.margins[k])] = plots[k];
  c.summary["eigfn"] = {{"margins", spec.margins}, {"records", list}};
}

void run_growth(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  const Grid grid = make_grid(cfg.grid);
  const Coefficient a = Coefficient::sample(cfg.coefficient, grid);
  const DiscreteOperator op = assemble(grid, cfg.kernel, a, cfg.variant, opts.threads);
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord r = make_record(op, principal_eig(op, solver_options(cfg)));
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  c.add(r, "growth");
  const double dt = cfg.growth.dt > 0.0 ? cfg.growth.dt : max_growth_step(op);
  const GrowthResult g = growth_rate(op, cfg.growth.t_end, dt, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.size())));
  const double gap = std::abs(g.rate + r.lambda_p);
  c.summary["growth"] = {{"rate", g.rate}, {"lambda_p", r.lambda_p}, {"gap", gap}, {"dt", dt}, {"steps", g.steps}};
  if (gap > 1e-2) c.violation("growth rate differs from -lambda_p by " + format_number(gap));
  c.plots["growth"] = g.trajectory;
}

void run_invariance(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  const Grid grid = make_grid(cfg.grid);
  const Coefficient a = Coefficient::sample(cfg.coefficient, grid);
  const DiscreteOperator op = assemble(grid, cfg.kernel, a, OperatorVariant::L_plus_a, opts.threads);
  const SolverOptions so = solver_options(cfg);
  c.add(solve_record(grid, cfg.kernel, cfg.coefficient, OperatorVariant::L_plus_a, so, opts.threads), "invariance base");
  for (double f : cfg.invariance.factors) {
    KernelSpec k = cfg.kernel;
    k.domain_scale *= f;
    CoefficientSpec coef = cfg.coefficient;
    if (coef.family != CoefficientFamily::tabulated) coef.domain_scale *= f;
    SweepRecord r = solve_record(grid.scaled(f), k, coef, OperatorVariant::L_plus_a, so, opts.threads);
    r.sigma = cfg.kernel.sigma * f;
    c.add(r, "invariance factor=" + format_number(f));
  }
  const InvarianceReport rep = scaling_invariance_suite(op, cfg.invariance.factors, so);
  Series plot;
  for (std::size_t i = 0; i < rep.factors.size(); ++i) plot.emplace_back(rep.factors[i], rep.discrepancies[i]);
  c.plots["invariance"] = plot;
  c.summary["invariance"] = {{"factors", rep.factors},
                             {"discrepancies", rep.discrepancies},
                             {"max_discrepancy", rep.max_discrepancy},
                             {"max_matrix_difference", rep.max_matrix_difference}};
  if (rep.max_discrepancy > 1e-11) c.violation("scaling invariance discrepancy " + format_number(rep.max_discrepancy));
}

void run_mono(const ExperimentConfig& cfg, const RunOptions& opts, Collector& c) {
  MonotonicitySpec spec;
  spec.kernel = cfg.kernel;
  spec.coefficient = cfg.coefficient;
  spec.dimension = cfg.grid.dimension;
  spec.sigmas = cfg.mono.sigmas;
  spec.h = cfg.mono.h;
  spec.initial_half_width = cfg.mono.initial_half_width;
  spec.step = cfg.mono.step;
  spec.max_half_width = cfg.mono.max_half_width;
  spec.change_tol = cfg.mono.change_tol;
  spec.mono_tol = cfg.mono.mono_tol;
  spec.solver = solver_options(cfg);
  spec.threads = opts.threads;
  const MonotonicityResult res = m0_monotonicity(spec);
  Series plot;
  Json points = Json::array();
  for (const auto& p : res.points) {
    c.add(p.record, "mono_m0 sigma=" + format_number(p.sigma));
    plot.emplace_back(p.sigma, p.record.lambda_p);
    Json j = record_json(p.record);
    j["half_width"] = p.half_width;
    j["box_converged"] = p.box_converged;
    points.push_back(j);
  }
  c.plots["mono_m0"] = plot;
  c.summary["mono_m0"] = {{"verdict", std::string(to_string(res.verdict))}, {"points", points}};
  if (res.verdict == MonotonicityVerdict::violated) c.violation("lambda_p(sigma) is not nondecreasing");
  if (res.verdict == MonotonicityVerdict::inconclusive) c.warn("box enlargement did not converge; verdict inconclusive");
}

void run_check_all(const ExperimentConfig& cfg, const RunOptions&, Collector& c) {
  PropertySuiteOptions o;
  o.seed = static_cast<std::uint64_t>(cfg.seed);
  o.instances = static_cast<std::size_t>(cfg.check.instances);
  o.max_nodes = static_cast<std::size_t>(cfg.check.max_nodes);
  o.tol = cfg.solver.tol;
  const PropertySuiteResult res = run_property_suite(o);
  Json checks = Json::array();
  for (const auto& p : res.checks) {
    checks.push_back({{"name", p.name}, {"passed", p.passed}, {"cases", p.cases}, {"detail", p.detail}});
    if (!p.passed) c.violation("property " + p.name + " failed: " + p.detail);
  }
  for (std::size_t i = 0; i < res.records.size(); ++i) c.add(res.records[i], "check instance " + std::to_string(i));
  c.summary["checks"] = checks;
}

void write_text(const std::filesystem::path& p, const std::string& text, RunOutcome& out) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("failed writing " + p.string());
  out.files.push_back(p.string());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), p);
}

std::string results_csv(std::span<const SweepRecord> records) {
  std::string s(kResultsHeader);
  s += '\n';
  for (const auto& r : records) {
    s += format_number(r.sigma) + ',' + format_number(r.m) + ',' + format_number(r.lambda_p) + ',' +
         format_number(r.lambda_v) + ',' + format_number(r.cw_lower) + ',' + format_number(r.cw_upper) + ',' +
         format_number(r.iv_lo) + ',' + format_number(r.iv_hi) + ',' + std::to_string(r.n_nodes) + ',' +
         format_number(r.h) + ',' + (r.error.empty() ? std::string(to_string(r.existence)) : "error") + ',' +
         format_number(r.wall_ms) + '\n';
  }
  return s;
}

RunOutcome run(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Collector c;
  try {
    switch (cfg.kind) {
      case ExperimentKind::eig:
        run_eig(cfg, opts, c);
        break;
      case ExperimentKind::sweep:
        run_sweep(cfg, opts, c);
        break;
      case ExperimentKind::exhaust:
        run_exhaust(cfg, opts, c);
        break;
      case ExperimentKind::compare_local:
        run_compare_local(cfg, opts, c);
        break;
      case ExperimentKind::eigfn_conv:
        run_eigfn(cfg, opts, c);
        break;
      case ExperimentKind::growth:
        run_growth(cfg, opts, c);
        break;
      case ExperimentKind::invariance:
        run_invariance(cfg, opts, c);
        break;
      case ExperimentKind::mono_m0:
        run_mono(cfg, opts, c);
        break;
      case ExperimentKind::check_all:
        run_check_all(cfg, opts, c);
        break;
    }
  } catch (const ResolutionError& e) {
    log << "error: " << e.what() << '\n';
    c.out.exit_code = kExitUsage;
    return c.out;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << '\n';
    c.out.exit_code = kExitUsage;
    return c.out;
  } catch (const std::exception& e) {
    c.stall(e.what());
  }

  int code = kExitOk;
  if (c.nonconverged) {
    code = kExitNonConvergence;
  } else if (c.invariant || (opts.strict && !c.out.warnings.empty())) {
    code = kExitInvariant;
  }
  c.out.exit_code = code;
  const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  try {
    std::filesystem::create_directories(opts.out_dir / "plotdata");
    write_text(opts.out_dir / "results.csv", results_csv(c.rows), c.out);
    for (const auto& [name, series] : c.plots) {
      std::string body;
      for (const auto& [x, y] : series) body += format_number(x) + ' ' + format_number(y) + '\n';
      write_text(opts.out_dir / "plotdata" / (name + ".dat"), body, c.out);
    }
    Json m;
    m["tool"] = "nlspec";
    m["version"] = NLSPEC_VERSION;
    m["kind"] = std::string(to_string(cfg.kind));
    m["config_path"] = opts.config_path;
    m["config"] = render_config(cfg);
    m["seed"] = cfg.seed;
    m["threads"] = opts.threads;
    m["strict"] = opts.strict;
    m["versions"] = {{"nlspec", NLSPEC_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"compiler", __VERSION__}};
    m["wall_ms"] = wall_ms;
    Json rec_ms = Json::array();
    for (const auto& r : c.rows) rec_ms.push_back(r.wall_ms);
    m["record_wall_ms"] = rec_ms;
    m["summary"] = c.summary;
    m["warnings"] = c.out.warnings;
    m["violations"] = c.out.violations;
    m["exit_code"] = code;
    std::vector<std::string> files = c.out.files;
    files.push_back((opts.out_dir / "manifest.json").string());
    m["files"] = files;
    write_text(opts.out_dir / "manifest.json", m.dump(2) + "\n", c.out);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    c.out.exit_code = kExitUsage;
    return c.out;
  }
  for (const auto& w : c.out.warnings) log << "warning: " << w << '\n';
  for (const auto& v : c.out.violations) log << "violation: " << v << '\n';
  return c.out;
}

}  // namespace nlspec
