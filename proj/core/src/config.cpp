#include "nlspec/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

// ---------------------------------------------------------------------------
// Document model for the TOML subset.

struct Value {
  enum class Type { integer, number, boolean, string, array };
  Type type = Type::number;
  std::int64_t integer = 0;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  std::vector<Value> items;
  int line = 0;
};

struct Table {
  int line = 0;
  std::map<std::string, Value> entries;
};

using Document = std::map<std::string, Table>;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_bare_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

class ValueParser {
 public:
  ValueParser(std::string_view s, int line) : s_(s), line_(line) {}

  std::optional<Value> parse(std::string& error) {
    auto v = value(error, true);
    if (!v) return std::nullopt;
    skip_ws();
    if (pos_ != s_.size()) {
      error = "unexpected trailing characters '" + std::string(s_.substr(pos_)) + "'";
      return std::nullopt;
    }
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::optional<Value> value(std::string& error, bool allow_array) {
    skip_ws();
    if (pos_ >= s_.size()) {
      error = "missing value";
      return std::nullopt;
    }
    const char c = s_[pos_];
    if (c == '"') return string_value(error);
    if (c == '[') {
      if (!allow_array) {
        error = "nested arrays are not supported";
        return std::nullopt;
      }
      return array_value(error);
    }
    return scalar(error);
  }

  std::optional<Value> string_value(std::string& error) {
    Value v;
    v.type = Value::Type::string;
    v.line = line_;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n':
            c = '\n';
            break;
          case 't':
            c = '\t';
            break;
          case '"':
          case '\\':
            c = e;
            break;
          default:
            error = std::string("unsupported escape \\") + e;
            return std::nullopt;
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= s_.size()) {
      error = "unterminated string";
      return std::nullopt;
    }
    ++pos_;
    return v;
  }

  std::optional<Value> array_value(std::string& error) {
    Value v;
    v.type = Value::Type::array;
    v.line = line_;
    ++pos_;
    while (true) {
      skip_ws();
      if (pos_ >= s_.size()) {
        error = "unterminated array (arrays must fit on one line)";
        return std::nullopt;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      auto item = value(error, false);
      if (!item) return std::nullopt;
      v.items.push_back(std::move(*item));
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
      } else if (pos_ < s_.size() && s_[pos_] != ']') {
        error = "expected ',' or ']' in array";
        return std::nullopt;
      }
    }
  }

  std::optional<Value> scalar(std::string& error) {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    const std::string_view tok = s_.substr(start, pos_ - start);
    Value v;
    v.line = line_;
    if (tok == "true" || tok == "false") {
      v.type = Value::Type::boolean;
      v.boolean = tok == "true";
      return v;
    }
    if (tok == "inf" || tok == "+inf" || tok == "-inf") {
      v.type = Value::Type::number;
      v.number = tok[0] == '-' ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
      return v;
    }
    std::string clean;
    for (char ch : tok) {
      if (ch != '_') clean.push_back(ch);
    }
    std::string_view body = clean;
    if (!body.empty() && body[0] == '+') body.remove_prefix(1);
    const bool integral =
        !body.empty() && body.find_first_not_of("-0123456789") == std::string_view::npos && body.find('-', 1) == std::string_view::npos;
    if (integral) {
      std::int64_t i = 0;
      const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), i);
      if (ec == std::errc() && p == body.data() + body.size()) {
        v.type = Value::Type::integer;
        v.integer = i;
        v.number = static_cast<double>(i);
        return v;
      }
    }
    double d = 0.0;
    const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), d);
    if (body.empty() || ec != std::errc() || p != body.data() + body.size() || std::isnan(d) ||
        body.find_first_of("0123456789") == std::string_view::npos) {
      error = "invalid value '" + std::string(tok) + "'";
      return std::nullopt;
    }
    v.type = Value::Type::number;
    v.number = d;
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

Document parse_document(std::string_view text, std::vector<ConfigIssue>& errors) {
  Document doc;
  doc[""].line = 0;
  std::string current;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back({line_no, "malformed table header"});
        continue;
      }
      const std::string name(trim(line.substr(1, line.size() - 2)));
      std::size_t p = 0;
      bool good = !name.empty();
      while (good && p <= name.size()) {
        const std::size_t dot = name.find('.', p);
        good = is_bare_key(std::string_view(name).substr(p, dot == std::string::npos ? std::string::npos : dot - p));
        if (dot == std::string::npos) break;
        p = dot + 1;
      }
      if (!good) {
        errors.push_back({line_no, "invalid table name '" + name + "'"});
        continue;
      }
      if (doc.count(name) && name != "") {
        errors.push_back({line_no, "duplicate table [" + name + "]"});
      }
      current = name;
      doc[current].line = line_no;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!is_bare_key(key)) {
      errors.push_back({line_no, "invalid key '" + key + "'"});
      continue;
    }
    std::string err;
    ValueParser vp(trim(line.substr(eq + 1)), line_no);
    auto v = vp.parse(err);
    if (!v) {
      errors.push_back({line_no, "key '" + key + "': " + err});
      continue;
    }
    auto& entries = doc[current].entries;
    if (entries.count(key)) {
      errors.push_back({line_no, "duplicate key '" + key + "'"});
      continue;
    }
    entries.emplace(key, std::move(*v));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Typed extraction.

std::string qualified(const std::string& table, const std::string& key) {
  return table.empty() ? key : table + "." + key;
}

class Reader {
 public:
  Reader(const Document& doc, std::string table, std::vector<ConfigIssue>& errors)
      : errors_(errors), name_(std::move(table)) {
    auto it = doc.find(name_);
    if (it != doc.end()) table_ = &it->second;
  }

  bool present() const { return table_ != nullptr; }
  int line() const { return table_ ? table_->line : 0; }

  int line_of(const std::string& key) const {
    if (!table_) return 0;
    auto it = table_->entries.find(key);
    return it == table_->entries.end() ? table_->line : it->second.line;
  }

  bool has(const std::string& key) const { return table_ && table_->entries.count(key); }

  void number(const std::string& key, double& dst) {
    if (const Value* v = get(key)) {
      if (v->type == Value::Type::number || v->type == Value::Type::integer) {
        dst = v->number;
      } else {
        mismatch(*v, key, "a number");
      }
    }
  }

  void integer(const std::string& key, std::int64_t& dst) {
    if (const Value* v = get(key)) {
      if (v->type == Value::Type::integer) {
        dst = v->integer;
      } else {
        mismatch(*v, key, "an integer");
      }
    }
  }

  void integer(const std::string& key, int& dst) {
    std::int64_t tmp = dst;
    integer(key, tmp);
    if (tmp < std::numeric_limits<int>::min() || tmp > std::numeric_limits<int>::max()) {
      errors_.push_back({line_of(key), qualified(name_, key) + " is out of range"});
      return;
    }
    dst = static_cast<int>(tmp);
  }

  void boolean(const std::string& key, bool& dst) {
    if (const Value* v = get(key)) {
      if (v->type == Value::Type::boolean) {
        dst = v->boolean;
      } else {
        mismatch(*v, key, "a boolean");
      }
    }
  }

  void string(const std::string& key, std::string& dst) {
    if (const Value* v = get(key)) {
      if (v->type == Value::Type::string) {
        dst = v->text;
      } else {
        mismatch(*v, key, "a string");
      }
    }
  }

  void numbers(const std::string& key, std::vector<double>& dst) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::array) {
        mismatch(*v, key, "an array of numbers");
        return;
      }
      std::vector<double> out;
      for (const auto& item : v->items) {
        if (item.type != Value::Type::number && item.type != Value::Type::integer) {
          mismatch(*v, key, "an array of numbers");
          return;
        }
        out.push_back(item.number);
      }
      dst = std::move(out);
    }
  }

  void integers(const std::string& key, std::vector<std::int64_t>& dst) {
    if (const Value* v = get(key)) {
      if (v->type != Value::Type::array) {
        mismatch(*v, key, "an array of integers");
        return;
      }
      std::vector<std::int64_t> out;
      for (const auto& item : v->items) {
        if (item.type != Value::Type::integer) {
          mismatch(*v, key, "an array of integers");
          return;
        }
        out.push_back(item.integer);
      }
      dst = std::move(out);
    }
  }

  void point(const std::string& key, Point& dst) {
    std::vector<double> tmp;
    if (!has(key)) return;
    numbers(key, tmp);
    if (tmp.empty() || tmp.size() > 2) {
      errors_.push_back({line_of(key), qualified(name_, key) + " must hold one or two numbers"});
      return;
    }
    dst = {tmp[0], tmp.size() > 1 ? tmp[1] : 0.0};
  }

  template <class E, class F>
  void choice(const std::string& key, E& dst, F&& from_string, std::string_view allowed) {
    std::string s;
    if (!has(key)) return;
    string(key, s);
    if (s.empty() && get_type(key) != Value::Type::string) return;
    if (auto e = from_string(s)) {
      dst = *e;
    } else {
      errors_.push_back({line_of(key), qualified(name_, key) + ": unknown value '" + s + "' (expected one of " +
                                           std::string(allowed) + ")"});
    }
  }

  void finish() {
    if (!table_) return;
    for (const auto& [key, v] : table_->entries) {
      if (!used_.count(key)) errors_.push_back({v.line, "unknown key '" + qualified(name_, key) + "'"});
    }
  }

 private:
  const Value* get(const std::string& key) {
    if (!table_) return nullptr;
    auto it = table_->entries.find(key);
    if (it == table_->entries.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  Value::Type get_type(const std::string& key) const { return table_->entries.at(key).type; }

  void mismatch(const Value& v, const std::string& key, std::string_view expected) {
    errors_.push_back({v.line, "type mismatch: " + qualified(name_, key) + " must be " + std::string(expected)});
  }

  std::vector<ConfigIssue>& errors_;
  std::string name_;
  const Table* table_ = nullptr;
  std::set<std::string> used_;
};

constexpr std::string_view kKinds = "eig, sweep, exhaust, compare_local, eigfn_conv, growth, invariance, mono_m0, check_all";

std::string_view to_string(LimitDirection d) { return d == LimitDirection::to_zero ? "to_zero" : "to_infinity"; }

std::optional<LimitDirection> direction_from_string(std::string_view s) {
  if (s == "to_zero") return LimitDirection::to_zero;
  if (s == "to_infinity") return LimitDirection::to_infinity;
  return std::nullopt;
}

std::optional<std::optional<LimitTarget>> target_from_string(std::string_view s) {
  if (s == "none") return std::optional<LimitTarget>{};
  if (auto t = limit_target_from_string(s)) return std::optional<LimitTarget>{*t};
  return std::nullopt;
}

void read_coefficient(Reader& r, CoefficientSpec& c) {
  r.choice("family", c.family, coefficient_family_from_string,
           "constant, cosine_bump, gaussian_bump, power_cusp, piecewise, tabulated");
  r.number("value", c.value);
  r.number("amplitude", c.amplitude);
  r.number("frequency", c.frequency);
  r.number("offset", c.offset);
  r.number("width", c.width);
  r.number("support", c.support);
  r.number("nu", c.nu);
  r.number("beta", c.beta);
  r.point("center", c.center);
  r.numbers("knots", c.knots);
  r.numbers("values", c.values);
  r.numbers("table", c.table);
  if (r.has("holder")) {
    double h = 1.0;
    r.number("holder", h);
    c.holder = h;
  }
  r.number("domain_scale", c.domain_scale);
  r.finish();
}

template <class F>
void check(std::vector<ConfigIssue>& errors, int line, bool ok, F&& message) {
  if (!ok) errors.push_back({line, message()});
}

bool all_positive(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

bool strictly_monotone(const std::vector<double>& v) {
  if (strictly_increasing(v)) return true;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_config(const ExperimentConfig& cfg, const Reader& grid_r, const Reader& kernel_r,
                     const Reader& coef_r, const Reader& solver_r, const Reader& sweep_r, const Reader& exhaust_r,
                     const Reader& eigfn_r, const Reader& growth_r, const Reader& mono_r, const Reader& check_r,
                     const Reader& inv_r, std::vector<ConfigIssue>& errors) {
  const std::size_t before = errors.size();
  const auto& g = cfg.grid;
  check(errors, grid_r.line_of("dimension"), g.dimension == 1 || g.dimension == 2,
        [] { return std::string("grid.dimension must be 1 or 2"); });
  const auto dim = static_cast<std::size_t>(std::clamp(g.dimension, 1, 2));
  check(errors, grid_r.line(), g.lower.size() == dim && g.upper.size() == dim && g.nodes.size() == dim,
        [] { return std::string("grid.lower, grid.upper and grid.nodes need one entry per dimension"); });
  for (std::size_t i = 0; i < std::min({g.lower.size(), g.upper.size()}); ++i) {
    check(errors, grid_r.line_of("lower"),
          std::isfinite(g.lower[i]) && std::isfinite(g.upper[i]) && g.lower[i] < g.upper[i],
          [] { return std::string("grid bounds must be finite with lower < upper"); });
  }
  for (auto n : g.nodes) {
    check(errors, grid_r.line_of("nodes"), n >= 2, [] { return std::string("grid.nodes must be at least 2 per axis"); });
  }

  const auto& k = cfg.kernel;
  check(errors, kernel_r.line_of("m"), k.m >= 0.0 && k.m <= 2.0, [] { return std::string("m must lie in [0,2]"); });
  check(errors, kernel_r.line_of("sigma"), k.sigma > 0.0 && std::isfinite(k.sigma),
        [] { return std::string("kernel.sigma must be positive"); });
  check(errors, kernel_r.line_of("radius"), k.radius > 0.0 && std::isfinite(k.radius),
        [] { return std::string("kernel.radius must be positive"); });
  for (double m : cfg.sweep.m) {
    check(errors, sweep_r.line_of("m"), m >= 0.0 && m <= 2.0, [] { return std::string("m must lie in [0,2]"); });
  }
  if (errors.size() == before) {
    try {
      validate(k);
    } catch (const Error& e) {
      errors.push_back({kernel_r.line(), std::string("kernel: ") + e.what()});
    }
  }
  try {
    validate(cfg.coefficient);
  } catch (const Error& e) {
    errors.push_back({coef_r.line(), std::string("coefficient: ") + e.what()});
  }
  check(errors, solver_r.line_of("tol"), cfg.solver.tol > 0.0 && std::isfinite(cfg.solver.tol),
        [] { return std::string("solver.tol must be positive"); });
  check(errors, solver_r.line_of("max_iter"), cfg.solver.max_iter >= 0,
        [] { return std::string("solver.max_iter must be nonnegative"); });
  check(errors, exhaust_r.line_of("stagnation_tol"), cfg.exhaust.stagnation_tol > 0.0,
        [] { return std::string("exhaust.stagnation_tol must be positive"); });
  check(errors, mono_r.line_of("change_tol"), cfg.mono.change_tol > 0.0,
        [] { return std::string("mono.change_tol must be positive"); });
  check(errors, mono_r.line_of("mono_tol"), cfg.mono.mono_tol > 0.0,
        [] { return std::string("mono.mono_tol must be positive"); });
  check(errors, check_r.line_of("instances"), cfg.check.instances > 0,
        [] { return std::string("check.instances must be positive"); });
  check(errors, check_r.line_of("max_nodes"), cfg.check.max_nodes >= 8 && cfg.check.max_nodes <= 400,
        [] { return std::string("check.max_nodes must lie in [8,400]"); });
  if (errors.size() != before) return;

  const bool on_grid = cfg.kind == ExperimentKind::eig || cfg.kind == ExperimentKind::growth ||
                       cfg.kind == ExperimentKind::invariance;
  if (on_grid) {
    try {
      const Grid grid = make_grid(g);
      const double limit = max_spacing(k, grid);
      check(errors, grid_r.line_of("nodes"), grid.spacing() <= limit * (1.0 + 1e-12), [&] {
        return "resolution rule violated: grid spacing h = " + fmt(grid.spacing()) +
               " exceeds sigma*r/8 = " + fmt(limit);
      });
      if (cfg.coefficient.family == CoefficientFamily::tabulated) {
        check(errors, coef_r.line_of("table"), cfg.coefficient.table.size() == grid.size(),
              [] { return std::string("coefficient.table needs one value per grid node"); });
      }
    } catch (const Error& e) {
      errors.push_back({grid_r.line(), std::string("grid: ") + e.what()});
    }
    if (cfg.kind == ExperimentKind::invariance) {
      check(errors, inv_r.line_of("factors"), !cfg.invariance.factors.empty() && all_positive(cfg.invariance.factors),
            [] { return std::string("invariance.factors must be a nonempty list of positive numbers"); });
      check(errors, 0, cfg.variant == OperatorVariant::L_plus_a,
            [] { return std::string("invariance runs on the L_plus_a variant"); });
    }
    if (cfg.kind == ExperimentKind::growth) {
      check(errors, growth_r.line_of("t_end"), cfg.growth.t_end > 0.0,
            [] { return std::string("growth.t_end must be positive"); });
      check(errors, growth_r.line_of("dt"), cfg.growth.dt >= 0.0 && cfg.growth.dt < cfg.growth.t_end,
            [] { return std::string("growth.dt must lie in [0, t_end)"); });
    }
  }

  const bool sweeping = cfg.kind == ExperimentKind::sweep || cfg.kind == ExperimentKind::compare_local;
  if (sweeping) {
    const auto& s = cfg.sweep;
    const int line = sweep_r.line_of("sigmas");
    check(errors, line, !s.sigmas.empty() && all_positive(s.sigmas),
          [] { return std::string("sweep.sigmas must be a nonempty list of positive numbers"); });
    check(errors, line, strictly_monotone(s.sigmas), [] { return std::string("sweep.sigmas must be sorted"); });
    check(errors, sweep_r.line_of("m"), !s.m.empty(), [] { return std::string("sweep.m must not be empty"); });
    check(errors, sweep_r.line_of("order"), s.order == 1 || s.order == 2,
          [] { return std::string("sweep.order must be 1 or 2"); });
    if (s.rule == ResolutionRule::aligned) {
      check(errors, sweep_r.line_of("nodes_per_radius"), s.nodes_per_radius >= 8.0,
            [] { return std::string("resolution rule violated: sweep.nodes_per_radius must be at least 8 (h <= sigma*r/8)"); });
    } else if (!s.sigmas.empty()) {
      const double smin = *std::min_element(s.sigmas.begin(), s.sigmas.end());
      const double limit = smin * k.radius * k.domain_scale / 8.0;
      check(errors, sweep_r.line_of("h"), s.h > 0.0 && s.h <= limit * (1.0 + 1e-12), [&] {
        return "resolution rule violated: sweep.h = " + fmt(s.h) + " exceeds sigma*r/8 = " + fmt(limit) +
               " for the smallest sigma";
      });
    }
    check(errors, 0, k.variant == KernelVariant::convolution,
          [] { return std::string("sweeps need a convolution kernel"); });
  }

  if (cfg.kind == ExperimentKind::exhaust) {
    const auto& e = cfg.exhaust;
    check(errors, exhaust_r.line_of("half_widths"), !e.half_widths.empty() && all_positive(e.half_widths) &&
                                                         strictly_increasing(e.half_widths),
          [] { return std::string("exhaust.half_widths must be a nonempty increasing list of positive numbers"); });
    check(errors, exhaust_r.line_of("h"), e.h > 0.0, [] { return std::string("exhaust.h must be positive"); });
    if (e.h > 0.0) {
      KernelSpec kk = k;
      const double limit = k.variant == KernelVariant::slow_decay_1d ? std::numeric_limits<double>::infinity()
                                                                     : k.sigma * k.radius * k.domain_scale / 8.0;
      check(errors, exhaust_r.line_of("h"), k.variant == KernelVariant::general || e.h <= limit * (1.0 + 1e-12), [&] {
        return "resolution rule violated: exhaust.h = " + fmt(e.h) + " exceeds sigma*r/8 = " + fmt(limit);
      });
    }
  }

  if (cfg.kind == ExperimentKind::eigfn_conv) {
    const auto& e = cfg.eigfn;
    check(errors, eigfn_r.line_of("sigmas"), !e.sigmas.empty() && all_positive(e.sigmas),
          [] { return std::string("eigfn.sigmas must be a nonempty list of positive numbers"); });
    std::vector<double> rev(e.sigmas.rbegin(), e.sigmas.rend());
    check(errors, eigfn_r.line_of("sigmas"), strictly_increasing(rev),
          [] { return std::string("eigfn.sigmas must decrease"); });
    check(errors, eigfn_r.line_of("margins"),
          !e.margins.empty() && std::all_of(e.margins.begin(), e.margins.end(), [](double m) { return m >= 0.0; }),
          [] { return std::string("eigfn.margins must be a nonempty list of nonnegative numbers"); });
    check(errors, eigfn_r.line_of("nodes_per_radius"), e.nodes_per_radius >= 8.0,
          [] { return std::string("resolution rule violated: eigfn.nodes_per_radius must be at least 8 (h <= sigma*r/8)"); });
  }

  if (cfg.kind == ExperimentKind::mono_m0) {
    const auto& m = cfg.mono;
    check(errors, mono_r.line_of("sigmas"), !m.sigmas.empty() && all_positive(m.sigmas) && strictly_increasing(m.sigmas),
          [] { return std::string("mono.sigmas must be a nonempty increasing list of positive numbers"); });
    check(errors, mono_r.line_of("h"), m.h > 0.0, [] { return std::string("mono.h must be positive"); });
    check(errors, mono_r.line_of("step"), m.step > 0.0, [] { return std::string("mono.step must be positive"); });
    check(errors, mono_r.line_of("max_half_width"), m.max_half_width >= m.initial_half_width && m.initial_half_width > 0.0,
          [] { return std::string("mono needs 0 < initial_half_width <= max_half_width"); });
    if (!m.sigmas.empty() && m.h > 0.0) {
      const double limit = m.sigmas.front() * k.radius * k.domain_scale / 8.0;
      check(errors, mono_r.line_of("h"), m.h <= limit * (1.0 + 1e-12), [&] {
        return "resolution rule violated: mono.h = " + fmt(m.h) + " exceeds sigma*r/8 = " + fmt(limit);
      });
    }
    check(errors, 0, k.variant == KernelVariant::convolution,
          [] { return std::string("mono_m0 needs a convolution kernel"); });
  }
}

// ---------------------------------------------------------------------------
// Rendering.

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), p);
  // Keep floats recognisable as floats.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string nums(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string ints(const std::vector<std::int64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "]";
}

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

void render_coefficient(std::ostringstream& os, const CoefficientSpec& c) {
  os << "family = " << quoted(to_string(c.family)) << '\n';
  os << "value = " << num(c.value) << '\n';
  os << "amplitude = " << num(c.amplitude) << '\n';
  os << "frequency = " << num(c.frequency) << '\n';
  os << "offset = " << num(c.offset) << '\n';
  os << "width = " << num(c.width) << '\n';
  os << "support = " << num(c.support) << '\n';
  os << "nu = " << num(c.nu) << '\n';
  os << "beta = " << num(c.beta) << '\n';
  os << "center = " << nums({c.center[0], c.center[1]}) << '\n';
  os << "knots = " << nums(c.knots) << '\n';
  os << "values = " << nums(c.values) << '\n';
  os << "table = " << nums(c.table) << '\n';
  if (c.holder) os << "holder = " << num(*c.holder) << '\n';
  os << "domain_scale = " << num(c.domain_scale) << '\n';
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::eig:
      return "eig";
    case ExperimentKind::sweep:
      return "sweep";
    case ExperimentKind::exhaust:
      return "exhaust";
    case ExperimentKind::compare_local:
      return "compare_local";
    case ExperimentKind::eigfn_conv:
      return "eigfn_conv";
    case ExperimentKind::growth:
      return "growth";
    case ExperimentKind::invariance:
      return "invariance";
    case ExperimentKind::mono_m0:
      return "mono_m0";
    case ExperimentKind::check_all:
      return "check_all";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_kind_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::eig, ExperimentKind::sweep, ExperimentKind::exhaust, ExperimentKind::compare_local,
                 ExperimentKind::eigfn_conv, ExperimentKind::growth, ExperimentKind::invariance,
                 ExperimentKind::mono_m0, ExperimentKind::check_all}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string format_issue(const ConfigIssue& issue) {
  return issue.line > 0 ? "line " + std::to_string(issue.line) + ": " + issue.message : issue.message;
}

Grid make_grid(const GridConfig& g) {
  if (g.lower.size() != static_cast<std::size_t>(g.dimension) || g.upper.size() != g.lower.size() ||
      g.nodes.size() != g.lower.size()) {
    throw InvalidArgument("grid arrays must have one entry per dimension");
  }
  std::vector<AxisBounds> b;
  std::vector<std::size_t> n;
  for (std::size_t i = 0; i < g.lower.size(); ++i) {
    b.push_back({g.lower[i], g.upper[i]});
    if (g.nodes[i] < 2) throw InvalidArgument("grid needs at least 2 nodes per axis");
    n.push_back(static_cast<std::size_t>(g.nodes[i]));
  }
  return Grid::uniform(b, n);
}

SolverOptions solver_options(const ExperimentConfig& cfg) {
  SolverOptions o;
  o.tol = cfg.solver.tol;
  o.max_iter = static_cast<std::size_t>(cfg.solver.max_iter);
  return o;
}

ParseOutcome parse_config(std::string_view text, std::optional<ExperimentKind> kind) {
  ParseOutcome out;
  Document doc = parse_document(text, out.errors);
  ExperimentConfig cfg;

  static const std::set<std::string> kTables{"",      "grid",   "kernel",     "kernel.g", "kernel.h",
                                             "coefficient", "operator", "solver", "sweep",    "exhaust",
                                             "eigfn", "growth", "invariance", "mono",     "check"};
  for (const auto& [name, table] : doc) {
    if (!kTables.count(name)) out.errors.push_back({table.line, "unknown table [" + name + "]"});
  }

  Reader top(doc, "", out.errors);
  top.choice("kind", cfg.kind, experiment_kind_from_string, kKinds);
  if (kind) {
    if (top.has("kind") && cfg.kind != *kind) {
      out.errors.push_back({top.line_of("kind"), "config declares kind '" + std::string(to_string(cfg.kind)) +
                                                     "' but '" + std::string(to_string(*kind)) + "' was requested"});
    }
    cfg.kind = *kind;
  }
  top.integer("seed", cfg.seed);
  top.string("output", cfg.output);
  top.finish();

  Reader grid_r(doc, "grid", out.errors);
  grid_r.integer("dimension", cfg.grid.dimension);
  if (cfg.grid.dimension == 2) {
    cfg.grid.lower = {0.0, 0.0};
    cfg.grid.upper = {1.0, 1.0};
    cfg.grid.nodes = {32, 32};
  }
  grid_r.numbers("lower", cfg.grid.lower);
  grid_r.numbers("upper", cfg.grid.upper);
  grid_r.integers("nodes", cfg.grid.nodes);
  grid_r.finish();

  Reader kernel_r(doc, "kernel", out.errors);
  auto& k = cfg.kernel;
  k.dimension = cfg.grid.dimension;
  kernel_r.choice("variant", k.variant, kernel_variant_from_string, "convolution, general, slow_decay_1d");
  kernel_r.choice("family", k.family, kernel_family_from_string, "uniform, triangle, epanechnikov, quartic");
  kernel_r.number("radius", k.radius);
  kernel_r.number("sigma", k.sigma);
  kernel_r.number("m", k.m);
  kernel_r.number("drift", k.drift);
  kernel_r.number("domain_scale", k.domain_scale);
  kernel_r.number("amplitude", k.amplitude);
  kernel_r.number("alpha", k.alpha);
  kernel_r.number("truncation", k.truncation);
  kernel_r.finish();
  Reader g_r(doc, "kernel.g", out.errors);
  read_coefficient(g_r, k.modulation_g);
  Reader h_r(doc, "kernel.h", out.errors);
  read_coefficient(h_r, k.modulation_h);

  Reader coef_r(doc, "coefficient", out.errors);
  read_coefficient(coef_r, cfg.coefficient);

  Reader op_r(doc, "operator", out.errors);
  op_r.choice("variant", cfg.variant, operator_variant_from_string, "L_plus_a, M_plus_a");
  op_r.finish();

  Reader solver_r(doc, "solver", out.errors);
  solver_r.number("tol", cfg.solver.tol);
  solver_r.integer("max_iter", cfg.solver.max_iter);
  solver_r.finish();

  Reader sweep_r(doc, "sweep", out.errors);
  auto& s = cfg.sweep;
  sweep_r.numbers("sigmas", s.sigmas);
  sweep_r.numbers("m", s.m);
  sweep_r.choice("rule", s.rule, resolution_rule_from_string, "aligned, fixed");
  sweep_r.number("nodes_per_radius", s.nodes_per_radius);
  sweep_r.number("h", s.h);
  sweep_r.choice("target", s.target, target_from_string, "none, minus_nu, one_minus_nu, lambda1");
  sweep_r.choice("direction", s.direction, direction_from_string, "to_zero, to_infinity");
  sweep_r.integer("order", s.order);
  sweep_r.finish();

  Reader exhaust_r(doc, "exhaust", out.errors);
  exhaust_r.numbers("half_widths", cfg.exhaust.half_widths);
  exhaust_r.number("h", cfg.exhaust.h);
  exhaust_r.number("stagnation_tol", cfg.exhaust.stagnation_tol);
  exhaust_r.boolean("lambda_v", cfg.exhaust.lambda_v);
  exhaust_r.finish();

  Reader eigfn_r(doc, "eigfn", out.errors);
  eigfn_r.numbers("sigmas", cfg.eigfn.sigmas);
  eigfn_r.numbers("margins", cfg.eigfn.margins);
  eigfn_r.number("nodes_per_radius", cfg.eigfn.nodes_per_radius);
  eigfn_r.finish();

  Reader growth_r(doc, "growth", out.errors);
  growth_r.number("t_end", cfg.growth.t_end);
  growth_r.number("dt", cfg.growth.dt);
  growth_r.finish();

  Reader inv_r(doc, "invariance", out.errors);
  inv_r.numbers("factors", cfg.invariance.factors);
  inv_r.finish();

  Reader mono_r(doc, "mono", out.errors);
  auto& m = cfg.mono;
  mono_r.numbers("sigmas", m.sigmas);
  mono_r.number("h", m.h);
  mono_r.number("initial_half_width", m.initial_half_width);
  mono_r.number("step", m.step);
  mono_r.number("max_half_width", m.max_half_width);
  mono_r.number("change_tol", m.change_tol);
  mono_r.number("mono_tol", m.mono_tol);
  mono_r.finish();

  Reader check_r(doc, "check", out.errors);
  check_r.integer("instances", cfg.check.instances);
  check_r.integer("max_nodes", cfg.check.max_nodes);
  check_r.finish();

  // keys that failed to read keep their defaults, so range checks still apply
  validate_config(cfg, grid_r, kernel_r, coef_r, solver_r, sweep_r, exhaust_r, eigfn_r, growth_r, mono_r, check_r,
                  inv_r, out.errors);
  std::stable_sort(out.errors.begin(), out.errors.end(),
                   [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "kind = " << quoted(to_string(cfg.kind)) << '\n';
  os << "seed = " << cfg.seed << '\n';
  os << "output = " << quoted(cfg.output) << '\n';

  os << "\n[grid]\n";
  os << "dimension = " << cfg.grid.dimension << '\n';
  os << "lower = " << nums(cfg.grid.lower) << '\n';
  os << "upper = " << nums(cfg.grid.upper) << '\n';
  os << "nodes = " << ints(cfg.grid.nodes) << '\n';

  const auto& k = cfg.kernel;
  os << "\n[kernel]\n";
  os << "variant = " << quoted(to_string(k.variant)) << '\n';
  os << "family = " << quoted(to_string(k.family)) << '\n';
  os << "radius = " << num(k.radius) << '\n';
  os << "sigma = " << num(k.sigma) << '\n';
  os << "m = " << num(k.m) << '\n';
  os << "drift = " << num(k.drift) << '\n';
  os << "domain_scale = " << num(k.domain_scale) << '\n';
  os << "amplitude = " << num(k.amplitude) << '\n';
  os << "alpha = " << num(k.alpha) << '\n';
  os << "truncation = " << num(k.truncation) << '\n';
  const CoefficientSpec one = CoefficientSpec::constant_value(1.0);
  if (k.modulation_g != one) {
    os << "\n[kernel.g]\n";
    render_coefficient(os, k.modulation_g);
  }
  if (k.modulation_h != one) {
    os << "\n[kernel.h]\n";
    render_coefficient(os, k.modulation_h);
  }

  os << "\n[coefficient]\n";
  render_coefficient(os, cfg.coefficient);

  os << "\n[operator]\n";
  os << "variant = " << quoted(to_string(cfg.variant)) << '\n';

  os << "\n[solver]\n";
  os << "tol = " << num(cfg.solver.tol) << '\n';
  os << "max_iter = " << cfg.solver.max_iter << '\n';

  const auto& s = cfg.sweep;
  os << "\n[sweep]\n";
  os << "sigmas = " << nums(s.sigmas) << '\n';
  os << "m = " << nums(s.m) << '\n';
  os << "rule = " << quoted(to_string(s.rule)) << '\n';
  os << "nodes_per_radius = " << num(s.nodes_per_radius) << '\n';
  os << "h = " << num(s.h) << '\n';
  os << "target = " << quoted(s.target ? to_string(*s.target) : "none") << '\n';
  os << "direction = " << quoted(to_string(s.direction)) << '\n';
  os << "order = " << s.order << '\n';

  os << "\n[exhaust]\n";
  os << "half_widths = " << nums(cfg.exhaust.half_widths) << '\n';
  os << "h = " << num(cfg.exhaust.h) << '\n';
  os << "stagnation_tol = " << num(cfg.exhaust.stagnation_tol) << '\n';
  os << "lambda_v = " << (cfg.exhaust.lambda_v ? "true" : "false") << '\n';

  os << "\n[eigfn]\n";
  os << "sigmas = " << nums(cfg.eigfn.sigmas) << '\n';
  os << "margins = " << nums(cfg.eigfn.margins) << '\n';
  os << "nodes_per_radius = " << num(cfg.eigfn.nodes_per_radius) << '\n';

  os << "\n[growth]\n";
  os << "t_end = " << num(cfg.growth.t_end) << '\n';
  os << "dt = " << num(cfg.growth.dt) << '\n';

  os << "\n[invariance]\n";
  os << "factors = " << nums(cfg.invariance.factors) << '\n';

  const auto& m = cfg.mono;
  os << "\n[mono]\n";
  os << "sigmas = " << nums(m.sigmas) << '\n';
  os << "h = " << num(m.h) << '\n';
  os << "initial_half_width = " << num(m.initial_half_width) << '\n';
  os << "step = " << num(m.step) << '\n';
  os << "max_half_width = " << num(m.max_half_width) << '\n';
  os << "change_tol = " << num(m.change_tol) << '\n';
  os << "mono_tol = " << num(m.mono_tol) << '\n';

  os << "\n[check]\n";
  os << "instances = " << cfg.check.instances << '\n';
  os << "max_nodes = " << cfg.check.max_nodes << '\n';
  return os.str();
}

}  // namespace nlspec
