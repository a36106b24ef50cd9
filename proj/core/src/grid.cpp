#include "nlspec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "nlspec/error.hpp"

namespace nlspec {

namespace {

void check_bounds(std::span<const AxisBounds> bounds) {
  if (bounds.empty() || bounds.size() > 2) {
    throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(bounds.size()));
  }
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper)) {
      throw InvalidArgument("grid bounds must be finite");
    }
    if (!(b.upper > b.lower)) {
      throw InvalidArgument("grid bounds are degenerate: upper must exceed lower");
    }
  }
}

void check_counts(std::span<const std::size_t> counts) {
  std::size_t total = 1;
  for (auto c : counts) {
    if (c < 2) throw InvalidArgument("grid resolution must be at least 2 nodes per axis");
    if (c > kMaxGridNodes || total > kMaxGridNodes / c) {
      throw InvalidArgument("grid resolution overflow: more than 10^7 nodes requested");
    }
    total *= c;
  }
}

}  // namespace

Grid Grid::uniform(std::span<const AxisBounds> bounds,
                   std::span<const std::size_t> nodes_per_axis) {
  check_bounds(bounds);
  if (nodes_per_axis.size() != bounds.size()) {
    throw InvalidArgument("resolution must list one node count per axis");
  }
  check_counts(nodes_per_axis);

  Grid g;
  g.dimension_ = static_cast<int>(bounds.size());
  std::array<std::vector<double>, 2> axis_coords;
  for (int a = 0; a < g.dimension_; ++a) {
    g.bounds_[a] = bounds[a];
    g.counts_[a] = nodes_per_axis[a];
    const double len = bounds[a].upper - bounds[a].lower;
    g.spacing_[a] = len / static_cast<double>(nodes_per_axis[a]);
    axis_coords[a].resize(nodes_per_axis[a]);
    for (std::size_t i = 0; i < nodes_per_axis[a]; ++i) {
      axis_coords[a][i] = bounds[a].lower + (static_cast<double>(i) + 0.5) * g.spacing_[a];
    }
  }
  if (g.dimension_ == 1) {
    for (double x : axis_coords[0]) g.nodes_.push_back({x, 0.0});
  } else {
    g.nodes_.reserve(g.counts_[0] * g.counts_[1]);
    for (double x : axis_coords[0]) {
      for (double y : axis_coords[1]) g.nodes_.push_back({x, y});
    }
  }
  g.fill_weights();
  return g;
}

Grid Grid::lattice(std::span<const AxisBounds> bounds, double spacing) {
  check_bounds(bounds);
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("grid spacing must be positive and finite");
  }
  Grid g;
  g.dimension_ = static_cast<int>(bounds.size());
  std::array<long long, 2> first{0, 0};
  std::array<std::size_t, 2> counts{1, 1};
  for (int a = 0; a < g.dimension_; ++a) {
    const double klo = bounds[a].lower / spacing;
    const double khi = bounds[a].upper / spacing;
    const double rlo = std::round(klo);
    const double rhi = std::round(khi);
    if (std::abs(klo - rlo) > 1e-9 * std::max(1.0, std::abs(klo)) ||
        std::abs(khi - rhi) > 1e-9 * std::max(1.0, std::abs(khi))) {
      throw InvalidArgument("lattice grid bounds must be integer multiples of the spacing");
    }
    first[a] = static_cast<long long>(rlo);
    const double n = rhi - rlo;
    if (n < 2.0 || n > static_cast<double>(kMaxGridNodes)) {
      throw InvalidArgument("lattice grid needs between 2 and 10^7 nodes per axis");
    }
    counts[a] = static_cast<std::size_t>(n);
  }
  check_counts(std::span<const std::size_t>(counts.data(), static_cast<std::size_t>(g.dimension_)));

  std::array<std::vector<double>, 2> axis_coords;
  for (int a = 0; a < g.dimension_; ++a) {
    g.counts_[a] = counts[a];
    g.spacing_[a] = spacing;
    g.bounds_[a] = {static_cast<double>(first[a]) * spacing,
                    static_cast<double>(first[a] + static_cast<long long>(counts[a])) * spacing};
    axis_coords[a].resize(counts[a]);
    for (std::size_t i = 0; i < counts[a]; ++i) {
      const auto k = first[a] + static_cast<long long>(i);
      axis_coords[a][i] = (static_cast<double>(k) + 0.5) * spacing;
    }
  }
  if (g.dimension_ == 1) {
    for (double x : axis_coords[0]) g.nodes_.push_back({x, 0.0});
  } else {
    for (double x : axis_coords[0]) {
      for (double y : axis_coords[1]) g.nodes_.push_back({x, y});
    }
  }
  g.fill_weights();
  return g;
}

void Grid::fill_weights() {
  double w = 1.0;
  for (int a = 0; a < dimension_; ++a) w *= spacing_[a];
  weights_.assign(nodes_.size(), w);
}

double Grid::spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < dimension_; ++a) h = std::max(h, spacing_[a]);
  return h;
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dimension_; ++a) v *= bounds_[a].upper - bounds_[a].lower;
  return v;
}

double Grid::distance_to_boundary(std::size_t i) const {
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dimension_; ++a) {
    d = std::min({d, nodes_[i][a] - bounds_[a].lower, bounds_[a].upper - nodes_[i][a]});
  }
  return d;
}

Grid Grid::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("grid scale factor must be positive and finite");
  }
  Grid g = *this;
  for (int a = 0; a < dimension_; ++a) {
    g.bounds_[a] = {bounds_[a].lower * factor, bounds_[a].upper * factor};
    g.spacing_[a] = spacing_[a] * factor;
  }
  for (auto& p : g.nodes_) {
    for (int a = 0; a < dimension_; ++a) p[a] *= factor;
  }
  g.fill_weights();
  return g;
}

bool Grid::contains_nodes_of(const Grid& other) const {
  if (other.dimension_ != dimension_) return false;
  std::set<Point> mine(nodes_.begin(), nodes_.end());
  return std::all_of(other.nodes_.begin(), other.nodes_.end(),
                     [&](const Point& p) { return mine.count(p) != 0; });
}

}  // namespace nlspec
