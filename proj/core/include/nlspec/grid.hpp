#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nlspec {

/// A point in R^1 or R^2. Unused coordinates are zero.
using Point = std::array<double, 2>;

struct AxisBounds {
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const AxisBounds&) const = default;
};

/// Maximum number of nodes a grid may hold.
inline constexpr std::size_t kMaxGridNodes = 10'000'000;

/// Uniform midpoint grid on a box in one or two dimensions.
///
/// Node i sits at the center of cell i; every cell carries the weight
/// h_0 * ... * h_{N-1}. In 2-D nodes are stored row-major with the first
/// axis varying slowest. Grids are immutable once built.
class Grid {
 public:
  /// Midpoint grid with a fixed number of nodes per axis.
  static Grid uniform(std::span<const AxisBounds> bounds,
                      std::span<const std::size_t> nodes_per_axis);

  /// Lattice-aligned grid: nodes at (k + 1/2) * spacing for integer k.
  ///
  /// Every bound must be an integer multiple of `spacing`. Two boxes built
  /// with the same spacing share bit-identical coordinates on their
  /// intersection, which is what nested exhaustion families rely on.
  static Grid lattice(std::span<const AxisBounds> bounds, double spacing);

  int dimension() const { return dimension_; }
  std::size_t size() const { return nodes_.size(); }

  /// Largest spacing over the axes.
  double spacing() const;
  double spacing(int axis) const { return spacing_[axis]; }
  std::size_t nodes_along(int axis) const { return counts_[axis]; }
  const AxisBounds& bounds(int axis) const { return bounds_[axis]; }

  const Point& node(std::size_t i) const { return nodes_[i]; }
  std::span<const Point> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Product of the axis extents.
  double volume() const;

  /// Euclidean distance from node i to the boundary of the box.
  double distance_to_boundary(std::size_t i) const;

  /// Grid on factor * box with coordinates multiplied by `factor` and
  /// weights by factor^N. Node ordering is preserved.
  Grid scaled(double factor) const;

  /// True when every node of `other` appears bit-identically in this grid.
  bool contains_nodes_of(const Grid& other) const;

 private:
  Grid() = default;
  void fill_weights();

  int dimension_ = 1;
  std::array<AxisBounds, 2> bounds_{};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::array<std::size_t, 2> counts_{1, 1};
  std::vector<Point> nodes_;
  std::vector<double> weights_;
};

}  // namespace nlspec
