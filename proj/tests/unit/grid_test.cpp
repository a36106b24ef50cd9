#include <array>
#include <cmath>

#include <gtest/gtest.h>

#include "nlspec/error.hpp"
#include "nlspec/grid.hpp"

namespace nlspec {
namespace {

Grid line(double lo, double hi, std::size_t n) {
  const std::array<AxisBounds, 1> b{AxisBounds{lo, hi}};
  const std::array<std::size_t, 1> c{n};
  return Grid::uniform(b, c);
}

TEST(Grid, MidpointNodesOnUnitInterval) {
  const Grid g = line(0.0, 1.0, 4);
  ASSERT_EQ(g.size(), 4u);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(g.node(i)[0], expected[i]);
    EXPECT_DOUBLE_EQ(g.weights()[i], 0.25);
  }
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
}

TEST(Grid, SquareWeightsSumToArea) {
  const std::array<AxisBounds, 2> b{AxisBounds{0.0, 1.0}, AxisBounds{0.0, 1.0}};
  const std::array<std::size_t, 2> c{3, 3};
  const Grid g = Grid::uniform(b, c);
  EXPECT_EQ(g.size(), 9u);
  double s = 0.0;
  for (double w : g.weights()) s += w;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Grid, RowMajorFirstAxisSlowest) {
  const std::array<AxisBounds, 2> b{AxisBounds{0.0, 2.0}, AxisBounds{0.0, 1.0}};
  const std::array<std::size_t, 2> c{4, 2};
  const Grid g = Grid::uniform(b, c);
  EXPECT_DOUBLE_EQ(g.node(0)[0], 0.25);
  EXPECT_DOUBLE_EQ(g.node(0)[1], 0.25);
  EXPECT_DOUBLE_EQ(g.node(1)[0], 0.25);
  EXPECT_DOUBLE_EQ(g.node(1)[1], 0.75);
  EXPECT_DOUBLE_EQ(g.node(2)[0], 0.75);
  EXPECT_DOUBLE_EQ(g.volume(), 2.0);
}

TEST(Grid, WeightsSumToVolumeForAwkwardCounts) {
  for (std::size_t n : {2u, 3u, 7u, 101u, 1000u}) {
    const Grid g = line(-0.3, 1.7, n);
    double s = 0.0;
    for (double w : g.weights()) s += w;
    EXPECT_NEAR(s / g.volume(), 1.0, 1e-12) << n;
  }
}

TEST(Grid, NodesStrictlyInside) {
  const Grid g = line(-1.0, 1.0, 33);
  for (const auto& p : g.nodes()) {
    EXPECT_GT(p[0], -1.0);
    EXPECT_LT(p[0], 1.0);
  }
}

TEST(Grid, RefinedMidpointGridsShareNoNodes) {
  const Grid coarse = line(0.0, 1.0, 4);
  const Grid fine = line(0.0, 1.0, 8);
  for (const auto& p : coarse.nodes())
    for (const auto& q : fine.nodes()) EXPECT_NE(p[0], q[0]);
  EXPECT_FALSE(fine.contains_nodes_of(coarse));
}

TEST(Grid, LatticeBoxesAreNested) {
  const double h = 1.0 / 64.0;
  const std::array<AxisBounds, 1> small{AxisBounds{-1.0, 1.0}};
  const std::array<AxisBounds, 1> big{AxisBounds{-4.0, 4.0}};
  const Grid a = Grid::lattice(small, h);
  const Grid b = Grid::lattice(big, h);
  EXPECT_EQ(a.size(), 128u);
  EXPECT_EQ(b.size(), 512u);
  EXPECT_TRUE(b.contains_nodes_of(a));
  EXPECT_FALSE(a.contains_nodes_of(b));
}

TEST(Grid, LatticeRejectsMisalignedBounds) {
  const std::array<AxisBounds, 1> b{AxisBounds{0.0, 1.03}};
  EXPECT_THROW(Grid::lattice(b, 0.25), InvalidArgument);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(line(0.0, 1.0, 1), InvalidArgument);
  EXPECT_THROW(line(1.0, 1.0, 8), InvalidArgument);
  EXPECT_THROW(line(0.0, INFINITY, 8), InvalidArgument);
  const std::array<AxisBounds, 2> b{AxisBounds{0.0, 1.0}, AxisBounds{0.0, 1.0}};
  const std::array<std::size_t, 2> huge{100'000, 1'000};
  EXPECT_THROW(Grid::uniform(b, huge), InvalidArgument);
}

TEST(Grid, DistanceToBoundary) {
  const Grid g = line(0.0, 1.0, 10);
  EXPECT_DOUBLE_EQ(g.distance_to_boundary(0), 0.05);
  EXPECT_NEAR(g.distance_to_boundary(4), 0.45, 1e-15);
}

TEST(Grid, ScaledGridMapsNodesAndWeights) {
  const std::array<AxisBounds, 2> b{AxisBounds{0.0, 1.0}, AxisBounds{-1.0, 1.0}};
  const std::array<std::size_t, 2> c{5, 6};
  const Grid g = Grid::uniform(b, c);
  const Grid s = g.scaled(3.0);
  ASSERT_EQ(s.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(s.node(i)[0], 3.0 * g.node(i)[0], 1e-15);
    EXPECT_NEAR(s.node(i)[1], 3.0 * g.node(i)[1], 1e-15);
    EXPECT_NEAR(s.weights()[i], 9.0 * g.weights()[i], 1e-15);
  }
  EXPECT_THROW(g.scaled(0.0), InvalidArgument);
}

}  // namespace
}  // namespace nlspec
