#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "terradeploy/los.hpp"
#include "terradeploy/rng.hpp"

using namespace terradeploy;

namespace {

const TerrainModel kHill({{100.0, 500.0, 500.0, 100.0, 100.0}});

bool query(const Bvh& bvh, const TerrainModel& m, Point3 a, Point3 b, double eps = 1e-5) {
  return los_query(bvh, m, {a, b, eps}).visible;
}

bool oracle(const TerrainModel& m, Point3 a, Point3 b) {
  return los_dense_oracle(m, a, b, 1e-4).visible;
}

// Every ancestor box must contain the boxes of its descendants.
void check_containment(const Bvh& bvh, int node, const std::function<void(const Aabb2&)>& up) {
  const auto& n = bvh.nodes()[static_cast<std::size_t>(node)];
  up(n.box);
  if (n.leaf()) return;
  for (int child : {n.left, n.right}) {
    check_containment(bvh, child, [&](const Aabb2& b) {
      EXPECT_TRUE(n.box.contains(b));
      up(b);
    });
  }
}

}  // namespace

TEST(Bvh, SingleBumpRootBox) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_EQ(bvh.root_box(), (Aabb2{300.0, 700.0, 300.0, 700.0}));
  EXPECT_EQ(bvh.height(), 1);
}

TEST(Bvh, EmptyModelGivesEmptyHierarchy) {
  const Bvh bvh(TerrainModel{}, 2.0);
  EXPECT_TRUE(bvh.empty());
  EXPECT_FALSE(bvh.contains_point(0.0, 0.0));
  EXPECT_FALSE(bvh.intersects_segment(-1e9, -1e9, 1e9, 1e9));
}

TEST(Bvh, RejectsNonPositiveScale) {
  EXPECT_THROW(Bvh(kHill, 0.0), std::invalid_argument);
}

TEST(Bvh, FourBumpsInARowSplitByXMedian) {
  std::vector<GaussianBump> row;
  for (int i = 0; i < 4; ++i) row.push_back({50.0, 1000.0 * i, 0.0, 100.0, 100.0});
  const Bvh bvh(TerrainModel(row), 2.0);
  EXPECT_EQ(bvh.height(), 3);  // root, two internal nodes, leaves
  const auto& root = bvh.nodes()[0];
  const auto& left = bvh.nodes()[static_cast<std::size_t>(root.left)];
  const auto& right = bvh.nodes()[static_cast<std::size_t>(root.right)];
  EXPECT_LT(left.box.max_x, right.box.min_x);
  EXPECT_EQ(left.box, (Aabb2{-200.0, 1200.0, -200.0, 200.0}));
  std::size_t leaves = 0;
  for (const auto& n : bvh.nodes()) leaves += n.leaf();
  EXPECT_EQ(leaves, 4u);
  check_containment(bvh, 0, [](const Aabb2&) {});
}

TEST(Bvh, BalancedAndContainsEveryCenter) {
  RandomStream rng(4);
  for (std::size_t g : {1u, 2u, 3u, 7u, 16u, 33u, 50u}) {
    std::vector<GaussianBump> bumps;
    for (std::size_t i = 0; i < g; ++i)
      bumps.push_back({rng.uniform(-50.0, 200.0), rng.uniform(0.0, 5000.0), rng.uniform(0.0, 5000.0),
                       rng.uniform(50.0, 500.0), rng.uniform(50.0, 500.0)});
    const TerrainModel m(bumps);
    const Bvh bvh(m, 2.0);
    EXPECT_LE(bvh.height(), static_cast<int>(std::ceil(std::log2(static_cast<double>(g)))) + 1);
    for (const auto& b : bumps) {
      EXPECT_TRUE(bvh.contains_point(b.mu_x, b.mu_y));
      EXPECT_TRUE(bvh.root_box().contains(b.mu_x, b.mu_y));
    }
    check_containment(bvh, 0, [](const Aabb2&) {});
  }
}

TEST(LosQuery, FlatEmptyTerrainAcceptsEarly) {
  const TerrainModel flat;
  const Bvh bvh(flat, 2.0);
  const auto r = los_query(bvh, flat, {{0, 0, 10}, {1000, 1000, 5}, 1e-5});
  EXPECT_TRUE(r.visible);
  EXPECT_EQ(r.terrain_evaluations, 0u);
  EXPECT_EQ(r.intervals, 0u);
}

TEST(LosQuery, BlockedThroughHillCenter) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_FALSE(query(bvh, kHill, {0, 500, 50}, {1000, 500, 50}));
  EXPECT_FALSE(oracle(kHill, {0, 500, 50}, {1000, 500, 50}));
}

TEST(LosQuery, ClearAboveSupremum) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_TRUE(query(bvh, kHill, {0, 500, 200}, {1000, 500, 200}));
  EXPECT_TRUE(oracle(kHill, {0, 500, 200}, {1000, 500, 200}));
}

TEST(LosQuery, TangentWithTenMetreClearance) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_TRUE(query(bvh, kHill, {0, 500, 110}, {1000, 500, 110}));
  EXPECT_TRUE(oracle(kHill, {0, 500, 110}, {1000, 500, 110}));
  EXPECT_FALSE(query(bvh, kHill, {0, 500, 90}, {1000, 500, 90}));
}

TEST(LosQuery, TiesCountAsBlocked) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_FALSE(query(bvh, kHill, {0, 500, 100}, {1000, 500, 100}));
  EXPECT_FALSE(oracle(kHill, {0, 500, 100}, {1000, 500, 100}));
}

TEST(LosQuery, VerticalSegment) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_TRUE(query(bvh, kHill, {500, 500, 101}, {500, 500, 400}));
  EXPECT_FALSE(query(bvh, kHill, {500, 500, 50}, {500, 500, 400}));
}

TEST(LosQuery, EndpointBelowGroundOutsideBoxes) {
  const TerrainModel raised({{100.0, 500.0, 500.0, 100.0, 100.0}}, 20.0);
  const Bvh bvh(raised, 2.0);
  EXPECT_FALSE(query(bvh, raised, {2000, 2000, 10}, {3000, 3000, 500}));
}

TEST(LosQuery, RejectsInvalidEpsilon) {
  const Bvh bvh(kHill, 2.0);
  EXPECT_THROW(los_query(bvh, kHill, {{0, 0, 1}, {1, 1, 1}, 0.0}), std::invalid_argument);
  EXPECT_THROW(los_query(bvh, kHill, {{0, 0, 1}, {1, 1, 1}, 1.0}), std::invalid_argument);
}

TEST(LosDenseOracle, CoincidentPointsAboveTerrainAreVisible) {
  EXPECT_TRUE(oracle(kHill, {500, 500, 150}, {500, 500, 150}));
  EXPECT_THROW(los_dense_oracle(kHill, {0, 0, 0}, {1, 1, 1}, 2e-3), std::invalid_argument);
}

TEST(LosQuery, RaisingEndpointsNeverBlocks) {
  RandomStream rng(21);
  std::vector<GaussianBump> bumps;
  for (int i = 0; i < 12; ++i)
    bumps.push_back({rng.uniform(50.0, 400.0), rng.uniform(0.0, 3000.0), rng.uniform(0.0, 3000.0),
                     rng.uniform(100.0, 400.0), rng.uniform(100.0, 400.0)});
  const TerrainModel m(bumps);
  const Bvh bvh(m, tail_safe_scale(m, 1.0));
  int flips = 0;
  for (int k = 0; k < 300; ++k) {
    Point3 a{rng.uniform(0.0, 3000.0), rng.uniform(0.0, 3000.0), 0.0};
    Point3 b{rng.uniform(0.0, 3000.0), rng.uniform(0.0, 3000.0), 0.0};
    a.z = m.elevation(a.x, a.y) + rng.uniform(1.0, 300.0);
    b.z = m.elevation(b.x, b.y) + rng.uniform(1.0, 300.0);
    if (!query(bvh, m, a, b)) continue;
    const double delta = rng.uniform(0.1, 200.0);
    flips += !query(bvh, m, {a.x, a.y, a.z + delta}, {b.x, b.y, b.z + delta});
  }
  EXPECT_EQ(flips, 0);
}

TEST(LosQuery, NeverMoreEvaluationsThanDenseSampling) {
  RandomStream rng(8);
  const TerrainModel m = make_synthetic_terrain({}, 3);
  const Bvh bvh(m, 2.0);
  for (int k = 0; k < 200; ++k) {
    Point3 a{rng.uniform(0.0, 5000.0), rng.uniform(0.0, 5000.0), 0.0};
    Point3 b{rng.uniform(0.0, 5000.0), rng.uniform(0.0, 5000.0), 0.0};
    a.z = m.elevation(a.x, a.y) + rng.uniform(2.0, 500.0);
    b.z = m.elevation(b.x, b.y) + rng.uniform(2.0, 500.0);
    const auto fast = los_query(bvh, m, {a, b, 1e-4});
    const auto slow = los_dense_oracle(m, a, b, 1e-4);
    if (slow.visible) {
      EXPECT_LE(fast.terrain_evaluations, slow.terrain_evaluations);
    }
  }
}

TEST(TailSafeScale, BoundsTheOutOfBoxTail) {
  const TerrainModel m = make_synthetic_terrain({}, 1);
  const double k = tail_safe_scale(m, 1.0);
  EXPECT_LE(m.abs_height_sum() * std::exp(-0.5 * k * k), 1.0 + 1e-9);
  EXPECT_EQ(tail_safe_scale(TerrainModel{}, 1.0), 2.0);
}
