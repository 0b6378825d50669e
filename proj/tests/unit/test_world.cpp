#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wsnphm/errors.hpp"
#include "wsnphm/rng.hpp"
#include "wsnphm/world.hpp"

using namespace wsnphm;

TEST(Distance, Examples) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(distance({7.5, -2}, {7.5, -2}), 0.0);
  EXPECT_NEAR(distance({0, 0}, {1, 1}), std::sqrt(2.0), 1e-15);
}

TEST(Distance, TriangleInequalityOnRandomTriples) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 10000; ++i) {
    const Point a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-12);
    EXPECT_DOUBLE_EQ(distance(a, b), distance(b, a));
  }
}

TEST(CoverageRadius, Examples) {
  // square regions of area pi, 10000 and 100 pi
  const double s = std::sqrt(std::numbers::pi);
  EXPECT_NEAR(coverage_radius(Region{s, s, {s / 2, s / 2}}), 0.1, 1e-12);
  EXPECT_NEAR(coverage_radius(Region{}), 5.641895835477563, 1e-12);
  EXPECT_NEAR(coverage_radius(Region{10 * s, 10 * s, {0, 0}}), 1.0, 1e-12);
  // disk of that radius is 1% of the area
  const double r = coverage_radius(Region{});
  EXPECT_NEAR(std::numbers::pi * r * r, 100.0, 1e-9);
}

TEST(Region, Validation) {
  EXPECT_THROW(coverage_radius(Region{0, 10, {0, 0}}), InvalidRegionError);
  EXPECT_THROW(Region({-1, 10, {0, 0}}).validate(), InvalidRegionError);
  EXPECT_THROW(Region({10, 10, {11, 5}}).validate(), InvalidRegionError);
  EXPECT_NO_THROW(Region({10, 10, {10, 0}}).validate());
}

TEST(Deploy, DefaultCountsAndBounds) {
  Rng rng(3);
  const Fleet fleet = deploy(Region{}, KindCounts{}, rng);
  ASSERT_EQ(fleet.size(), 300u);
  int per_kind[3] = {0, 0, 0};
  for (const Node& n : fleet.nodes()) {
    EXPECT_TRUE(fleet.region().contains(n.position));
    EXPECT_EQ(n.role, Role::Leaf);
    EXPECT_EQ(n.battery, 300.0);
    ++per_kind[index_of(n.kind)];
  }
  EXPECT_EQ(per_kind[0], 100);
  EXPECT_EQ(per_kind[1], 100);
  EXPECT_EQ(per_kind[2], 100);
  // ordered temperature, pressure, humidity
  EXPECT_EQ(fleet.node(0).kind, SensorKind::Temperature);
  EXPECT_EQ(fleet.node(150).kind, SensorKind::Pressure);
  EXPECT_EQ(fleet.node(299).kind, SensorKind::Humidity);
  EXPECT_GE(fleet.initial_coverage(), 0.90);
}

TEST(Deploy, SingleNode) {
  Rng rng(1);
  DeployOptions options;
  options.require_coverage = false;
  const Fleet fleet = deploy(Region{}, KindCounts{1, 0, 0}, rng, options);
  ASSERT_EQ(fleet.size(), 1u);
  EXPECT_TRUE(fleet.region().contains(fleet.node(0).position));
  EXPECT_GT(fleet.coverage_deficit(), 0.0);
}

TEST(Deploy, SameSeedSamePositions) {
  Rng a(99), b(99);
  const Fleet fa = deploy(Region{}, KindCounts{}, a);
  const Fleet fb = deploy(Region{}, KindCounts{}, b);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fa.nodes()[i].position, fb.nodes()[i].position);
  }
}

TEST(Deploy, Errors) {
  Rng rng(1);
  EXPECT_THROW(deploy(Region{}, KindCounts{0, 0, 0}, rng), EmptyFleetError);
  EXPECT_THROW(deploy(Region{}, KindCounts{1, 0, 0}, rng), CoverageError);
}

TEST(CoveredFraction, EdgeCases) {
  Region region{};
  std::vector<Node> nodes{{0, SensorKind::Temperature, {50, 50}, Role::Leaf, 0.0, Health::Dead}};
  // radius of the half-diagonal covers every lattice point
  Fleet one(region, nodes, std::hypot(50.0, 50.0) + 1e-9);
  EXPECT_EQ(covered_fraction(one, 10), 0.0);
  one.node(0).health = Health::Ok;
  one.node(0).battery = 1.0;
  EXPECT_EQ(covered_fraction(one, 10), 1.0);
  // broken sensors still sense
  one.node(0).health = Health::Broken;
  EXPECT_EQ(covered_fraction(one, 10), 1.0);
}

TEST(CoveredFraction, GridOracle) {
  Rng rng(5);
  DeployOptions options;
  options.require_coverage = false;
  const Fleet fleet = deploy(Region{}, KindCounts{20, 20, 20}, rng, options);
  const int n = 25;
  int hit = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double step = 100.0 / (n - 1);
      const Point p{i * step, j * step};
      for (const Node& node : fleet.nodes()) {
        if (squared_distance(p, node.position) <= fleet.coverage_radius() * fleet.coverage_radius()) {
          ++hit;
          break;
        }
      }
    }
  }
  EXPECT_DOUBLE_EQ(covered_fraction(fleet, n), static_cast<double>(hit) / (n * n));
}

TEST(Rng, SplitMixReference) {
  // first output of splitmix64 seeded with 0
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 1));
  EXPECT_EQ(derive_seed(42, 7), mix64(42 ^ mix64(7)));
}
