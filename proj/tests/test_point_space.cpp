#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shadowlab/space.hpp"
#include "shadowlab/suspension.hpp"
#include "support.hpp"

using namespace shadowlab;

TEST(Point, StoresDimensionAndCompares) {
  Point p{1.0, 2.0};
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p, (Point{1.0, 2.0}));
  EXPECT_FALSE(p == (Point{1.0, 2.0, 0.0}));
  EXPECT_EQ(Point::zeros(3).dim(), 3u);
  EXPECT_EQ((Point{0.5}).to_string(), "(0.5)");
}

TEST(Point, DerivedSeedsDifferPerIndex) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, a, b));
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(7, 1, 2), derive_seed(7, 1, 2));
}

TEST(Circle, ArcMetric) {
  CircleSpace S;
  EXPECT_DOUBLE_EQ(S.distance(Point{0.1}, Point{0.9}), 0.2);
  EXPECT_DOUBLE_EQ(S.distance(Point{0.0}, Point{0.5}), 0.5);
  EXPECT_DOUBLE_EQ(S.distance(Point{0.25}, Point{0.25}), 0.0);
  EXPECT_DOUBLE_EQ(wrap_unit(-0.25), 0.75);
  EXPECT_DOUBLE_EQ(wrap_unit(3.5), 0.5);
  EXPECT_EQ(wrap_unit(-1e-18), 0.0);
}

TEST(Torus, ProductOfArcs) {
  TorusSpace T;
  EXPECT_NEAR(T.distance(Point{0.1, 0.1}, Point{0.9, 0.8}), std::hypot(0.2, 0.3), 1e-15);
  EXPECT_NEAR(T.diameter(), std::sqrt(0.5), 1e-15);
}

TEST(Cantor, MembershipAndGap) {
  CantorIntervalSpace C(2);
  EXPECT_DOUBLE_EQ(C.gap(), 1.0 / 9.0);
  EXPECT_TRUE(C.contains(Point{0.0}));
  EXPECT_TRUE(C.contains(Point{1.0 / 9.0}));
  EXPECT_FALSE(C.contains(Point{0.2}));
  EXPECT_FALSE(C.contains(Point{0.5}));
  EXPECT_TRUE(C.contains(Point{2.0 / 3.0}));
  EXPECT_TRUE(C.contains(Point{1.5}));
  EXPECT_EQ(C.component(0.05), 0);
  EXPECT_EQ(C.component(0.25), 1);
  EXPECT_EQ(C.component(0.95), 3);
  EXPECT_EQ(C.component(1.5), 3);
  EXPECT_EQ(C.component(0.5), -1);
  EXPECT_DOUBLE_EQ(C.distance(Point{0.0}, Point{2.0}), 1.0);
  EXPECT_DOUBLE_EQ(C.project(Point{0.2})[0], 2.0 / 9.0);
  EXPECT_DOUBLE_EQ(C.project(Point{0.13})[0], 1.0 / 9.0);
}

TEST(Cantor, SamplesAreMembers) {
  CantorIntervalSpace C(6);
  for (const Point& p : C.sample(200, 3)) EXPECT_TRUE(C.contains(p)) << p.to_string();
  for (const Point& p : C.sample_cantor(50, 3)) EXPECT_LT(p[0], 1.0 + 1e-12);
  for (const Point& p : C.sample_interval(50, 3)) EXPECT_GE(p[0], 1.0);
}

TEST(Finite, MetricAndProjection) {
  FiniteSpace F({0.0, 1.0, 3.0}, 0.5);
  EXPECT_DOUBLE_EQ(F.diameter(), 1.5);
  EXPECT_DOUBLE_EQ(F.distance(Point{0.0}, Point{3.0}), 1.5);
  EXPECT_DOUBLE_EQ(F.project(Point{2.2})[0], 3.0);
  EXPECT_TRUE(F.contains(Point{1.0}));
  EXPECT_FALSE(F.contains(Point{2.0}));
}

TEST(Kronecker, DeterministicAndInUnitCube) {
  auto a = kronecker_unit(100, 3, 9), b = kronecker_unit(100, 3, 9), c = kronecker_unit(100, 3, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (const auto& u : a)
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_GE(u[k], 0.0);
      EXPECT_LT(u[k], 1.0);
    }
}

// ---- metric axioms on every registered space

class SpaceAxioms : public ::testing::TestWithParam<std::string> {};

TEST_P(SpaceAxioms, MetricOnSampledTriples) {
  auto sys = make_flow(GetParam());
  const MetricSpace& X = sys->space();
  auto pts = X.sample(60, 17);
  ASSERT_EQ(pts.size(), 60u);
  for (const Point& p : pts) {
    EXPECT_TRUE(X.contains(p)) << p.to_string();
    EXPECT_EQ(X.distance(p, p), 0.0);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); j += 3) {
      const double dij = X.distance(pts[i], pts[j]);
      EXPECT_EQ(dij, X.distance(pts[j], pts[i]));
      EXPECT_LE(dij, X.diameter() + 1e-12);
      for (std::size_t k = 0; k < pts.size(); k += 7)
        EXPECT_LE(dij, X.distance(pts[i], pts[k]) + X.distance(pts[k], pts[j]) + 1e-9);
    }
}

TEST_P(SpaceAxioms, BallGridCentreFirstAndInsideBall) {
  auto sys = make_flow(GetParam());
  const MetricSpace& X = sys->space();
  for (const Point& c : X.sample(5, 4)) {
    auto g = X.ball_grid(c, 0.1, 0.02);
    ASSERT_FALSE(g.empty());
    EXPECT_EQ(g.front(), c);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(X.distance(c, g[i]), 0.1 + 1e-12);
      for (std::size_t j = 0; j < i; ++j) EXPECT_GT(X.distance(g[i], g[j]), 0.0);
    }
  }
}

TEST_P(SpaceAxioms, SampleInBallStaysInBall) {
  auto sys = make_flow(GetParam());
  const MetricSpace& X = sys->space();
  Rng rng(5);
  for (const Point& c : X.sample(10, 8)) {
    auto q = X.sample_in_ball(c, 0.05, rng);
    ASSERT_TRUE(q.has_value());
    EXPECT_LE(X.distance(c, *q), 0.05 + 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Registry, SpaceAxioms,
                         ::testing::ValuesIn(shadowlab::testing::model_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& ch : s)
                             if (ch == '-') ch = '_';
                           return s;
                         });
