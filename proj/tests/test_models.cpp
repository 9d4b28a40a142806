#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "shadowlab/models.hpp"
#include "support.hpp"

using namespace shadowlab;

TEST(Registry, NamesAreUniqueAndResolvable) {
  std::set<std::string> seen;
  for (const auto& m : model_registry()) {
    EXPECT_TRUE(seen.insert(m.name).second) << m.name;
    EXPECT_EQ(&find_model(m.name), &m);
    EXPECT_FALSE(m.space.empty());
    EXPECT_FALSE(m.claim.empty());
    EXPECT_TRUE(m.kind == "analytic" || m.kind == "integrated" || m.kind == "suspension-derived" ||
                m.kind == "base-map")
        << m.kind;
    EXPECT_EQ(static_cast<bool>(m.make_base), m.kind == "base-map") << m.name;
  }
  for (const char* name : {"rotation", "sin-squared", "north-south", "geometric-lorenz",
                           "cantor-interval-identity", "two-point-swap"})
    EXPECT_TRUE(seen.count(name)) << name;
  EXPECT_THROW(find_model("no-such-model"), UnknownModel);
  EXPECT_THROW(make_flow("rotation", {{"speed", 2.0}}), std::invalid_argument);
  EXPECT_THROW(make_base("rotation"), std::invalid_argument);
}

TEST(Registry, FlowNamesMatch) {
  for (const auto& name : shadowlab::testing::fast_model_names()) {
    auto f = make_flow(name);
    ASSERT_TRUE(f) << name;
    EXPECT_GE(f->speed_bound(), 0.0) << name;
    EXPECT_GE(f->lipschitz(1.0), 1.0) << name;
  }
}

TEST(Registry, ParametersReachTheModel) {
  auto lin = make_flow("irrational-linear", {{"alpha", 0.5}});
  const Point q = lin->evolve(Point{0.0, 0.0}, 1.0);
  EXPECT_NEAR(q[0], 0.0, 1e-12);
  EXPECT_NEAR(q[1], 0.5, 1e-12);
  auto two = make_flow("two-point-identity", {{"gap", 0.25}});
  EXPECT_DOUBLE_EQ(two->space().diameter(), 0.25);
  auto c3 = make_base("cantor-interval-identity", {{"level", 3}});
  EXPECT_TRUE(c3->space().contains(Point{2.0 / 27.0}));
  EXPECT_FALSE(c3->space().contains(Point{1.5 / 27.0}));
  auto roofed = make_base("cantor-interval-identity", {{"roof_slope", 0.5}});
  EXPECT_GT(roofed->roof_max(), roofed->roof_min());
}

TEST(CantorIdentity, MapIsIdentityAndDirectionsDrift) {
  auto base = cantor_interval_identity();
  for (const Point& x : base->space().sample(20, 1)) {
    EXPECT_EQ(base->map(x), x);
    EXPECT_EQ(base->inverse(x), x);
  }
  EXPECT_DOUBLE_EQ(base->space().diameter(), 1.0);
  auto d = base->adversarial_direction(Point{1.2}, Point{1.2});
  ASSERT_TRUE(d.has_value());
  EXPECT_GT((*d)[0], 0.0);
}

TEST(TwoPointSwap, IsAnInvolution) {
  auto base = two_point_swap();
  EXPECT_NO_THROW(validate_base(*base));
  for (const Point& x : base->space().sample(2, 1)) {
    EXPECT_NE(base->map(x), x);
    EXPECT_EQ(base->map(base->map(x)), x);
  }
}

TEST(GeometricLorenz, ComputedReturnMapMatchesClosedForm) {
  GeometricLorenz m;
  for (double x : {-0.9, -0.5, -0.1, -0.01, 0.02, 0.3, 0.77, 1.0}) {
    EXPECT_NEAR(m.computed_return_map(x), m.return_map(x), 1e-9) << x;
    EXPECT_LE(std::fabs(m.return_map(x)), 1.0);
  }
  // x' = lambda_u x gives f(x) = -1 + c x^(lambda_c / lambda_u) on the right.
  const auto& p = m.params();
  EXPECT_NEAR(m.return_map(0.25), -1.0 + p.c * std::pow(0.25, p.lambda_c / p.lambda_u), 1e-12);
  EXPECT_NEAR(m.return_map(-0.25), -m.return_map(0.25), 1e-12);
}

TEST(GeometricLorenz, ReturnMapPrecondition) {
  GeometricLorenz m;
  ReturnMapCheck r = check_return_map(m);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(std::fabs(r.f_left) > 1e-9 || std::fabs(r.f_right - 1.0) > 1e-9);
  EXPECT_GT(r.min_slope, 1.0);
}

TEST(GeometricLorenz, RejectsBadParameters) {
  GeometricLorenzParams p;
  p.lambda_c = 1.5;
  EXPECT_THROW(GeometricLorenz{p}, std::invalid_argument);
  p = {};
  p.c = 2.5;
  EXPECT_THROW(GeometricLorenz{p}, std::invalid_argument);
  p = {};
  p.return_time = 0.0;
  EXPECT_THROW(GeometricLorenz{p}, std::invalid_argument);
}

TEST(GeometricLorenz, OrbitsStayOnTheTemplate) {
  GeometricLorenz m;
  const auto pts = m.attractor_samples(20, 4);
  ASSERT_EQ(pts.size(), 20u);
  for (const Point& x : pts) {
    EXPECT_TRUE(m.space().contains(x)) << x.to_string();
    for (const Point& y : m.orbit(x, 0.0, 0.37, 50)) EXPECT_TRUE(m.space().contains(y));
  }
  const double T = m.mean_return_time();
  EXPECT_GT(T, m.params().return_time);
  EXPECT_LT(T, 4.0 * m.params().return_time);
  EXPECT_THROW(m.evolve(pts[0], -1.0), std::exception);
}

TEST(GeometricLorenz, SectionPointsReturnToTheSection) {
  GeometricLorenz m;
  for (double x : {-0.6, 0.4}) {
    const Point s = m.section_point(x, 0.1);
    EXPECT_TRUE(m.space().contains(s));
    EXPECT_DOUBLE_EQ(s[2], 1.0);
  }
}
