#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

#include "oracle.hpp"
#include "shadowlab/models.hpp"
#include "shadowlab/shadowing.hpp"

using namespace shadowlab;
using shadowlab::testing::PathOracle;

namespace {

PseudoOrbit true_orbit(const FlowSystem& sys, const Point& p, long back, long forward,
                       double t = 1.0) {
  std::vector<Entry> e;
  for (long i = -back; i <= forward; ++i) e.push_back({sys.evolve(p, t * static_cast<double>(i)), t});
  return PseudoOrbit(-back, std::move(e), back > 0 ? PseudoOrbitKind::kBiInfinite
                                                   : PseudoOrbitKind::kForward);
}

}  // namespace

TEST(Oracle, SweepAgreesWithExhaustiveSearch) {
  std::size_t agree = 0, total = 0, with_path = 0;
  for (const char* name : {"rotation", "sin-squared", "north-south", "product-rotation"}) {
    auto sys = make_flow(name);
    const MetricSpace& X = sys->space();
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      NoiseConfig nc;
      nc.delta = 0.05;
      nc.back = 2;
      nc.forward = 3;
      const Point p = X.sample(1, seed)[0];
      PseudoOrbit P = generate_noisy(*sys, p, nc, seed);
      const double dt = 0.25;
      TraceSamples tr = sample_trace(*sys, P, dt);
      Rng rng(seed);
      for (int c = 0; c < 6; ++c) {
        auto y = X.sample_in_ball(p, 0.1, rng);
        ASSERT_TRUE(y.has_value());
        OrbitSamples orb = sample_orbit(*sys, tr, *y, dt, 1.5, false);
        for (double thr : {0.05, 0.1, 0.2}) {
          PathResult r = match_path(tr, orb, X, thr);
          PathOracle oracle(tr, orb, X, thr);
          const bool expect = oracle.exists();
          ++total;
          agree += r.ranges.has_value() == expect;
          with_path += expect;
          if (!r.ranges) continue;
          const auto& R = *r.ranges;
          ASSERT_EQ(R.size(), tr.rows.size());
          const auto& mid = R[static_cast<std::size_t>(tr.k0)];
          EXPECT_TRUE(mid.first <= orb.l0 && orb.l0 <= mid.second);
          for (std::size_t k = 0; k < R.size(); ++k) {
            EXPECT_LE(R[k].first, R[k].second);
            EXPECT_TRUE(cell_free(tr, orb, X, static_cast<long>(k), R[k].first, thr));
            EXPECT_TRUE(cell_free(tr, orb, X, static_cast<long>(k), R[k].second, thr));
            if (k + 1 < R.size()) {
              const long step = R[k + 1].first - R[k].second;
              EXPECT_TRUE(step == 0 || step == 1) << name << " row " << k;
            }
          }
        }
      }
    }
  }
  EXPECT_EQ(agree, total);
  EXPECT_GT(with_path, total / 10);
  EXPECT_LT(with_path, total);
}

TEST(ReparamFromPath, PinnedAndIncreasing) {
  auto sys = rotation_flow();
  NoiseConfig nc;
  nc.delta = 0.02;
  nc.back = 3;
  nc.forward = 3;
  PseudoOrbit P = generate_noisy(*sys, Point{0.4}, nc, 2);
  TraceSamples tr = sample_trace(*sys, P, 0.05);
  OrbitSamples orb = sample_orbit(*sys, tr, Point{0.4}, 0.05, 2.0, false);
  PathResult r = match_path(tr, orb, sys->space(), 0.12);
  ASSERT_TRUE(r.ranges.has_value());
  Reparam h = reparam_from_path(tr, orb, *r.ranges, 0.05);
  EXPECT_DOUBLE_EQ(h(0.0), 0.0);
  double prev = h(P.span_begin() - 1.0);
  for (double t = P.span_begin() - 0.9; t < P.span_end() + 1.0; t += 0.01) {
    const double v = h(t);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

class TrueOrbits : public ::testing::TestWithParam<std::string> {};

TEST_P(TrueOrbits, AreShadowedByTheirOwnStart) {
  auto sys = make_flow(GetParam());
  for (const Point& p : sys->space().sample(3, 17)) {
    PseudoOrbit P = true_orbit(*sys, p, sys->invertible() ? 3 : 0, 4);
    Verdict v = decide_shadowing(*sys, P, 0.05);
    ASSERT_EQ(v.tag, VerdictTag::kShadowed) << GetParam() << " " << p.to_string() << " " << v.reason;
    ASSERT_TRUE(v.certificate.has_value());
    auto rep = check_certificate(*sys, P, 0.05, *v.certificate);
    EXPECT_TRUE(rep.ok);
    EXPECT_NEAR(rep.achieved_sup, v.certificate->achieved_sup, 1e-12);
    EXPECT_LE(v.log.eps_lo, 0.05);
    EXPECT_GE(v.log.eps_hi, 0.05);
  }
}

INSTANTIATE_TEST_SUITE_P(Models, TrueOrbits,
                         ::testing::Values("rotation", "sin-squared", "north-south",
                                           "product-rotation", "irrational-linear",
                                           "geometric-lorenz", "cantor-interval-identity",
                                           "two-point-swap"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& ch : s)
                             if (ch == '-') ch = '_';
                           return s;
                         });

TEST(Certificate, TamperingIsDetected) {
  auto sys = product_rotation_flow();
  NoiseConfig nc;
  nc.delta = 0.005;
  nc.back = 4;
  nc.forward = 4;
  PseudoOrbit P = generate_noisy(*sys, Point{0.3, 0.6}, nc, 11);
  Verdict v = decide_shadowing(*sys, P, 0.1);
  ASSERT_TRUE(v.shadowed());
  ShadowingCertificate c = *v.certificate;
  EXPECT_TRUE(check_certificate(*sys, P, 0.1, c).ok);
  ShadowingCertificate moved = c;
  moved.y[0] += 0.3;
  EXPECT_FALSE(check_certificate(*sys, P, 0.1, moved).ok);
  ShadowingCertificate skewed = c;
  skewed.h = Reparam::linear(1.3);
  EXPECT_FALSE(check_certificate(*sys, P, 0.1, skewed).ok);
  ShadowingCertificate coarse = c;
  EXPECT_THROW(check_certificate(*sys, P, 0.1, coarse, c.grid.step / 2), GridTooCoarse);
  coarse.grid.start += 1.0;
  EXPECT_THROW(check_certificate(*sys, P, 0.1, coarse), GridTooCoarse);
}

TEST(Decide, RotationPseudoOrbitsAreShadowed) {
  auto sys = rotation_flow();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    NoiseConfig nc;
    nc.delta = 0.02;
    PseudoOrbit P = generate_noisy(*sys, Point{0.1 * static_cast<double>(seed)}, nc, seed);
    Verdict v = decide_shadowing(*sys, P, 0.05);
    EXPECT_TRUE(v.shadowed()) << v.reason;
  }
}

TEST(Decide, DriftPastAFixedPointIsFalsified) {
  auto sys = sin_squared_flow();
  AdversarialConfig ac;
  ac.delta = 0.01;
  ac.eps = 0.05;
  PseudoOrbit P = generate_adversarial(*sys, Point{0.49}, ac, 1);
  Verdict v = decide_shadowing(*sys, P, 0.05);
  EXPECT_EQ(v.tag, VerdictTag::kNotShadowedAtResolution) << v.reason;
  EXPECT_FALSE(v.certificate.has_value());
}

TEST(Decide, SeedCertificateIsReused) {
  auto sys = rotation_flow();
  NoiseConfig nc;
  nc.delta = 0.01;
  PseudoOrbit P = generate_noisy(*sys, Point{0.2}, nc, 5);
  Verdict small = decide_shadowing(*sys, P, 0.05);
  ASSERT_TRUE(small.shadowed());
  SearchConfig sc;
  sc.seed_certificate = small.certificate;
  Verdict big = decide_shadowing(*sys, P, 0.1, sc);
  ASSERT_TRUE(big.shadowed());
  EXPECT_EQ(big.certificate->y, small.certificate->y);
}

TEST(Decide, ForwardSearchRejectsNegativeIndices) {
  auto sys = rotation_flow();
  PseudoOrbit P = true_orbit(*sys, Point{0.0}, 2, 2);
  EXPECT_THROW(decide_forward_shadowing(*sys, P, 0.1), std::invalid_argument);
  EXPECT_THROW(decide_shadowing(*sys, P, 0.0), std::invalid_argument);
}

TEST(Transport, CertificateOfTheSuffix) {
  auto sys = irrational_linear_flow();
  const Point q{0.5, 0.5};
  std::vector<Entry> ce;
  for (int j = 3; j >= 1; --j) {
    Point y = sys->evolve(q, -1.25 * j);
    y[0] = wrap_unit(y[0] + 0.003);
    ce.push_back({y, 1.25});
  }
  ce.push_back({q, 1.0});
  PseudoOrbit chain(0, ce, PseudoOrbitKind::kChain);
  NoiseConfig nc;
  nc.delta = 0.003;
  nc.back = 0;
  nc.forward = 5;
  PseudoOrbit noisy = generate_noisy(*sys, q, nc, 3);
  PseudoOrbit F(0, noisy.entries(), PseudoOrbitKind::kForward);
  PrependResult pr = prepend_chain(*sys, chain, F);
  Verdict v = decide_forward_shadowing(*sys, pr.orbit, 0.1);
  ASSERT_TRUE(v.shadowed()) << v.reason;
  ShadowingCertificate t = transport_certificate(*sys, *v.certificate, chain, F);
  auto rep = check_certificate(*sys, F, 0.1 + 1e-6, t);
  EXPECT_TRUE(rep.ok);
  // Replayed on a shifted grid, so allow one grid step of motion.
  EXPECT_LE(rep.achieved_sup,
            v.certificate->achieved_sup + sys->speed_bound() * t.grid.step * 1.5);
}

TEST(Estimate, RotationPointsPass) {
  auto sys = rotation_flow();
  PointEstimateConfig cfg;
  cfg.delta_schedule = {0.05, 0.025};
  cfg.trials = 4;
  PointEstimate e = estimate_shadowable_point(*sys, Point{0.3}, 0.1, cfg, 1);
  EXPECT_EQ(e.status, PointStatus::kPass);
  EXPECT_DOUBLE_EQ(e.delta, 0.05);
  EXPECT_EQ(e.trials.size(), 4u);
}

TEST(Estimate, PointsNearASaddleConnectionFail) {
  auto sys = sin_squared_flow();
  PointEstimateConfig cfg;
  cfg.delta_schedule = {0.01, 0.001};
  cfg.trials = 3;
  PointEstimate e = estimate_shadowable_point(*sys, Point{0.48}, 0.05, cfg, 1);
  EXPECT_EQ(e.status, PointStatus::kFail);
  ASSERT_TRUE(e.witness.has_value());
  EXPECT_TRUE(validate(*sys, *e.witness, e.delta, cfg.t_min, cfg.t_max).ok);
}

TEST(Estimate, SetLabelsNestInEps) {
  auto sys = sin_squared_flow();
  PointEstimateConfig cfg;
  cfg.delta_schedule = {0.01, 0.003};
  cfg.trials = 3;
  std::vector<Point> samples{Point{0.1}, Point{0.25}, Point{0.47}, Point{0.75}, Point{0.97}};
  SetEstimate s = estimate_shadowable_set(*sys, samples, {0.2, 0.05, 0.1}, cfg, 7);
  ASSERT_EQ(s.eps, (std::vector<double>{0.05, 0.1, 0.2}));
  EXPECT_TRUE(s.nesting_violations.empty());
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j + 1 < s.eps.size(); ++j)
      if (s.by_eps[j][i].status == PointStatus::kPass)
        EXPECT_EQ(s.by_eps[j + 1][i].status, PointStatus::kPass);
  EXPECT_GE(s.pass_fraction(0), 0.0);
  EXPECT_LE(s.pass_fraction(0), s.pass_fraction(2));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_GE(default_threads(), 1u);
}
