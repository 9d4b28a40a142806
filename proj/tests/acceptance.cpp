// Acceptance runs A1..A9. Usage: shadowlab_acceptance <id>... | all
// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "shadowlab/models.hpp"
#include "shadowlab/pseudo_orbit.hpp"
#include "shadowlab/recurrence.hpp"
#include "shadowlab/shadowing.hpp"
#include "shadowlab/suspension.hpp"

using namespace shadowlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> halving(double from, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(from / std::pow(2.0, i));
  return out;
}

// ---- A1: every rotation point passes

Outcome a1() {
  auto sys = make_flow("rotation");
  const auto pts = sys->space().sample(50, 101);
  std::size_t pass = 0, total = 0;
  for (double eps : {0.05, 0.1, 0.2}) {
    PointEstimateConfig cfg;
    cfg.delta_schedule = halving(eps / 2.0, 4);
    cfg.trials = 20;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto e = estimate_shadowable_point(*sys, pts[i], eps, cfg, derive_seed(1, i));
      pass += e.status == PointStatus::kPass;
      ++total;
    }
  }
  return {pass == total, fmt("%zu/%zu PASS over 50 points x 3 eps, 20 trials each", pass, total)};
}

// ---- A2: decision against exhaustive matching

Outcome a2() {
  const char* names[] = {"rotation", "sin-squared", "north-south", "product-rotation",
                         "irrational-linear"};
  std::size_t agree = 0, n = 0, shadowed = 0, refuted = 0, unknown = 0;
  std::string first_bad;
  for (int inst = 0; inst < 200; ++inst) {
    auto sys = make_flow(names[inst % 5]);
    const MetricSpace& X = sys->space();
    Rng rng(derive_seed(2, static_cast<std::uint64_t>(inst)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double eps = std::vector<double>{0.05, 0.1, 0.2}[rng() % 3];
    NoiseConfig nc;
    nc.delta = eps * (0.1 + 1.4 * u(rng));
    nc.back = static_cast<long>(rng() % 4);
    nc.forward = 1 + static_cast<long>(rng() % 7);
    if (rng() % 2) {
      nc.law = NoiseLaw::kDirectional;
      nc.direction = Point::zeros(X.dim());
      for (std::size_t k = 0; k < X.dim(); ++k) (*nc.direction)[k] = u(rng) - 0.3;
    }
    const Point p = X.sample(1, rng())[0];
    PseudoOrbit P = generate_noisy(*sys, p, nc, rng());
    SearchConfig sc;
    sc.dt = 0.25;
    sc.band = 1.5;
    sc.grid_spacing = X.dim() == 1 ? eps / 5.0 : eps / 2.0;
    sc.threads = 1;
    const auto cands = X.ball_grid(p, eps, *sc.grid_spacing);
    if (cands.size() > 20) return {false, fmt("instance %d has %zu candidates", inst, cands.size())};
    Verdict v = decide_shadowing(*sys, P, eps, sc);

    // Exhaustive: every candidate, both thresholds.
    const TraceSamples tr = sample_trace(*sys, P, 0.25);
    bool any_hi = false;
    std::vector<bool> hi(cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const OrbitSamples orb = sample_orbit(*sys, tr, cands[c], 0.25, sc.band, false);
      shadowlab::testing::PathOracle lo_o(tr, orb, X, v.log.eps_lo), hi_o(tr, orb, X, v.log.eps_hi);
      hi[c] = hi_o.exists() || lo_o.exists();
      any_hi = any_hi || hi[c];
    }
    bool ok = true;
    switch (v.tag) {
      case VerdictTag::kShadowed: {
        ++shadowed;
        const auto& c = *v.certificate;
        std::size_t idx = cands.size();
        for (std::size_t k = 0; k < cands.size(); ++k)
          if (cands[k] == c.y) idx = k;
        ok = idx < cands.size() && hi[idx] && check_certificate(*sys, P, eps, c).ok;
        break;
      }
      case VerdictTag::kNotShadowedAtResolution:
        ++refuted;
        ok = !any_hi;
        break;
      case VerdictTag::kUnknown:
        ++unknown;
        ok = any_hi;
        break;
    }
    ++n;
    agree += ok;
    if (!ok && first_bad.empty()) first_bad = fmt(" first disagreement: instance %d", inst);
  }
  return {agree == n, fmt("%zu/%zu agree (shadowed %zu, refuted %zu, unknown %zu)%s", agree, n,
                          shadowed, refuted, unknown, first_bad.c_str())};
}

// ---- A3: sin^2 is chain transitive, not transitive, and has no shadowable points

Outcome a3() {
  auto sys = make_flow("sin-squared");
  BoxCover cover(sys->space(), 0.005);
  TransitionGraph G = build_transition_graph(*sys, cover, 1.0, 0.01);
  const bool chain_transitive = chain_transitive_check(G);

  const auto targets = sys->space().sample(40, 303);
  const auto starts = sys->space().sample(20, 304);
  std::size_t transitive = 0;
  for (const Point& s : starts)
    transitive += transitivity_probe(*sys, s, 1e3, 0.01, targets).ok;

  PointEstimateConfig cfg;
  cfg.delta_schedule = {0.05, 0.01, 1e-3, 1e-4};
  cfg.trials = 20;
  const auto pts = sys->space().sample(20, 305);
  std::size_t fail = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto e = estimate_shadowable_point(*sys, pts[i], 0.1, cfg, derive_seed(3, i));
    fail += e.status == PointStatus::kFail && e.witness.has_value();
  }
  const bool ok = chain_transitive && transitive == 0 && fail == pts.size();
  return {ok, fmt("chainTransitive=%s, transitive starts %zu/20, FAIL with witness %zu/20",
                  chain_transitive ? "true" : "false", transitive, fail)};
}

// ---- A4: suspension verdicts follow the base verdicts

Outcome a4() {
  std::shared_ptr<const BaseSystem> base = cantor_interval_identity(6);
  const auto& C = dynamic_cast<const CantorIntervalSpace&>(base->space());
  std::vector<Point> xs = C.sample_cantor(20, 401);
  for (const Point& x : C.sample_interval(20, 402)) xs.push_back(x);
  const std::vector<double> ds{std::pow(3.0, -6), std::pow(3.0, -7)};
  CorrespondenceConfig cfg;
  cfg.heights = {0.25, 0.5, 0.75};
  cfg.fiber_checks = 6;
  cfg.flow.delta_schedule = ds;
  cfg.flow.trials = 6;
  cfg.flow.back = 3;
  cfg.flow.forward = 3;
  cfg.flow.adversarial_max_steps = 800;
  cfg.flow.search.band = 1.5;
  cfg.discrete.delta_schedule = ds;
  cfg.discrete.trials = 20;
  auto r = suspension_correspondence_check(base, xs, 0.05, cfg, 404);
  const bool ok = r.agreements >= 38 && r.pass_fail_conflicts == 0 && r.fiber_violations == 0;
  return {ok, fmt("%zu/%zu agree, %zu PASS-vs-FAIL, fibers %zu checked / %zu violations",
                  r.agreements, r.rows.size(), r.pass_fail_conflicts, r.fibers_checked,
                  r.fiber_violations)};
}

// ---- A5: Sh(id) on C u [1, 2] is the Cantor part

Outcome a5() {
  auto base = cantor_interval_identity(6);
  const auto& C = dynamic_cast<const CantorIntervalSpace&>(base->space());
  const Point one{1.0};
  std::vector<Point> cantor;
  for (const Point& x : C.sample_cantor(200, 501))
    if (C.distance(x, one) >= std::pow(3.0, -6) && cantor.size() < 20) cantor.push_back(x);
  std::vector<Point> interval{one};
  for (const Point& x : C.sample_interval(9, 502)) interval.push_back(x);
  DiscreteConfig cfg;
  cfg.delta_schedule = {std::pow(3.0, -7)};
  cfg.trials = 20;
  std::size_t pass = 0, fail = 0;
  for (std::size_t i = 0; i < cantor.size(); ++i)
    pass += discrete_shadowable_estimate(*base, cantor[i], 0.05, cfg, derive_seed(5, i)).status ==
            PointStatus::kPass;
  for (std::size_t i = 0; i < interval.size(); ++i) {
    auto e = discrete_shadowable_estimate(*base, interval[i], 0.1, cfg, derive_seed(6, i));
    // A drift witness: its orbit points leave the eps ball around p.
    bool drift = false;
    if (e.witness)
      for (const Point& x : e.witness->x) drift = drift || C.distance(x, interval[i]) > 0.1;
    fail += e.status == PointStatus::kFail && drift;
  }
  const bool ok = cantor.size() == 20 && pass == 20 && fail == interval.size();
  return {ok, fmt("C_6: %zu/%zu PASS; [1,2]: %zu/%zu FAIL with drift witness", pass,
                  cantor.size(), fail, interval.size())};
}

// ---- A6: certificate transport along a chain

Outcome a6() {
  std::size_t ok = 0, total = 0;
  double worst = 0.0;
  const double eps = 0.1;
  for (int inst = 0; inst < 50; ++inst) {
    auto sys = make_flow(inst % 2 ? "irrational-linear" : "rotation");
    const MetricSpace& X = sys->space();
    Rng rng(derive_seed(7, static_cast<std::uint64_t>(inst)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Point q = X.sample(1, rng())[0];
    // Chain ending at q: perturbed points of the backward orbit of q.
    const long m = 1 + static_cast<long>(rng() % 4);
    std::vector<Entry> ce;
    double back = 0.0;
    std::vector<double> durs;
    for (long j = 0; j < m; ++j) durs.push_back(1.0 + u(rng));
    for (double d : durs) back += d;
    for (long j = 0; j < m; ++j) {
      Point y = sys->evolve(q, -back);
      auto z = X.sample_in_ball(y, 0.01, rng);
      ce.push_back({z ? *z : y, durs[static_cast<std::size_t>(j)]});
      back -= durs[static_cast<std::size_t>(j)];
    }
    ce.push_back({q, 1.0});
    PseudoOrbit chain(0, ce, PseudoOrbitKind::kChain);
    NoiseConfig nc;
    nc.delta = 0.01;
    nc.back = 0;
    nc.forward = 4 + static_cast<long>(rng() % 6);
    PseudoOrbit noisy = generate_noisy(*sys, q, nc, rng());
    PseudoOrbit F(0, noisy.entries(), PseudoOrbitKind::kForward);
    PrependResult pr = prepend_chain(*sys, chain, F);
    Verdict v = decide_forward_shadowing(*sys, pr.orbit, eps);
    ++total;
    if (!v.shadowed()) continue;
    ShadowingCertificate t = transport_certificate(*sys, *v.certificate, chain, F);
    const double sup = check_certificate(*sys, F, eps + 1e-6, t).achieved_sup;
    worst = std::max(worst, sup);
    ok += sup <= eps + 1e-6;
  }
  return {ok == total, fmt("%zu/%zu transported certificates replay, worst sup %.6f (eps %.2f)", ok,
                           total, worst, eps)};
}

// ---- A7: invariance under the flow and nesting in eps

Outcome a7() {
  const char* names[] = {"rotation",          "sin-squared",        "north-south",
                         "product-rotation",  "irrational-linear",  "two-point-identity",
                         "geometric-lorenz",  "cantor-interval-identity", "two-point-swap"};
  std::size_t pairs = 0, premises = 0, inv_viol = 0, nest_viol = 0, nest_pairs = 0;
  std::string where;
  for (const char* name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    auto sys = make_flow(name);
    const MetricSpace& X = sys->space();
    const double L = sys->lipschitz(2.0);
    const double eps = 0.05;
    PointEstimateConfig cfg;
    cfg.delta_schedule = {0.02, 0.005};
    cfg.trials = 4;
    cfg.back = 3;
    cfg.forward = 3;
    cfg.adversarial_max_steps = 400;
    // A consistency check, not a resolution study: a coarse candidate grid.
    cfg.search.grid_spacing = eps / 2.0;
    PointEstimateConfig cfg2 = cfg;
    cfg2.search.grid_spacing.reset();
    // phi_s(p) with |s| <= 2: eps' = L eps (plus a margin), delta' = delta / L.
    const double eps2 = std::min(1.25 * L * eps, 0.5 * X.diameter());
    cfg2.delta_schedule = {0.02 / L, 0.005 / L};
    const auto pts = X.sample(30, 701);
    Rng rng(702);
    std::uniform_real_distribution<double> us(sys->invertible() ? -2.0 : 0.0, 2.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double s = us(rng);
      ++pairs;
      auto e = estimate_shadowable_point(*sys, pts[i], eps, cfg, derive_seed(8, i));
      if (e.status != PointStatus::kPass) continue;
      ++premises;
      auto e2 = estimate_shadowable_point(*sys, sys->evolve(pts[i], s), eps2, cfg2,
                                          derive_seed(9, i));
      if (e2.status != PointStatus::kPass) {
        ++inv_viol;
        if (where.empty()) where = fmt(" first invariance violation: %s point %zu", name, i);
      }
    }
    SetEstimate se = estimate_shadowable_set(*sys, X.sample(10, 703), {0.05, 0.1, 0.2}, cfg, 704);
    nest_pairs += 2 * se.samples.size();
    nest_viol += se.nesting_violations.size();
    std::fprintf(stderr, "  A7 %s: %.1f s\n", name,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  const bool ok = inv_viol == 0 && nest_viol == 0;
  return {ok, fmt("invariance: %zu pairs, %zu with PASS premise, %zu violations; nesting: %zu "
                  "adjacent pairs, %zu violations%s",
                  pairs, premises, inv_viol, nest_pairs, nest_viol, where.c_str())};
}

// ---- A8: the geometric Lorenz attractor has no shadowable points (at resolution)

Outcome a8() {
  GeometricLorenz model;
  ReturnMapCheck rc = check_return_map(model);
  const double T = model.mean_return_time();
  const auto pts = model.attractor_samples(10, 801);
  std::size_t refuted = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    AdversarialConfig ac;
    ac.delta = 1e-3;
    ac.eps = 0.05;
    ac.back = 0;
    ac.max_steps = static_cast<long>(std::ceil(30.0 * T));
    ac.extra_steps = ac.max_steps;
    PseudoOrbit P = generate_adversarial(model, pts[i], ac, derive_seed(10, i));
    SearchConfig sc;
    sc.grid_spacing = 0.05 / 5.0;
    Verdict v = decide_forward_shadowing(model, P, 0.05, sc);
    refuted += v.tag == VerdictTag::kNotShadowedAtResolution;
  }
  return {refuted == pts.size(),
          fmt("return map F(0)=%.4f F(1)=%.4f; %zu/10 NOT_SHADOWED_AT_RESOLUTION at eps 0.05, "
              "delta 1e-3, horizon 30 return times (%.1f); falsification at resolution",
              rc.f_left, rc.f_right, refuted, 30.0 * T)};
}

// ---- A9: refinement and coarsening of pseudo-orbits

Outcome a9() {
  const char* names[] = {"rotation", "sin-squared", "north-south", "product-rotation",
                         "irrational-linear"};
  std::size_t refine_ok = 0, coarsen_ok = 0;
  for (int inst = 0; inst < 100; ++inst) {
    auto sys = make_flow(names[inst % 5]);
    const MetricSpace& X = sys->space();
    Rng rng(derive_seed(11, static_cast<std::uint64_t>(inst)));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Point p = X.sample(1, rng())[0];

    NoiseConfig nc;
    nc.delta = 0.05 * u(rng) + 1e-3;
    nc.t_min = 1.0;
    nc.t_max = 1.0 + 6.0 * u(rng);
    nc.back = static_cast<long>(rng() % 5);
    nc.forward = 1 + static_cast<long>(rng() % 8);
    PseudoOrbit P = generate_noisy(*sys, p, nc, rng());
    const double a = 0.2 + 0.8 * u(rng);
    PseudoOrbit R = refine_to_bounded_steps(*sys, P, a);
    bool ok = validate(*sys, R, nc.delta, a, 2.0 * a).ok;
    for (double t = P.span_begin(); t < P.span_end() && ok; t += 0.05)
      ok = X.distance(star(*sys, P, t), star(*sys, R, t)) <= sys->group_tolerance() + 1e-12;
    refine_ok += ok;

    // (beta, 1, 2) input, grouped by m with m * Lip(2) * beta < delta.
    const long m = 2 + static_cast<long>(rng() % 4);
    const double delta = 0.05;
    const double L2 = sys->lipschitz(2.0 * static_cast<double>(m));
    const double beta = 0.9 * delta / (static_cast<double>(m) * L2);
    NoiseConfig bc;
    bc.delta = beta;
    bc.t_min = 1.0;
    bc.t_max = 2.0;
    bc.back = static_cast<long>(rng() % 7);
    bc.forward = static_cast<long>(rng() % 9) + m;
    PseudoOrbit B = generate_noisy(*sys, p, bc, rng());
    auto cr = coarsen_steps(*sys, B, m, beta, delta, [&](double r) { return L2 * r; });
    coarsen_ok += validate(*sys, cr.orbit, delta, 1.0).ok;
  }
  return {refine_ok == 100 && coarsen_ok == 100,
          fmt("refine %d/100 valid and trace-preserving; coarsen %zu/100 valid", int(refine_ok),
              coarsen_ok)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<Outcome()>> runs{
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "all")
      for (const auto& [k, _] : runs) ids.push_back(k);
    else
      ids.push_back(argv[i]);
  }
  if (ids.empty()) {
    std::fprintf(stderr, "usage: shadowlab_acceptance <A1..A9>... | all\n");
    return 2;
  }
  bool all_ok = true;
  for (const auto& id : ids) {
    auto it = runs.find(id);
    if (it == runs.end()) {
      std::fprintf(stderr, "unknown criterion %s\n", id.c_str());
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all_ok = all_ok && o.pass;
  }
  return all_ok ? 0 : 1;
}
