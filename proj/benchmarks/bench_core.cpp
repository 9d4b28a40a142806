#include <benchmark/benchmark.h>

#include "shadowlab/models.hpp"
#include "shadowlab/recurrence.hpp"
#include "shadowlab/shadowing.hpp"
#include "shadowlab/suspension.hpp"

using namespace shadowlab;

namespace {

PseudoOrbit noisy(const FlowSystem& sys, const Point& p, double delta, long n, std::uint64_t seed) {
  NoiseConfig nc;
  nc.delta = delta;
  nc.back = n;
  nc.forward = n;
  return generate_noisy(sys, p, nc, seed);
}

}  // namespace

static void BM_DecideRotation(benchmark::State& state) {
  auto sys = make_flow("rotation");
  const PseudoOrbit P = noisy(*sys, Point{0.3}, 0.01, state.range(0), 1);
  SearchConfig sc;
  sc.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(decide_shadowing(*sys, P, 0.1, sc));
}
BENCHMARK(BM_DecideRotation)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_DecideTorusBestCertificate(benchmark::State& state) {
  auto sys = make_flow("irrational-linear");
  const PseudoOrbit P = noisy(*sys, Point{0.3, 0.6}, 0.01, 4, 2);
  SearchConfig sc;
  sc.threads = 1;
  sc.best_certificate = state.range(0) != 0;
  sc.grid_spacing = 0.05;
  for (auto _ : state) benchmark::DoNotOptimize(decide_shadowing(*sys, P, 0.1, sc));
}
BENCHMARK(BM_DecideTorusBestCertificate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_MatchPath(benchmark::State& state) {
  auto sys = make_flow("sin-squared");
  const PseudoOrbit P = noisy(*sys, Point{0.3}, 0.005, 8, 3);
  const double dt = 0.025;
  const TraceSamples tr = sample_trace(*sys, P, dt);
  const OrbitSamples orb = sample_orbit(*sys, tr, Point{0.3}, dt, 5.0, false);
  for (auto _ : state)
    benchmark::DoNotOptimize(match_path(tr, orb, sys->space(), 0.05));
}
BENCHMARK(BM_MatchPath)->Unit(benchmark::kMicrosecond);

static void BM_AdversarialSinSquared(benchmark::State& state) {
  auto sys = make_flow("sin-squared");
  AdversarialConfig ac;
  ac.delta = 1.0 / static_cast<double>(state.range(0));
  ac.eps = 0.1;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_adversarial(*sys, Point{0.3}, ac, ++seed));
}
BENCHMARK(BM_AdversarialSinSquared)->Arg(20)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_TransitionGraph(benchmark::State& state) {
  auto sys = make_flow("sin-squared");
  BoxCover cover(sys->space(), 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_transition_graph(*sys, cover, 1.0, 0.01, 1));
  state.counters["boxes"] = static_cast<double>(cover.size());
}
BENCHMARK(BM_TransitionGraph)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_BowenWalters(benchmark::State& state) {
  auto base = make_base("cantor-interval-identity");
  const auto xs = base->space().sample(64, 5);
  std::size_t i = 0;
  for (auto _ : state) {
    const SuspensionPoint p{xs[i % 64], 0.2}, q{xs[(i + 7) % 64], 0.9};
    benchmark::DoNotOptimize(bw_distance(*base, p, q));
    ++i;
  }
}
BENCHMARK(BM_BowenWalters);

static void BM_GeometricLorenzOrbit(benchmark::State& state) {
  GeometricLorenz model;
  const Point x = model.section_point(0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(model.orbit(x, 0.0, 0.01, 10000));
}
BENCHMARK(BM_GeometricLorenzOrbit)->Unit(benchmark::kMillisecond);

static void BM_LorenzOde(benchmark::State& state) {
  auto sys = make_flow("lorenz-ode");
  const Point x{1.0, 1.0, 20.0};
  for (auto _ : state) benchmark::DoNotOptimize(sys->evolve(x, 1.0));
}
BENCHMARK(BM_LorenzOde)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
