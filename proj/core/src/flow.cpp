#include "shadowlab/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace shadowlab {

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::kAnalytic: return "analytic";
    case FlowKind::kIntegrated: return "integrated";
    case FlowKind::kSuspensionDerived: return "suspension-derived";
  }
  return "unknown";
}

Point FlowSystem::evolve(const Point& x, double t) const {
  if (!(std::fabs(t) <= horizon()))
    throw HorizonExceeded(name() + ": |t| = " + std::to_string(std::fabs(t)) +
                          " exceeds horizon " + std::to_string(horizon()));
  if (t < 0.0 && !invertible())
    throw FlowError(name() + ": backward time on a forward-only flow");
  if (t == 0.0) return x;
  return flow_impl(x, t);
}

std::vector<Point> FlowSystem::orbit(const Point& y, double t0, double dt,
                                     std::size_t n) const {
  std::vector<Point> out;
  out.reserve(n);
  if (n == 0) return out;
  out.push_back(evolve(y, t0));
  for (std::size_t k = 1; k < n; ++k) {
    if (kind() == FlowKind::kIntegrated)
      out.push_back(evolve(out.back(), dt));
    else
      out.push_back(evolve(y, t0 + static_cast<double>(k) * dt));
  }
  return out;
}

double group_defect(const FlowSystem& sys, const Point& x, double s, double t) {
  if (s == 0.0 && t == 0.0) return 0.0;
  const Point a = sys.evolve(sys.evolve(x, s), t);
  const Point b = sys.evolve(x, s + t);
  return sys.space().distance(a, b);
}

double empirical_lipschitz(const FlowSystem& sys, double span, std::size_t samples,
                           std::uint64_t seed) {
  const auto& X = sys.space();
  auto pts = X.sample(samples, seed);
  Rng rng(derive_seed(seed, 17));
  std::uniform_real_distribution<double> ut(sys.invertible() ? -span : 0.0, span);
  double lip = 1.0;
  const double h = 1e-4 * std::max(X.diameter(), 1e-9);
  for (const Point& p : pts) {
    auto q = X.sample_in_ball(p, h, rng);
    if (!q) continue;
    double d0 = X.distance(p, *q);
    if (d0 <= 0.0) continue;
    double t = ut(rng);
    double d1 = X.distance(sys.evolve(p, t), sys.evolve(*q, t));
    lip = std::max(lip, d1 / d0);
  }
  return 1.5 * lip;
}

Point integrate_dopri(const VectorField& field, const Point& x0, double t,
                      const IntegratorOptions& opts) {
  constexpr std::size_t N = Point::kMaxDim;
  const std::size_t n = x0.dim();
  const double dir = t < 0.0 ? -1.0 : 1.0;
  const double total = std::fabs(t);
  auto f = [&](const std::array<double, N>& x, std::array<double, N>& dx) {
    field(x.data(), dx.data());
    for (std::size_t i = 0; i < n; ++i) dx[i] *= dir;
  };

  // Dormand-Prince coefficients.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2; (void)c3; (void)c4; (void)c5;

  std::array<double, N> x{}, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y{}, tmp{};
  for (std::size_t i = 0; i < n; ++i) x[i] = x0[i];
  double done = 0.0;
  double h = std::min(opts.max_step, total);
  f(x, k1);
  std::size_t steps = 0;
  while (done < total) {
    if (++steps > opts.max_steps) throw IntegrationFailure("integrator: step budget exhausted");
    h = std::min(h, total - done);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * a21 * k1[i];
    f(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
    f(tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = x[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(y, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
      double sc = opts.abs_tol + opts.rel_tol * std::max(std::fabs(x[i]), std::fabs(y[i]));
      err = std::max(err, std::fabs(e) / sc);
    }
    if (err <= 1.0) {
      done += h;
      x = y;
      k1 = k7;  // FSAL
    }
    double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(opts.max_step, h * factor);
    if (h < opts.min_step && done < total)
      throw IntegrationFailure("integrator: step size underflow");
  }
  Point out = Point::zeros(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i];
  return out;
}

}  // namespace shadowlab
