#include "shadowlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shadowlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class RotationFlow final : public FlowSystem {
 public:
  std::string name() const override { return "rotation"; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override { return 1.0; }
  double lipschitz(double) const override { return 1.0; }
  std::optional<Point> adversarial_direction(const Point&, const Point&) const override {
    return Point{1.0};
  }

 protected:
  Point flow_impl(const Point& x, double t) const override { return Point{wrap_unit(x[0] + t)}; }

 private:
  CircleSpace space_;
};

class SinSquaredFlow final : public FlowSystem {
 public:
  std::string name() const override { return "sin-squared"; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override { return 1.0 / kTwoPi; }
  double lipschitz(double span) const override { return std::exp(std::fabs(span)); }
  std::optional<Point> adversarial_direction(const Point&, const Point&) const override {
    return Point{1.0};
  }

 protected:
  Point flow_impl(const Point& p, double t) const override {
    const double x = wrap_unit(p[0]);
    if (x == 0.0 || x == 0.5) return Point{x};
    // On each half circle cot(theta) decreases at unit rate.
    const double k = x < 0.5 ? 0.0 : 1.0;
    const double cot0 = 1.0 / std::tan(kTwoPi * x);
    const double theta = k * std::numbers::pi + 0.5 * std::numbers::pi - std::atan(cot0 - t);
    double y = wrap_unit(theta / kTwoPi);
    // Never reach the fixed points in finite time.
    if (k == 0.0) y = std::clamp(y, std::nextafter(0.0, 1.0), std::nextafter(0.5, 0.0));
    else y = std::clamp(y, std::nextafter(0.5, 1.0), std::nextafter(1.0, 0.0));
    return Point{y};
  }

 private:
  CircleSpace space_;
};

class NorthSouthFlow final : public FlowSystem {
 public:
  std::string name() const override { return "north-south"; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override { return 1.0 / kTwoPi; }
  double lipschitz(double span) const override { return std::exp(std::fabs(span)); }

 protected:
  Point flow_impl(const Point& p, double t) const override {
    const double x = wrap_unit(p[0]);
    if (x == 0.0 || x == 0.5) return Point{x};
    const double theta0 = x < 0.5 ? kTwoPi * x : kTwoPi * (x - 1.0);
    const double theta = 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(t));
    double y = wrap_unit(theta / kTwoPi);
    if (y == 0.0 || y == 0.5) y = x < 0.5 ? std::clamp(y, 1e-300, std::nextafter(0.5, 0.0)) : y;
    return Point{y};
  }

 private:
  CircleSpace space_;
};

class LinearTorusFlow final : public FlowSystem {
 public:
  LinearTorusFlow(std::string name, double a, double b, Point adversarial)
      : name_(std::move(name)), a_(a), b_(b), dir_(adversarial) {}
  std::string name() const override { return name_; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override { return std::hypot(a_, b_); }
  double lipschitz(double) const override { return 1.0; }
  std::optional<Point> adversarial_direction(const Point&, const Point&) const override {
    return dir_;
  }

 protected:
  Point flow_impl(const Point& x, double t) const override {
    return Point{wrap_unit(x[0] + a_ * t), wrap_unit(x[1] + b_ * t)};
  }

 private:
  std::string name_;
  double a_, b_;
  Point dir_;
  TorusSpace space_;
};

class IdentityFlow final : public FlowSystem {
 public:
  explicit IdentityFlow(double gap) : space_({0.0, gap}) {}
  std::string name() const override { return "two-point-identity"; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kAnalytic; }
  double speed_bound() const override { return 0.0; }
  double lipschitz(double) const override { return 1.0; }

 protected:
  Point flow_impl(const Point& x, double) const override { return x; }

 private:
  FiniteSpace space_;
};

class LorenzOde final : public FlowSystem {
 public:
  LorenzOde(double sigma, double rho, double beta)
      : sigma_(sigma), rho_(rho), beta_(beta), space_(Point{-30.0, -30.0, -5.0}, Point{30.0, 30.0, 60.0}) {}
  std::string name() const override { return "lorenz-ode"; }
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kIntegrated; }
  double group_tolerance() const override { return 1e-6; }
  double horizon() const override { return 100.0; }
  // |F| over the chart box.
  double speed_bound() const override { return 1600.0; }
  double lipschitz(double span) const override { return std::exp(15.0 * std::fabs(span)); }
  IntegratorOptions options() const { return opts_; }

 protected:
  Point flow_impl(const Point& x, double t) const override {
    VectorField f = [this](const double* u, double* du) {
      du[0] = sigma_ * (u[1] - u[0]);
      du[1] = u[0] * (rho_ - u[2]) - u[1];
      du[2] = u[0] * u[1] - beta_ * u[2];
    };
    return integrate_dopri(f, x, t, opts_);
  }

 private:
  double sigma_, rho_, beta_;
  BoxSpace space_;
  IntegratorOptions opts_{};
};

// ---- geometric Lorenz template

enum Region : int { kBox = 0, kRight = 1, kLeft = 2 };

// Loop state in the right-loop frame; the left loop is its image under
// (x, y, z) -> (-x, -y, z).
struct LoopState {
  double a = 0.0;   // exit height z_e in [0, 1]
  double ye = 0.0;  // exit y (right frame)
  double w = 0.0;   // fraction of the loop travelled
};

struct Template {
  GeometricLorenzParams p;

  double sweep() const { return 1.5 * std::numbers::pi; }
  double landing_x(double a) const { return -1.0 + p.c * a; }
  double landing_y(double ye) const { return p.y_contract * ye + p.y_offset; }

  // Right-frame embedding: a spiral around (1, ., 1) from angle -pi/2 (exit
  // at height a) to angle pi (landing on the top face).
  Point embed(const LoopState& s, int region) const {
    const double r0 = 1.0 - s.a, r1 = 1.0 - landing_x(s.a);
    const double r = r0 + (r1 - r0) * s.w;
    const double th = -0.5 * std::numbers::pi + sweep() * s.w;
    const double x = 1.0 + r * std::cos(th);
    const double z = 1.0 + r * std::sin(th);
    const double y = (1.0 - s.w) * s.ye + s.w * landing_y(s.ye);
    if (region == kRight) return Point{x, y, z, double(kRight)};
    return Point{-x, -y, z, double(kLeft)};
  }

  // Inverse of embed; nullopt if the position is not on the given loop.
  std::optional<LoopState> decode(const Point& q, int region, bool clamp) const {
    double x = q[0], y = q[1];
    const double z = q[2];
    if (region == kLeft) {
      x = -x;
      y = -y;
    }
    double th = std::atan2(z - 1.0, x - 1.0);
    if (th < -0.5 * std::numbers::pi) {
      if (!clamp) return std::nullopt;
      th = th < -0.75 * std::numbers::pi ? std::numbers::pi : -0.5 * std::numbers::pi;
    }
    LoopState s;
    s.w = (th + 0.5 * std::numbers::pi) / sweep();
    const double r = std::hypot(x - 1.0, z - 1.0);
    s.a = (1.0 + s.w - r) / (1.0 + (p.c - 1.0) * s.w);
    const double yden = 1.0 - s.w + p.y_contract * s.w;
    s.ye = (y - p.y_offset * s.w) / yden;
    const double tol = 1e-12;
    if (!clamp && (s.a < -tol || s.a > 1.0 + tol || std::fabs(s.ye) > 1.0 + tol)) return std::nullopt;
    s.a = std::clamp(s.a, 0.0, 1.0);
    s.ye = std::clamp(s.ye, -1.0, 1.0);
    s.w = std::clamp(s.w, 0.0, 1.0);
    return s;
  }

  static bool in_box(const Point& q) {
    return std::fabs(q[0]) <= 1.0 && std::fabs(q[1]) <= 1.0 && q[2] >= 0.0 && q[2] <= 1.0;
  }

  // Resolves a chart position to a state, preferring `region` for loops.
  std::optional<Point> resolve(const Point& q, int region, bool clamp) const {
    if (in_box(q)) return Point{q[0], q[1], q[2], double(kBox)};
    const int first = region == kLeft ? kLeft : kRight;
    const int second = first == kRight ? kLeft : kRight;
    for (int reg : {first, second})
      if (auto s = decode(q, reg, false)) return embed(*s, reg);
    if (!clamp) return std::nullopt;
    if (region == kBox) {
      Point b{std::clamp(q[0], -1.0, 1.0), std::clamp(q[1], -1.0, 1.0), std::clamp(q[2], 0.0, 1.0),
              double(kBox)};
      return b;
    }
    return embed(*decode(q, first, true), first);
  }

  Point advance(Point q, double t) const {
    const double lu = p.lambda_u, ls = p.lambda_s, lc = p.lambda_c;
    int region = static_cast<int>(std::lround(q[3]));
    std::optional<LoopState> loop;
    if (region != kBox) loop = decode(q, region, true);
    for (int guard = 0; guard < 10'000'000; ++guard) {
      if (region == kBox) {
        const double x = q[0], y = q[1], z = q[2];
        if (x == 0.0) return Point{0.0, y * std::exp(-ls * t), z * std::exp(-lc * t), double(kBox)};
        const double ax = std::fabs(x);
        const double tau = ax >= 1.0 ? 0.0 : std::log(1.0 / ax) / lu;
        if (t < tau)
          return Point{x * std::exp(lu * t), y * std::exp(-ls * t), z * std::exp(-lc * t),
                       double(kBox)};
        t -= tau;
        const double qx = std::min(ax, 1.0);
        LoopState s;
        s.a = std::clamp(z * std::pow(qx, lc / lu), 0.0, 1.0);
        const double ye = y * std::pow(qx, ls / lu);
        region = x > 0.0 ? kRight : kLeft;
        s.ye = region == kRight ? ye : -ye;
        s.w = 0.0;
        loop = s;
        continue;
      }
      LoopState s = *loop;
      const double remaining = (1.0 - s.w) * p.return_time;
      if (t < remaining) {
        s.w += t / p.return_time;
        return embed(s, region);
      }
      t -= remaining;
      double lx = landing_x(s.a), ly = landing_y(s.ye);
      if (region == kLeft) {
        lx = -lx;
        ly = -ly;
      }
      q = Point{lx, ly, 1.0, double(kBox)};
      region = kBox;
      loop.reset();
    }
    throw FlowError("geometric-lorenz: too many pieces");
  }
};

class LorenzSpace final : public MetricSpace {
 public:
  explicit LorenzSpace(Template tpl) : t_(tpl) {}
  std::string name() const override { return "lorenz-template"; }
  std::size_t dim() const override { return 4; }
  double distance(const Point& p, const Point& q) const override {
    return std::sqrt((p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) +
                     (p[2] - q[2]) * (p[2] - q[2]));
  }
  double diameter() const override { return std::sqrt(36.0 + 4.0 + 9.0); }
  ChartBox chart() const override {
    // The region label is not a chart axis.
    return {Point{-3.0, -1.0, 0.0, 0.0}, Point{3.0, 1.0, 3.0, 0.0}, {}};
  }
  bool contains(const Point& p) const override {
    auto r = t_.resolve(p, static_cast<int>(std::lround(p[3])), false);
    return r && distance(*r, p) <= 1e-9;
  }
  Point wrap(const Point& p) const override { return p; }
  Point project(const Point& p) const override {
    return *t_.resolve(p, static_cast<int>(std::lround(std::clamp(p[3], 0.0, 2.0))), true);
  }
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const override {
    std::vector<Point> out;
    for (const auto& u : kronecker_unit(n, 3, seed)) {
      Point q{-1.0 + 2.0 * u[0], -0.9 + 1.8 * u[1], 1.0, double(kBox)};
      out.push_back(t_.advance(q, 8.0 * u[2]));
    }
    return out;
  }
  std::vector<Point> ball_grid(const Point& c, double r, double spacing) const override {
    std::vector<Point> out{c};
    if (spacing <= 0.0 || r <= 0.0) return out;
    const int m = static_cast<int>(std::ceil(r / spacing - 1e-9));
    const int region = static_cast<int>(std::lround(c[3]));
    auto seen = [&](const Point& q) {
      for (const Point& o : out)
        if (distance(o, q) <= 1e-13 && o[3] == q[3]) return true;
      return false;
    };
    for (int i = -m; i <= m; ++i)
      for (int j = -m; j <= m; ++j)
        for (int k = -m; k <= m; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          Point q{c[0] + i * spacing, c[1] + j * spacing, c[2] + k * spacing, c[3]};
          if (distance(c, q) > r) continue;
          auto s = t_.resolve(q, region, false);
          if (s && distance(c, *s) <= r * (1.0 + 1e-12) && !seen(*s)) out.push_back(*s);
        }
    return out;
  }
  std::optional<Point> sample_in_ball(const Point& c, double r, Rng& rng) const override {
    std::uniform_real_distribution<double> u(-r, r);
    const int region = static_cast<int>(std::lround(c[3]));
    for (int attempt = 0; attempt < 4000; ++attempt) {
      Point q{c[0] + u(rng), c[1] + u(rng), c[2] + u(rng), c[3]};
      auto s = t_.resolve(q, region, false);
      if (s && distance(c, *s) <= r) return s;
    }
    return std::nullopt;
  }
  const Template& tpl() const { return t_; }

 private:
  Template t_;
};

// ---- base maps

class CantorIdentity final : public BaseSystem {
 public:
  explicit CantorIdentity(int level) : space_(level) {}
  std::string name() const override { return "cantor-interval-identity"; }
  const MetricSpace& space() const override { return space_; }
  Point map(const Point& x) const override { return x; }
  Point inverse(const Point& x) const override { return x; }
  std::optional<Point> adversarial_direction(const Point&, const Point& anchor) const override {
    // Drift toward the far end of [1, 2] as seen from the anchor.
    return Point{anchor[0] < 1.5 ? 1.0 : -1.0};
  }

 private:
  CantorIntervalSpace space_;
};

class TwoPointSwap final : public BaseSystem {
 public:
  TwoPointSwap() : space_({0.0, 1.0}) {}
  std::string name() const override { return "two-point-swap"; }
  const MetricSpace& space() const override { return space_; }
  Point map(const Point& x) const override { return Point{x[0] < 0.5 ? 1.0 : 0.0}; }
  Point inverse(const Point& x) const override { return map(x); }

 private:
  FiniteSpace space_;
};

}  // namespace

std::shared_ptr<FlowSystem> rotation_flow() { return std::make_shared<RotationFlow>(); }
std::shared_ptr<FlowSystem> sin_squared_flow() { return std::make_shared<SinSquaredFlow>(); }
std::shared_ptr<FlowSystem> north_south_flow() { return std::make_shared<NorthSouthFlow>(); }

std::shared_ptr<FlowSystem> product_rotation_flow() {
  const double r = 1.0 / std::sqrt(2.0);
  return std::make_shared<LinearTorusFlow>("product-rotation", 1.0, 1.0, Point{r, -r});
}

std::shared_ptr<FlowSystem> irrational_linear_flow(double alpha) {
  const double n = std::hypot(1.0, alpha);
  return std::make_shared<LinearTorusFlow>("irrational-linear", 1.0, alpha,
                                           Point{-alpha / n, 1.0 / n});
}

std::shared_ptr<FlowSystem> two_point_identity_flow(double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("two-point-identity: gap must be positive");
  return std::make_shared<IdentityFlow>(gap);
}

std::shared_ptr<FlowSystem> lorenz_ode(double sigma, double rho, double beta) {
  return std::make_shared<LorenzOde>(sigma, rho, beta);
}

// ---- geometric Lorenz

GeometricLorenz::GeometricLorenz(GeometricLorenzParams params) : p_(params) {
  if (!(p_.lambda_u > 0.0 && p_.lambda_s > p_.lambda_u && p_.lambda_c > 0.0 &&
        p_.lambda_c < p_.lambda_u))
    throw std::invalid_argument("geometric-lorenz: need lambda_s > lambda_u > lambda_c > 0");
  if (!(p_.c > 1.0 && p_.c <= 2.0))
    throw std::invalid_argument("geometric-lorenz: c must lie in (1, 2] so the top face maps into itself");
  if (!(p_.y_contract > 0.0 && p_.y_contract + p_.y_offset < 1.0 && p_.y_offset > p_.y_contract))
    throw std::invalid_argument("geometric-lorenz: y map must send [-1,1] into one side of y = 0");
  if (!(p_.return_time > 0.0)) throw std::invalid_argument("geometric-lorenz: return_time <= 0");
  space_ = std::make_shared<LorenzSpace>(Template{p_});
}

const MetricSpace& GeometricLorenz::space() const { return *space_; }

double GeometricLorenz::speed_bound() const {
  const double box = std::sqrt(p_.lambda_u * p_.lambda_u + p_.lambda_s * p_.lambda_s +
                               p_.lambda_c * p_.lambda_c);
  const double r_max = 2.0;
  const double loop = std::sqrt(std::pow(r_max * 1.5 * std::numbers::pi / p_.return_time, 2) +
                                std::pow(2.0 / p_.return_time, 2) * 2.0);
  return std::max(box, loop) * 1.02;
}

double GeometricLorenz::lipschitz(double span) const {
  // Not Lipschitz near the stable manifold; a working bound for well
  // separated points only.
  return 10.0 * std::exp(p_.lambda_s * std::fabs(span));
}

std::optional<Point> GeometricLorenz::adversarial_direction(const Point& x, const Point&) const {
  const int region = static_cast<int>(std::lround(x[3]));
  // In the box push toward (and across) the stable manifold x = 0.
  if (region == kBox) return Point{x[0] > 0.0 ? -1.0 : 1.0, 0.0, 0.0, 0.0};
  // On a loop steer the landing point toward x = 0, i.e. the exit height a
  // toward 1 / c; a grows as the loop radius shrinks.
  const double sx = region == kRight ? 1.0 : -1.0;
  const double dx = x[0] - sx, dz = x[2] - 1.0;
  const double n = std::hypot(dx, dz);
  if (n == 0.0) return std::nullopt;
  const auto s = static_cast<const LorenzSpace&>(*space_).tpl().decode(x, region, true);
  const double out = s->a > 1.0 / p_.c ? 1.0 : -1.0;
  return Point{out * dx / n, 0.0, out * dz / n, 0.0};
}

Point GeometricLorenz::flow_impl(const Point& x, double t) const {
  return static_cast<const LorenzSpace&>(*space_).tpl().advance(x, t);
}

std::vector<Point> GeometricLorenz::orbit(const Point& y, double t0, double dt,
                                          std::size_t n) const {
  std::vector<Point> out;
  out.reserve(n);
  if (n == 0) return out;
  Point p = evolve(y, t0);
  out.push_back(p);
  for (std::size_t k = 1; k < n; ++k) {
    p = evolve(p, dt);
    out.push_back(p);
  }
  return out;
}

Point GeometricLorenz::section_point(double x, double y) const {
  return Point{x, y, 1.0, double(kBox)};
}

double GeometricLorenz::return_map(double x) const {
  if (x == 0.0) throw std::domain_error("return_map: x = 0 lies on the stable manifold");
  const double alpha = p_.lambda_c / p_.lambda_u;
  const double v = -1.0 + p_.c * std::pow(std::min(std::fabs(x), 1.0), alpha);
  return x > 0.0 ? v : -v;
}

double GeometricLorenz::computed_return_map(double x) const {
  if (x == 0.0) throw std::domain_error("computed_return_map: x = 0 never returns");
  const double ax = std::min(std::fabs(x), 1.0);
  const double tau = std::log(1.0 / ax) / p_.lambda_u;
  // Stop just short of the landing time and finish the loop analytically.
  Point q = evolve(section_point(x), tau + p_.return_time * (1.0 - 1e-12));
  auto s = static_cast<const LorenzSpace&>(*space_).tpl().decode(q, static_cast<int>(std::lround(q[3])), true);
  const double lx = -1.0 + p_.c * s->a;
  return static_cast<int>(std::lround(q[3])) == kRight ? lx : -lx;
}

double GeometricLorenz::mean_return_time(std::size_t samples) const {
  double acc = 0.0;
  for (const auto& u : kronecker_unit(samples, 1, 7)) {
    const double ax = std::max(u[0], 1e-12);
    acc += std::log(1.0 / ax) / p_.lambda_u + p_.return_time;
  }
  return acc / static_cast<double>(samples);
}

std::vector<Point> GeometricLorenz::attractor_samples(std::size_t n, std::uint64_t seed) const {
  std::vector<Point> out;
  for (const auto& u : kronecker_unit(n, 3, seed)) {
    Point q = section_point(-1.0 + 2.0 * u[0], -0.9 + 1.8 * u[1]);
    out.push_back(evolve(q, 2.0 * p_.return_time + 8.0 * u[2]));
  }
  return out;
}

ReturnMapCheck check_return_map(const GeometricLorenz& model, std::size_t samples) {
  ReturnMapCheck r;
  auto F = [&](double u) {
    double x = 2.0 * u - 1.0;
    if (x == 0.0) x = 1e-300;
    return 0.5 * (model.computed_return_map(x) + 1.0);
  };
  r.f_left = F(0.0);
  r.f_right = F(1.0);
  r.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(samples);
    for (double sgn : {1.0, -1.0}) {
      const double a = sgn * x, h = 1e-6;
      const double b = sgn * std::min(x + h, 1.0);
      const double slope = std::fabs(model.computed_return_map(b) - model.computed_return_map(a)) /
                           std::fabs(b - a);
      r.min_slope = std::min(r.min_slope, slope);
    }
  }
  r.ok = std::fabs(r.f_left) > 1e-9 || std::fabs(r.f_right - 1.0) > 1e-9;
  if (!r.ok)
    throw std::runtime_error("geometric-lorenz: return map satisfies F(0) = 0 and F(1) = 1");
  return r;
}

// ---- base systems

std::shared_ptr<BaseSystem> cantor_interval_identity(int level) {
  return std::make_shared<CantorIdentity>(level);
}

std::shared_ptr<BaseSystem> two_point_swap() { return std::make_shared<TwoPointSwap>(); }

// ---- registry

namespace {

double param(const ModelParams& given, const ModelInfo& info, const std::string& key) {
  auto it = given.find(key);
  return it != given.end() ? it->second : info.defaults.at(key);
}

std::vector<ModelInfo> build_registry() {
  std::vector<ModelInfo> r;
  r.push_back({"rotation", "S1", "analytic", "pseudo-orbit tracing holds; minimal and isometric",
               {}, [](const ModelParams&) { return rotation_flow(); }, nullptr});
  r.push_back({"sin-squared", "S1", "analytic",
               "chain transitive but not transitive; no shadowable points", {},
               [](const ModelParams&) { return sin_squared_flow(); }, nullptr});
  r.push_back({"north-south", "S1", "analytic",
               "two hyperbolic fixed points; not chain transitive", {},
               [](const ModelParams&) { return north_south_flow(); }, nullptr});
  r.push_back({"product-rotation", "T2", "analytic",
               "isometric, not minimal; pseudo-orbit tracing fails", {},
               [](const ModelParams&) { return product_rotation_flow(); }, nullptr});
  r.push_back({"irrational-linear", "T2", "analytic", "minimal, hence transitive and chain transitive",
               {{"alpha", 0.6180339887498949}}, nullptr, nullptr});
  r.back().make_flow = [info = r.back()](const ModelParams& p) {
    return irrational_linear_flow(param(p, info, "alpha"));
  };
  r.push_back({"two-point-identity", "finite", "analytic",
               "jumps below the gap cannot leave a point; every point shadowable",
               {{"gap", 1.0}}, nullptr, nullptr});
  r.back().make_flow = [info = r.back()](const ModelParams& p) {
    return two_point_identity_flow(param(p, info, "gap"));
  };
  GeometricLorenzParams g;
  r.push_back({"geometric-lorenz", "lorenz-template", "analytic",
               "return map with F(0) != 0 or F(1) != 1; no forward shadowable points",
               {{"lambda_u", g.lambda_u},
                {"lambda_s", g.lambda_s},
                {"lambda_c", g.lambda_c},
                {"c", g.c},
                {"y_contract", g.y_contract},
                {"y_offset", g.y_offset},
                {"return_time", g.return_time}},
               nullptr, nullptr});
  r.back().make_flow = [info = r.back()](const ModelParams& p) {
    GeometricLorenzParams q;
    q.lambda_u = param(p, info, "lambda_u");
    q.lambda_s = param(p, info, "lambda_s");
    q.lambda_c = param(p, info, "lambda_c");
    q.c = param(p, info, "c");
    q.y_contract = param(p, info, "y_contract");
    q.y_offset = param(p, info, "y_offset");
    q.return_time = param(p, info, "return_time");
    return std::shared_ptr<FlowSystem>(std::make_shared<GeometricLorenz>(q));
  };
  r.push_back({"lorenz-ode", "R3 box", "integrated", "exploration only; exercises the integrator",
               {{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}}, nullptr, nullptr});
  r.back().make_flow = [info = r.back()](const ModelParams& p) {
    return lorenz_ode(param(p, info, "sigma"), param(p, info, "rho"), param(p, info, "beta"));
  };
  r.push_back({"cantor-interval-identity", "C_n u [1,2]", "base-map",
               "shadowable points are C_n minus {1}; suspension has the product structure",
               {{"level", 6.0}, {"roof_slope", 0.0}}, nullptr, nullptr});
  r.back().make_base = [info = r.back()](const ModelParams& p) {
    const double level = param(p, info, "level");
    const double slope = param(p, info, "roof_slope");
    if (level < 1 || level > 12 || level != std::floor(level))
      throw std::invalid_argument("cantor-interval-identity: level must be an integer in [1, 12]");
    auto base = cantor_interval_identity(static_cast<int>(level));
    if (slope == 0.0) return base;
    if (slope < 0.0) throw std::invalid_argument("cantor-interval-identity: roof_slope < 0");
    return with_roof(base, [slope](const Point& x) { return 1.0 + slope * x[0]; }, 1.0,
                     1.0 + 2.0 * slope);
  };
  r.push_back({"two-point-swap", "finite", "base-map", "finite space; every point shadowable",
               {}, nullptr, [](const ModelParams&) { return two_point_swap(); }});
  for (auto& info : r) {
    if (info.make_base) {
      auto mb = info.make_base;
      info.make_flow = [mb](const ModelParams& p) {
        return std::shared_ptr<FlowSystem>(std::make_shared<SuspensionFlow>(mb(p)));
      };
    }
  }
  return r;
}

void check_keys(const ModelInfo& info, const ModelParams& p) {
  for (const auto& [k, v] : p)
    if (!info.defaults.count(k))
      throw std::invalid_argument("model " + info.name + " has no parameter '" + k + "'");
}

}  // namespace

const std::vector<ModelInfo>& model_registry() {
  static const std::vector<ModelInfo> registry = build_registry();
  return registry;
}

const ModelInfo& find_model(const std::string& name) {
  for (const auto& m : model_registry())
    if (m.name == name) return m;
  throw UnknownModel("unknown model '" + name + "'");
}

std::shared_ptr<FlowSystem> make_flow(const std::string& name, const ModelParams& params) {
  const ModelInfo& info = find_model(name);
  check_keys(info, params);
  return info.make_flow(params);
}

std::shared_ptr<BaseSystem> make_base(const std::string& name, const ModelParams& params) {
  const ModelInfo& info = find_model(name);
  if (!info.make_base) throw std::invalid_argument("model " + name + " is not a base map");
  check_keys(info, params);
  return info.make_base(params);
}

}  // namespace shadowlab
