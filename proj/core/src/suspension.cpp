#include "shadowlab/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shadowlab {

namespace {

class RoofedBase final : public BaseSystem {
 public:
  RoofedBase(std::shared_ptr<const BaseSystem> base, std::function<double(const Point&)> roof,
             double lo, double hi)
      : base_(std::move(base)), roof_(std::move(roof)), lo_(lo), hi_(hi) {
    if (!(lo_ > 0.0) || hi_ < lo_) throw std::invalid_argument("with_roof: bad roof bounds");
  }
  std::string name() const override { return base_->name() + "+roof"; }
  const MetricSpace& space() const override { return base_->space(); }
  Point map(const Point& x) const override { return base_->map(x); }
  Point inverse(const Point& x) const override { return base_->inverse(x); }
  double roof(const Point& x) const override { return roof_(x); }
  double roof_min() const override { return lo_; }
  double roof_max() const override { return hi_; }
  double lipschitz() const override { return base_->lipschitz(); }
  std::optional<Point> adversarial_direction(const Point& x, const Point& anchor) const override {
    return base_->adversarial_direction(x, anchor);
  }

 private:
  std::shared_ptr<const BaseSystem> base_;
  std::function<double(const Point&)> roof_;
  double lo_, hi_;
};

Point with_height(const Point& x, double s) {
  Point p = Point::zeros(x.dim() + 1);
  for (std::size_t k = 0; k < x.dim(); ++k) p[k] = x[k];
  p[x.dim()] = s;
  return p;
}

}  // namespace

std::shared_ptr<BaseSystem> with_roof(std::shared_ptr<const BaseSystem> base,
                                      std::function<double(const Point&)> roof, double lo,
                                      double hi) {
  return std::make_shared<RoofedBase>(std::move(base), std::move(roof), lo, hi);
}

void validate_base(const BaseSystem& base, std::size_t samples, std::uint64_t seed) {
  const MetricSpace& X = base.space();
  if (std::fabs(X.diameter() - 1.0) > 1e-9)
    throw std::invalid_argument("base space " + X.name() + " must have diameter 1");
  for (const Point& x : X.sample(samples, seed)) {
    if (X.distance(base.map(base.inverse(x)), x) > 1e-12 ||
        X.distance(base.inverse(base.map(x)), x) > 1e-12)
      throw std::invalid_argument("base map is not inverted by its inverse at " + x.to_string());
    const double r = base.roof(x);
    if (r < base.roof_min() - 1e-12 || r > base.roof_max() + 1e-12)
      throw std::invalid_argument("roof out of its declared bounds at " + x.to_string());
  }
}

SuspensionPoint normalize(const BaseSystem& base, Point x, double s) {
  double r = base.roof(x);
  while (s >= r) {
    s -= r;
    x = base.map(x);
    r = base.roof(x);
  }
  while (s < 0.0) {
    x = base.inverse(x);
    s += base.roof(x);
  }
  // Rounding can land exactly on the roof after adding it back.
  if (s >= base.roof(x)) {
    s = 0.0;
    x = base.map(x);
  }
  return {x, s};
}

SuspensionPoint suspension_flow(const BaseSystem& base, const SuspensionPoint& p, double t) {
  if (t == 0.0) return p;
  return normalize(base, p.x, p.s + t);
}

double bw_distance(const BaseSystem& base, const SuspensionPoint& p, const SuspensionPoint& q) {
  const MetricSpace& X = base.space();
  const double s = p.s, u = q.s;
  const Point& x = p.x;
  const Point& y = q.x;
  const Point fx = base.map(x), fy = base.map(y);
  const double dxy = X.distance(x, y);
  const double dfxfy = X.distance(fx, fy);
  auto H = [](double h, double d0, double d1) { return (1.0 - h) * d0 + h * d1; };
  const double direct = std::fabs(s - u) + std::min(H(s, dxy, dfxfy), H(u, dxy, dfxfy));
  // Up through the roof from p: (x, s) -> (fx, 0) -> horizontal at 0 or at u.
  const double d_fx_y = X.distance(fx, y);
  const double d_ffx_fy = X.distance(base.map(fx), fy);
  const double roof = (1.0 - s) + u + std::min(d_fx_y, H(u, d_fx_y, d_ffx_fy));
  // Up through the roof from q.
  const double d_x_fy = X.distance(x, fy);
  const double d_fx_ffy = X.distance(fx, base.map(fy));
  const double floor = (1.0 - u) + s + std::min(d_x_fy, H(s, d_x_fy, d_fx_ffy));
  return std::min({direct, roof, floor});
}

double bw_chain_distance(const BaseSystem& base, const SuspensionPoint& p,
                         const SuspensionPoint& q, int levels) {
  const MetricSpace& X = base.space();
  auto iterate = [&](Point z, int k) {
    for (; k > 0; --k) z = base.map(z);
    for (; k < 0; ++k) z = base.inverse(z);
    return z;
  };
  double best = std::numeric_limits<double>::infinity();
  for (int k = -2; k <= 2; ++k) {
    const Point a = iterate(p.x, k), fa = base.map(a);
    for (int j = -2; j <= 2; ++j) {
      const Point b = iterate(q.x, j), fb = base.map(b);
      const double d0 = X.distance(a, b), d1 = X.distance(fa, fb);
      for (int l = 0; l <= levels; ++l) {
        const double h = static_cast<double>(l) / levels;
        const double cost = std::fabs(p.s - (h + k)) + std::fabs(q.s - (h + j)) +
                            (1.0 - h) * d0 + h * d1;
        best = std::min(best, cost);
      }
    }
  }
  return best;
}

SuspensionPoint conjugacy_to_unit_roof(const BaseSystem& base, const SuspensionPoint& p) {
  return {p.x, p.s / base.roof(p.x)};
}

SuspensionPoint conjugacy_from_unit_roof(const BaseSystem& base, const SuspensionPoint& p) {
  return {p.x, p.s * base.roof(p.x)};
}

// ---- space

SuspensionSpace::SuspensionSpace(std::shared_ptr<const BaseSystem> base) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("SuspensionSpace: null base");
  if (base_->space().dim() + 1 > Point::kMaxDim)
    throw std::invalid_argument("SuspensionSpace: base dimension too large");
}

std::string SuspensionSpace::name() const { return "suspension(" + base_->space().name() + ")"; }

SuspensionPoint SuspensionSpace::decode(const Point& p) const {
  const std::size_t d = base_->space().dim();
  Point x = Point::zeros(d);
  for (std::size_t k = 0; k < d; ++k) x[k] = p[k];
  return {x, p[d]};
}

Point SuspensionSpace::encode(const SuspensionPoint& p) const { return with_height(p.x, p.s); }

double SuspensionSpace::distance(const Point& p, const Point& q) const {
  const BaseSystem& b = *base_;
  return bw_distance(b, conjugacy_to_unit_roof(b, decode(p)), conjugacy_to_unit_roof(b, decode(q)));
}

double SuspensionSpace::diameter() const { return 1.5; }

ChartBox SuspensionSpace::chart() const {
  ChartBox bc = base_->space().chart();
  const std::size_t d = base_->space().dim();
  ChartBox c;
  c.lo = with_height(bc.lo, 0.0);
  c.hi = with_height(bc.hi, base_->roof_max());
  for (std::size_t k = 0; k < d; ++k) c.periodic[k] = bc.periodic[k];
  return c;
}

Point SuspensionSpace::wrap(const Point& p) const {
  SuspensionPoint sp = decode(p);
  return encode(normalize(*base_, base_->space().wrap(sp.x), sp.s));
}

bool SuspensionSpace::contains(const Point& p) const {
  SuspensionPoint sp = decode(p);
  return base_->space().contains(sp.x) && sp.s >= 0.0 && sp.s < base_->roof(sp.x);
}

Point SuspensionSpace::project(const Point& p) const {
  SuspensionPoint sp = decode(p);
  Point x = base_->space().project(sp.x);
  return encode(normalize(*base_, x, sp.s));
}

std::vector<Point> SuspensionSpace::sample(std::size_t n, std::uint64_t seed) const {
  std::vector<Point> xs = base_->space().sample(n, seed);
  auto hs = kronecker_unit(n, 1, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Point> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back(encode({xs[i], hs[i][0] * base_->roof(xs[i])}));
  return out;
}

std::vector<Point> SuspensionSpace::ball_grid(const Point& c, double r, double spacing) const {
  std::vector<Point> out{c};
  if (spacing <= 0.0 || r <= 0.0) return out;
  const MetricSpace& B = base_->space();
  const std::size_t d = B.dim();
  const SuspensionPoint cp = decode(c);
  const double bstep = B.chart_radius(spacing);
  const int mb = static_cast<int>(std::ceil(B.chart_radius(r) / bstep - 1e-9));
  const double hstep = spacing * base_->roof_min();
  const int mh = static_cast<int>(std::ceil(r * base_->roof_max() / hstep - 1e-9));
  std::array<int, Point::kMaxDim> idx{};
  for (std::size_t k = 0; k < d; ++k) idx[k] = -mb;
  idx[d] = -mh;
  auto seen = [&](const Point& q) {
    for (const Point& o : out)
      if (distance(o, q) <= 1e-13) return true;
    return false;
  };
  while (true) {
    Point x = cp.x;
    for (std::size_t k = 0; k < d; ++k) x[k] += idx[k] * bstep;
    x = B.project(x);
    Point q = encode(normalize(*base_, x, cp.s + idx[d] * hstep));
    if (distance(c, q) <= r * (1.0 + 1e-12) && !seen(q)) out.push_back(q);
    std::size_t k = 0;
    while (k <= d && ++idx[k] > (k == d ? mh : mb)) {
      idx[k] = k == d ? -mh : -mb;
      ++k;
    }
    if (k > d) break;
  }
  return out;
}

std::optional<Point> SuspensionSpace::sample_in_ball(const Point& c, double r, Rng& rng) const {
  const SuspensionPoint cp = decode(c);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 4000; ++attempt) {
    auto x = base_->space().sample_in_ball(cp.x, r, rng);
    if (!x) continue;
    Point q = encode(normalize(*base_, *x, cp.s + u(rng) * r * base_->roof_max()));
    if (distance(c, q) <= r) return q;
  }
  return std::nullopt;
}

// ---- flow

SuspensionFlow::SuspensionFlow(std::shared_ptr<const BaseSystem> base) : space_(std::move(base)) {}

std::string SuspensionFlow::name() const { return "suspension(" + base().name() + ")"; }

double SuspensionFlow::speed_bound() const { return 1.0 / base().roof_min(); }

double SuspensionFlow::lipschitz(double span) const {
  const double turns = std::ceil(std::fabs(span) / base().roof_min()) + 1.0;
  return std::pow(base().lipschitz(), turns) * base().roof_max() / base().roof_min();
}

std::optional<Point> SuspensionFlow::adversarial_direction(const Point& x,
                                                           const Point& anchor) const {
  auto d = base().adversarial_direction(space_.decode(x).x, space_.decode(anchor).x);
  if (!d) return std::nullopt;
  return with_height(*d, 0.0);
}

Point SuspensionFlow::flow_impl(const Point& x, double t) const {
  return space_.encode(suspension_flow(base(), space_.decode(x), t));
}

std::vector<Point> SuspensionFlow::orbit(const Point& y, double t0, double dt,
                                         std::size_t n) const {
  std::vector<Point> out;
  out.reserve(n);
  if (n == 0) return out;
  SuspensionPoint p = space_.decode(evolve(y, t0));
  out.push_back(space_.encode(p));
  for (std::size_t k = 1; k < n; ++k) {
    p = suspension_flow(base(), p, dt);
    out.push_back(space_.encode(p));
  }
  return out;
}

// ---- discrete shadowing

namespace {

Point iterate(const BaseSystem& base, Point x, long n) {
  for (; n > 0; --n) x = base.map(x);
  for (; n < 0; ++n) x = base.inverse(x);
  return x;
}

DiscretePseudoOrbit discrete_noisy(const BaseSystem& base, const Point& p, double delta, long back,
                                   long forward, Rng& rng) {
  const MetricSpace& X = base.space();
  auto jitter = [&](const Point& c) {
    auto q = X.sample_in_ball(c, delta, rng);
    if (!q) throw GeneratorError("discrete pseudo-orbit: cannot sample around " + c.to_string());
    return *q;
  };
  std::vector<Point> fwd{p};
  for (long n = 0; n < forward; ++n) fwd.push_back(jitter(base.map(fwd.back())));
  std::vector<Point> bwd;
  Point cur = p;
  for (long n = 0; n < back; ++n) {
    cur = base.inverse(jitter(cur));
    bwd.push_back(cur);
  }
  DiscretePseudoOrbit P;
  P.low = -back;
  P.x.assign(bwd.rbegin(), bwd.rend());
  P.x.insert(P.x.end(), fwd.begin(), fwd.end());
  return P;
}

DiscretePseudoOrbit discrete_adversarial(const BaseSystem& base, const Point& p, double delta,
                                         double eps, const DiscreteConfig& cfg, Rng& rng) {
  const MetricSpace& X = base.space();
  std::normal_distribution<double> g(0.0, 1.0);
  Point fixed_dir = Point::zeros(X.dim());
  for (std::size_t k = 0; k < X.dim(); ++k) fixed_dir[k] = g(rng);
  std::vector<Point> truths = X.ball_grid(p, eps, eps / 2.0);
  std::vector<char> separated(truths.size(), 0);
  std::size_t n_sep = 0;
  std::vector<Point> fwd{p};
  long done_at = -1;
  for (long k = 0; k < cfg.adversarial_max_steps; ++k) {
    Point y = base.map(fwd.back());
    auto dir = base.adversarial_direction(y, p);
    fwd.push_back(kick(X, y, dir ? *dir : fixed_dir, delta));
    for (std::size_t j = 0; j < truths.size(); ++j) {
      truths[j] = base.map(truths[j]);
      if (!separated[j] && X.distance(fwd.back(), truths[j]) > 2.0 * eps) {
        separated[j] = 1;
        ++n_sep;
      }
    }
    if (done_at < 0 && n_sep == truths.size()) done_at = k;
    if (done_at >= 0 && k >= done_at + cfg.adversarial_extra_steps) break;
  }
  DiscretePseudoOrbit P;
  P.low = -cfg.adversarial_back;
  for (long n = cfg.adversarial_back; n >= 1; --n) P.x.push_back(iterate(base, p, -n));
  P.x.insert(P.x.end(), fwd.begin(), fwd.end());
  return P;
}

}  // namespace

DiscreteVerdict decide_discrete_shadowing(const BaseSystem& base, const DiscretePseudoOrbit& P,
                                          double eps, std::optional<double> grid_spacing) {
  const MetricSpace& X = base.space();
  const long zero = -P.low;
  if (zero < 0 || zero >= static_cast<long>(P.x.size()))
    throw std::invalid_argument("decide_discrete_shadowing: window must contain index 0");
  const double spacing = grid_spacing.value_or(eps / 5.0);
  DiscreteVerdict v;
  v.eps_hi = eps + spacing;
  v.achieved_sup = std::numeric_limits<double>::infinity();
  const std::vector<Point> cands = X.ball_grid(P.x[static_cast<std::size_t>(zero)], eps, spacing);
  v.candidates = cands.size();
  for (const Point& q : cands) {
    double sup = 0.0;
    Point z = q;
    for (long n = zero; n < static_cast<long>(P.x.size()) && sup <= v.eps_hi; ++n) {
      sup = std::max(sup, X.distance(z, P.x[static_cast<std::size_t>(n)]));
      z = base.map(z);
    }
    z = q;
    for (long n = zero - 1; n >= 0 && sup <= v.eps_hi; --n) {
      z = base.inverse(z);
      sup = std::max(sup, X.distance(z, P.x[static_cast<std::size_t>(n)]));
    }
    if (sup < v.achieved_sup) {
      v.achieved_sup = sup;
      v.q = q;
    }
  }
  if (v.achieved_sup <= eps)
    v.tag = VerdictTag::kShadowed;
  else if (v.achieved_sup > v.eps_hi)
    v.tag = VerdictTag::kNotShadowedAtResolution;
  else
    v.tag = VerdictTag::kUnknown;
  return v;
}

DiscreteEstimate discrete_shadowable_estimate(const BaseSystem& base, const Point& p, double eps,
                                              const DiscreteConfig& cfg, std::uint64_t seed) {
  const auto& ds = cfg.delta_schedule;
  if (ds.empty()) throw std::invalid_argument("discrete_shadowable_estimate: empty delta schedule");
  for (std::size_t i = 1; i < ds.size(); ++i)
    if (!(ds[i] < ds[i - 1]))
      throw std::invalid_argument("discrete_shadowable_estimate: delta schedule must decrease");
  DiscreteEstimate est;
  for (std::size_t di = 0; di < ds.size(); ++di) {
    bool all_pass = true;
    std::optional<DiscretePseudoOrbit> fail_orbit;
    std::optional<DiscreteVerdict> fail_verdict;
    for (std::size_t j = 0; j < cfg.trials; ++j) {
      Rng rng(derive_seed(seed, di, j));
      DiscretePseudoOrbit P =
          (j == 0 && cfg.adversarial)
              ? discrete_adversarial(base, p, ds[di], cfg.adversarial_eps.value_or(eps), cfg, rng)
              : discrete_noisy(base, p, ds[di], cfg.back, cfg.forward, rng);
      DiscreteVerdict v = decide_discrete_shadowing(base, P, eps, cfg.grid_spacing);
      if (v.tag == VerdictTag::kShadowed) continue;
      all_pass = false;
      const bool falsified = v.tag == VerdictTag::kNotShadowedAtResolution;
      if (!fail_verdict || falsified) {
        fail_orbit = std::move(P);
        fail_verdict = v;
      }
      if (falsified) break;
    }
    est.delta = ds[di];
    if (all_pass) {
      est.status = PointStatus::kPass;
      est.witness.reset();
      est.witness_verdict.reset();
      return est;
    }
    est.witness = std::move(fail_orbit);
    est.witness_verdict = fail_verdict;
  }
  est.status = est.witness_verdict->tag == VerdictTag::kNotShadowedAtResolution
                   ? PointStatus::kFail
                   : PointStatus::kUnknown;
  return est;
}

CorrespondenceReport suspension_correspondence_check(std::shared_ptr<const BaseSystem> base,
                                                     const std::vector<Point>& base_samples,
                                                     double eps,
                                                     const CorrespondenceConfig& cfg,
                                                     std::uint64_t seed) {
  if (cfg.heights.empty()) throw std::invalid_argument("correspondence: no heights");
  SuspensionFlow flow(base);
  const std::size_t n = base_samples.size();
  const std::size_t H = cfg.heights.size();
  const std::size_t fibers = std::min(cfg.fiber_checks, n);
  PointEstimateConfig fc = cfg.flow;
  const unsigned threads = fc.search.threads == 0 ? default_threads() : fc.search.threads;
  if (threads > 1) fc.search.threads = 1;

  std::vector<PointStatus> base_status(n);
  // statuses[i][h]: every height for the fiber checks, one height otherwise.
  std::vector<std::vector<PointStatus>> susp(n, std::vector<PointStatus>(H, PointStatus::kUnknown));
  struct Job {
    std::size_t i, h;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < fibers)
      for (std::size_t h = 0; h < H; ++h) jobs.push_back({i, h});
    else
      jobs.push_back({i, i % H});
  }
  parallel_for(n, threads, [&](std::size_t i) {
    base_status[i] =
        discrete_shadowable_estimate(*base, base_samples[i], eps, cfg.discrete, derive_seed(seed, i, 1))
            .status;
  });
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const Point& x = base_samples[job.i];
    const Point p = flow.suspension_space().encode({x, cfg.heights[job.h] * base->roof(x)});
    susp[job.i][job.h] =
        estimate_shadowable_point(flow, p, eps, fc, derive_seed(seed, job.i, 2)).status;
  });

  CorrespondenceReport rep;
  rep.matrix.assign(3, std::vector<std::size_t>(3, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = i % H;
    CorrespondenceRow row{base_samples[i], cfg.heights[h], susp[i][h], base_status[i]};
    rep.matrix[static_cast<std::size_t>(row.suspension)][static_cast<std::size_t>(row.base)]++;
    if (row.suspension == row.base) {
      ++rep.agreements;
    } else {
      ++rep.disagreements;
      if (row.suspension != PointStatus::kUnknown && row.base != PointStatus::kUnknown)
        ++rep.pass_fail_conflicts;
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i < fibers; ++i) {
    ++rep.fibers_checked;
    for (std::size_t h = 1; h < H; ++h)
      if (susp[i][h] != susp[i][0]) {
        ++rep.fiber_violations;
        break;
      }
  }
  return rep;
}

}  // namespace shadowlab
