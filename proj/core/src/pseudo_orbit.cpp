#include "shadowlab/pseudo_orbit.hpp"

#include <array>
#include <cstdint>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace shadowlab {

std::vector<double> partial_sums(const std::vector<double>& durations, long zero) {
  const long n = static_cast<long>(durations.size());
  std::vector<double> s(static_cast<std::size_t>(n + 1), 0.0);
  for (long pos = 0; pos <= n; ++pos) {
    const long i = pos - zero;
    double acc = 0.0;
    if (i > 0) {
      for (long j = 0; j < i; ++j) acc += durations[static_cast<std::size_t>(j + zero)];
    } else if (i < 0) {
      for (long j = i; j <= -1; ++j) acc -= durations[static_cast<std::size_t>(j + zero)];
    }
    s[static_cast<std::size_t>(pos)] = acc;
  }
  return s;
}

PseudoOrbit::PseudoOrbit(long low, std::vector<Entry> entries, PseudoOrbitKind kind,
                         WindowPolicy policy)
    : low_(low), entries_(std::move(entries)), kind_(kind), policy_(policy) {
  if (entries_.empty()) throw std::invalid_argument("PseudoOrbit: empty window");
  if (low_ > 0 || high() < 0)
    throw std::invalid_argument("PseudoOrbit: window must satisfy low <= 0 <= high");
  if (kind_ != PseudoOrbitKind::kBiInfinite && low_ != 0)
    throw std::invalid_argument("PseudoOrbit: forward orbits and chains start at index 0");
  std::vector<double> t;
  t.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (!(e.t > 0.0)) throw std::invalid_argument("PseudoOrbit: durations must be positive");
    t.push_back(e.t);
  }
  // Running sums are the same quantities as the three-case formula, computed
  // outward from index 0 in O(n).
  const long zero = -low_;
  sums_.assign(entries_.size() + 1, 0.0);
  for (long pos = zero + 1; pos <= static_cast<long>(t.size()); ++pos)
    sums_[static_cast<std::size_t>(pos)] =
        sums_[static_cast<std::size_t>(pos - 1)] + t[static_cast<std::size_t>(pos - 1)];
  for (long pos = zero - 1; pos >= 0; --pos)
    sums_[static_cast<std::size_t>(pos)] =
        sums_[static_cast<std::size_t>(pos + 1)] - t[static_cast<std::size_t>(pos)];
}

long PseudoOrbit::segment(double t) const {
  auto it = std::upper_bound(sums_.begin(), sums_.end(), t);
  long pos = static_cast<long>(it - sums_.begin()) - 1;
  pos = std::clamp(pos, 0L, static_cast<long>(entries_.size()) - 1);
  return pos + low_;
}

Point star(const FlowSystem& sys, const PseudoOrbit& P, double t) {
  if (P.policy() == WindowPolicy::kTruncate && (t < P.span_begin() || t > P.span_end()))
    throw OutsideWindow("star: t = " + format_double(t) + " outside the pseudo-orbit window");
  const long i = P.segment(t);
  return sys.evolve(P.point(i), t - P.sum(i));
}

ValidationReport validate(const FlowSystem& sys, const PseudoOrbit& P, double delta,
                          double T, std::optional<double> T2) {
  ValidationReport rep;
  const double slack = sys.group_tolerance();
  for (long i = P.low(); i < P.high(); ++i) {
    Violation v;
    v.index = i;
    v.duration = P.duration(i);
    v.jump = sys.space().distance(sys.evolve(P.point(i), P.duration(i)), P.point(i + 1));
    rep.jumps.push_back(v.jump);
    rep.max_jump = std::max(rep.max_jump, v.jump);
    v.jump_too_large = v.jump > delta + slack;
    v.duration_too_short = v.duration < T;
    v.duration_too_long = T2 && v.duration > *T2;
    if (v.jump_too_large || v.duration_too_short || v.duration_too_long) {
      rep.ok = false;
      rep.violations.push_back(v);
    }
  }
  return rep;
}

Point kick(const MetricSpace& X, const Point& y, const Point& dir, double delta) {
  if (delta <= 0.0) return y;
  double norm = 0.0;
  for (std::size_t k = 0; k < dir.dim(); ++k) norm += dir[k] * dir[k];
  norm = std::sqrt(norm);
  if (norm == 0.0) return y;
  double scale = X.chart_radius(delta) * (1.0 - 1e-9) / norm;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Point step = Point::zeros(y.dim());
    for (std::size_t k = 0; k < y.dim() && k < dir.dim(); ++k) step[k] = dir[k] * scale;
    Point z = X.displace(y, step.coords());
    if (X.distance(y, z) <= delta) return z;
    scale *= 0.7;
  }
  return y;
}

namespace {

Point noisy_step(const FlowSystem& sys, const Point& target, const NoiseConfig& cfg, Rng& rng) {
  const MetricSpace& X = sys.space();
  if (cfg.delta <= 0.0) return target;
  if (cfg.law == NoiseLaw::kDirectional && cfg.direction) {
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    return kick(X, target, *cfg.direction, cfg.delta * mag(rng));
  }
  auto q = X.sample_in_ball(target, cfg.delta, rng);
  if (!q) throw GeneratorError("generate_noisy: cannot sample the delta-ball around " +
                               target.to_string());
  return *q;
}

}  // namespace

PseudoOrbit generate_noisy(const FlowSystem& sys, const Point& p, const NoiseConfig& cfg,
                           std::uint64_t seed) {
  if (cfg.delta < 0.0) throw std::invalid_argument("generate_noisy: delta < 0");
  if (cfg.t_min <= 0.0 || cfg.t_max < cfg.t_min)
    throw std::invalid_argument("generate_noisy: bad duration range");
  if (cfg.back > 0 && !sys.invertible())
    throw std::invalid_argument("generate_noisy: backward entries need an invertible flow");
  Rng rng(seed);
  std::uniform_real_distribution<double> dur(cfg.t_min, cfg.t_max);
  const long n = cfg.back + cfg.forward + 1;
  std::vector<Entry> e(static_cast<std::size_t>(n));
  const long zero = cfg.back;
  e[static_cast<std::size_t>(zero)].x = p;
  for (auto& en : e) en.t = cfg.t_min == cfg.t_max ? cfg.t_min : dur(rng);
  for (long k = zero; k + 1 < n; ++k) {
    const auto& cur = e[static_cast<std::size_t>(k)];
    e[static_cast<std::size_t>(k + 1)].x = noisy_step(sys, sys.evolve(cur.x, cur.t), cfg, rng);
  }
  for (long k = zero; k > 0; --k) {
    // z within delta of x_k, then x_{k-1} = phi_{-t}(z) so the hop lands on z.
    Point z = noisy_step(sys, e[static_cast<std::size_t>(k)].x, cfg, rng);
    auto& prev = e[static_cast<std::size_t>(k - 1)];
    prev.x = sys.evolve(z, -prev.t);
  }
  return PseudoOrbit(-cfg.back, std::move(e),
                     cfg.back == 0 ? PseudoOrbitKind::kForward : PseudoOrbitKind::kBiInfinite);
}

namespace {

// Points bucketed by chart cells of side >= the query radius, so a ball
// query only visits neighbouring cells. Falls back to a scan on glued spaces.
class PointIndex {
 public:
  /// Cells have chart side chart_radius(cell); queries scan as many cells as
  /// their radius needs.
  PointIndex(const MetricSpace& X, double cell) : X_(X), chart_(X.chart()) {
    local_ = X.chart_local();
    const double side = X.chart_radius(cell);
    d_ = X.dim();
    for (std::size_t k = 0; k < d_; ++k) {
      const double span = chart_.hi[k] - chart_.lo[k];
      const long n = std::max(1L, static_cast<long>(std::floor(span / side)));
      counts_[k] = n;
      side_[k] = chart_.periodic[k] ? span / static_cast<double>(n) : side;
    }
  }

  void insert(const Point& p) {
    points_.push_back(p);
    if (local_) cells_[key(cell(p))].push_back(points_.size() - 1);
  }

  bool any_within(const Point& q, double r) const {
    if (!local_) {
      for (const Point& p : points_)
        if (X_.distance(p, q) <= r) return true;
      return false;
    }
    const Cell c = cell(q);
    Cell off{}, idx{}, reach{};
    for (std::size_t k = 0; k < d_; ++k) {
      reach[k] = degenerate(k) ? 0 : static_cast<long>(std::ceil(X_.chart_radius(r) / side_[k] - 1e-9));
      if (chart_.periodic[k]) reach[k] = std::min(reach[k], (counts_[k] - 1) / 2 + 1);
      off[k] = -reach[k];
    }
    while (true) {
      for (std::size_t k = 0; k < d_; ++k) {
        idx[k] = c[k] + off[k];
        if (chart_.periodic[k]) idx[k] = ((idx[k] % counts_[k]) + counts_[k]) % counts_[k];
      }
      auto it = cells_.find(key(idx));
      if (it != cells_.end())
        for (std::size_t i : it->second)
          if (X_.distance(points_[i], q) <= r) return true;
      std::size_t k = 0;
      while (k < d_ && ++off[k] > reach[k]) {
        off[k] = -reach[k];
        ++k;
      }
      if (k == d_) break;
    }
    return false;
  }

  std::size_t size() const { return points_.size(); }

 private:
  using Cell = std::array<long, Point::kMaxDim>;

  // Degenerate chart axes carry labels, not positions.
  bool degenerate(std::size_t k) const { return chart_.hi[k] == chart_.lo[k]; }

  Cell cell(const Point& p) const {
    Cell c{};
    for (std::size_t k = 0; k < d_; ++k) {
      if (degenerate(k)) continue;
      long v = static_cast<long>(std::floor((p[k] - chart_.lo[k]) / side_[k]));
      if (chart_.periodic[k]) v = ((v % counts_[k]) + counts_[k]) % counts_[k];
      c[k] = v;
    }
    return c;
  }
  std::uint64_t key(const Cell& c) const {
    std::uint64_t h = 0;
    for (std::size_t k = 0; k < d_; ++k)
      h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(c[k] + (1L << 20));
    return h;
  }

  const MetricSpace& X_;
  ChartBox chart_;
  bool local_ = true;
  std::size_t d_ = 0;
  Cell counts_{};
  std::array<double, Point::kMaxDim> side_{};
  std::vector<Point> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Greedy net of one true orbit, extended forward on demand, together with
// the trace steps that are currently far from every point of it.
struct TruthTrack {
  Point head;
  Point last;
  double head_time = 0.0;
  PointIndex net;
  std::vector<long> far;  // trace indices farther than the cut from the net
};

}  // namespace

PseudoOrbit generate_adversarial(const FlowSystem& sys, const Point& p,
                                 const AdversarialConfig& cfg, std::uint64_t seed) {
  const MetricSpace& X = sys.space();
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Point fixed_dir = Point::zeros(X.dim());
  for (std::size_t k = 0; k < X.dim(); ++k) fixed_dir[k] = g(rng);

  // A trace step separates from a truth (a point of a coarse grid on
  // B[p, eps]) when it is 2 eps away from the whole orbit of that truth, as
  // far as it has been followed. Orbits are followed to twice the trace
  // length, which lets reparametrised matches catch up, and much further
  // once every truth looks separated.
  const double net_r = cfg.eps / 4.0;
  const double cut = 2.0 * cfg.eps + net_r;
  const double v = sys.speed_bound();
  const double step = v > 0.0 ? std::min(cfg.duration, net_r / v) : cfg.duration;
  std::vector<TruthTrack> tracks;
  auto add_to_net = [&](TruthTrack& tr, const Point& q) {
    if (X.distance(q, tr.last) <= net_r || tr.net.any_within(q, net_r)) return false;
    tr.net.insert(q);
    tr.last = q;
    return true;
  };
  for (const Point& q : X.ball_grid(p, cfg.eps, cfg.eps / 2.0)) {
    TruthTrack tr{q, q, 0.0, PointIndex(X, cut / 3.0), {}};
    tr.net.insert(q);
    if (sys.invertible()) {
      const auto n = static_cast<std::size_t>(
          std::ceil(cfg.duration * static_cast<double>(cfg.back) / step)) + 1;
      for (const Point& b : sys.orbit(q, 0.0, -step, n)) add_to_net(tr, b);
    }
    tracks.push_back(std::move(tr));
  }
  std::vector<Point> trace;
  auto extend = [&](TruthTrack& tr, double until) {
    while (tr.head_time < until) {
      tr.head = sys.evolve(tr.head, step);
      tr.head_time += step;
      if (!add_to_net(tr, tr.head)) continue;
      std::erase_if(tr.far, [&](long i) {
        return X.distance(tr.head, trace[static_cast<std::size_t>(i)]) <= cut;
      });
    }
  };

  const long back = sys.invertible() ? cfg.back : 0;
  std::vector<Entry> fwd{{p, cfg.duration}};
  trace.push_back(p);
  Point x = p;
  long done_at = -1, last_progress = 0;
  std::size_t best = 0;
  const double idle = std::ceil(cfg.stall_factor * cfg.eps / std::max(cfg.delta, 1e-300));
  const long stall = static_cast<long>(std::min(idle, 1e9)) + 8;
  const double long_reach = cfg.duration * std::min(4.0 * static_cast<double>(stall), 2e4);
  double reach = 0.0;
  for (long k = 0; k < cfg.max_steps; ++k) {
    Point y = sys.evolve(x, cfg.duration);
    auto dir = sys.adversarial_direction(y, p);
    x = kick(X, y, dir ? *dir : fixed_dir, cfg.delta);
    fwd.push_back({x, cfg.duration});
    trace.push_back(x);
    const long idx = static_cast<long>(trace.size()) - 1;
    const double look =
        std::max(reach, 2.0 * cfg.duration * static_cast<double>(k + 1) + 4.0);
    std::size_t n_separated = 0;
    for (auto& tr : tracks) {
      extend(tr, look);
      if (!tr.net.any_within(x, cut)) tr.far.push_back(idx);
      if (!tr.far.empty()) ++n_separated;
    }
    if (done_at < 0 && n_separated == tracks.size() && reach < long_reach) {
      // Slow truths can lag far behind the trace: confirm against a long
      // stretch of every orbit before accepting the separation.
      reach = long_reach;
      n_separated = 0;
      for (auto& tr : tracks) {
        extend(tr, reach);
        if (!tr.far.empty()) ++n_separated;
      }
    }
    if (n_separated > best) {
      best = n_separated;
      last_progress = k;
    }
    if (done_at < 0 && n_separated == tracks.size()) done_at = k;
    if (done_at >= 0 && k >= done_at + cfg.extra_steps) break;
    if (done_at < 0 && k - last_progress >= stall) break;
  }
  std::vector<Entry> all;
  all.reserve(fwd.size() + static_cast<std::size_t>(back));
  for (long k = back; k >= 1; --k)
    all.push_back({sys.evolve(p, -cfg.duration * static_cast<double>(k)), cfg.duration});
  all.insert(all.end(), fwd.begin(), fwd.end());
  return PseudoOrbit(-back, std::move(all),
                     back == 0 ? PseudoOrbitKind::kForward : PseudoOrbitKind::kBiInfinite);
}

PseudoOrbit refine_to_bounded_steps(const FlowSystem& sys, const PseudoOrbit& P, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("refine_to_bounded_steps: a must be positive");
  // Block n occupies indices A_n .. A_n + m_n with A_0 = 0.
  std::vector<long> m(P.size());
  for (long n = P.low(); n <= P.high(); ++n) {
    const double t = P.duration(n);
    long mn = t < 2.0 * a ? 0 : static_cast<long>(std::floor(t / a)) - 1;
    while (mn > 0 && t - static_cast<double>(mn) * a < a) --mn;
    while (t - static_cast<double>(mn) * a >= 2.0 * a) ++mn;
    m[static_cast<std::size_t>(n - P.low())] = mn;
  }
  long A_low = 0;
  for (long n = P.low(); n < 0; ++n) A_low -= m[static_cast<std::size_t>(n - P.low())] + 1;
  std::vector<Entry> out;
  for (long n = P.low(); n <= P.high(); ++n) {
    const long mn = m[static_cast<std::size_t>(n - P.low())];
    const double r = P.duration(n) - static_cast<double>(mn) * a;
    for (long j = 0; j <= mn; ++j)
      out.push_back({j == 0 ? P.point(n) : sys.evolve(P.point(n), a * static_cast<double>(j)),
                     j < mn ? a : r});
  }
  return PseudoOrbit(A_low, std::move(out), P.kind(), P.policy());
}

CoarsenResult coarsen_steps(const FlowSystem& sys, const PseudoOrbit& P, long m, double beta,
                            double delta, const ContinuityModulus& modulus) {
  if (m < 1) throw std::invalid_argument("coarsen_steps: m must be positive");
  const double bound = static_cast<double>(m) * modulus(beta);
  if (m > 1 && !(bound < delta))
    throw ModulusBoundError("coarsen_steps: m * modulus(beta) = " + format_double(bound) +
                            " is not below delta = " + format_double(delta));
  if (m == 1) return {P, 0.0};
  auto floor_div = [](long x, long d) { return x >= 0 ? x / d : -((-x + d - 1) / d); };
  const long i_lo = -floor_div(-P.low(), m);  // ceil(low / m)
  const long i_hi = floor_div(P.high(), m);
  std::vector<Entry> out;
  for (long i = i_lo; i <= i_hi; ++i) {
    double lambda = 0.0;
    for (long j = 0; j < m && i * m + j <= P.high(); ++j) lambda += P.duration(i * m + j);
    out.push_back({P.point(i * m), lambda});
  }
  (void)sys;
  return {PseudoOrbit(i_lo, std::move(out), P.kind(), P.policy()), bound};
}

SpliceResult splice_through_point(const FlowSystem& sys, const PseudoOrbit& P, const Point& p) {
  const MetricSpace& X = sys.space();
  std::vector<Entry> e = P.entries();
  const double eta = X.distance(P.point(0), p);
  auto jump = [&](const PseudoOrbit& Q, long i) {
    if (i < Q.low() || i >= Q.high()) return 0.0;
    return X.distance(sys.evolve(Q.point(i), Q.duration(i)), Q.point(i + 1));
  };
  const double old_before = jump(P, -1);
  const double old_after = jump(P, 0);
  e[static_cast<std::size_t>(-P.low())].x = p;
  PseudoOrbit Q(P.low(), std::move(e), P.kind(), P.policy());
  SpliceResult r{Q, jump(Q, -1), jump(Q, 0), old_before + eta,
                 old_after + sys.lipschitz(P.duration(0)) * eta};
  return r;
}

PrependResult prepend_chain(const FlowSystem& sys, const PseudoOrbit& chain,
                            const PseudoOrbit& forward, double tol) {
  if (chain.low() != 0 || forward.low() != 0)
    throw std::invalid_argument("prepend_chain: chain and forward orbit must start at index 0");
  const long m = chain.high();
  if (sys.space().distance(chain.point(m), forward.point(0)) > tol)
    throw std::invalid_argument("prepend_chain: chain does not end at the forward orbit's x_0");
  std::vector<Entry> z;
  for (long j = 0; j < m; ++j) z.push_back(chain.at(j));
  for (const Entry& e : forward.entries()) z.push_back(e);
  PseudoOrbit out(0, std::move(z), PseudoOrbitKind::kForward, forward.policy());
  const double offset = out.sum(m);
  for (long k = 0; k <= forward.high() + 1; ++k) {
    const double lhs = out.sum(m + k) - offset;
    const double rhs = forward.sum(k);
    if (std::fabs(lhs - rhs) > 1e-12 * std::max(1.0, std::fabs(out.sum(m + k))))
      throw std::logic_error("prepend_chain: suffix sums do not match the forward sums");
  }
  return {std::move(out), offset};
}

PseudoOrbit periodic_extension(const FlowSystem& sys, const PseudoOrbit& loop, long periods,
                               double tol) {
  const long k = loop.high();
  if (loop.low() != 0 || k < 1) throw std::invalid_argument("periodic_extension: need a chain");
  if (sys.space().distance(loop.point(0), loop.point(k)) > tol)
    throw std::invalid_argument("periodic_extension: chain is not a loop");
  std::vector<Entry> out;
  for (long n = -periods; n < periods; ++n)
    for (long i = 0; i < k; ++i) out.push_back(loop.at(i));
  out.push_back(loop.at(0));
  return PseudoOrbit(-periods * k, std::move(out));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const PseudoOrbit& P) {
  const std::size_t d = P.point(0).dim();
  out << "index,t";
  for (std::size_t k = 0; k < d; ++k) out << ",x" << k;
  out << "\r\n";
  for (long i = P.low(); i <= P.high(); ++i) {
    out << i << ',' << format_double(P.duration(i));
    for (std::size_t k = 0; k < d; ++k) out << ',' << format_double(P.point(i)[k]);
    out << "\r\n";
  }
}

PseudoOrbit read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty input");
  std::vector<Entry> e;
  long low = std::numeric_limits<long>::max();
  long expect = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 3) throw std::runtime_error("read_csv: malformed row '" + line + "'");
    long idx = std::stol(cells[0]);
    if (low == std::numeric_limits<long>::max()) {
      low = idx;
      expect = idx;
    }
    if (idx != expect) throw std::runtime_error("read_csv: indices must be consecutive");
    ++expect;
    std::vector<double> c;
    for (std::size_t k = 2; k < cells.size(); ++k) c.push_back(std::stod(cells[k]));
    e.push_back({Point(std::span<const double>(c)), std::stod(cells[1])});
  }
  if (e.empty()) throw std::runtime_error("read_csv: no rows");
  return PseudoOrbit(low, std::move(e), low == 0 ? PseudoOrbitKind::kForward
                                                 : PseudoOrbitKind::kBiInfinite);
}

}  // namespace shadowlab
