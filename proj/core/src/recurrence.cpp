#include "shadowlab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "shadowlab/pseudo_orbit.hpp"
#include "shadowlab/shadowing.hpp"

namespace shadowlab {

BoxCover::BoxCover(const MetricSpace& X, double rho, std::size_t probes_per_box,
                   std::uint64_t seed)
    : X_(&X), chart_(X.chart()), dim_(X.dim()), rho_(rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("BoxCover: rho must be positive");
  double total = 1.0;
  for (std::size_t k = 0; k < dim_; ++k) {
    const double span = chart_.hi[k] - chart_.lo[k];
    const long n = std::max(1L, static_cast<long>(std::ceil(span / rho - 1e-9)));
    counts_.push_back(n);
    side_.push_back(span / static_cast<double>(n));
    origin_.push_back(chart_.lo[k] - (chart_.periodic[k] ? 0.5 * side_.back() : 0.0));
    total *= static_cast<double>(n);
  }
  if (total > 5e6) throw std::invalid_argument("BoxCover: too many cells, increase rho");
  kept_.assign(static_cast<std::size_t>(total), -1);

  std::vector<long> idx(dim_, 0);
  for (std::size_t f = 0; f < kept_.size(); ++f) {
    Point lo = Point::zeros(dim_), hi = Point::zeros(dim_), c = Point::zeros(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      lo[k] = origin_[k] + static_cast<double>(idx[k]) * side_[k];
      hi[k] = lo[k] + side_[k];
      c[k] = 0.5 * (lo[k] + hi[k]);
    }
    std::vector<Point> pr;
    c = X.wrap(c);
    if (X.contains(c)) pr.push_back(c);
    for (Point& q : X.sample_in_box(lo, hi, probes_per_box, derive_seed(seed, f)))
      pr.push_back(std::move(q));
    if (!pr.empty()) {
      kept_[f] = static_cast<long>(boxes_.size());
      boxes_.push_back(idx);
      probes_.push_back(std::move(pr));
    }
    for (std::size_t k = dim_; k-- > 0;) {
      if (++idx[k] < counts_[k]) break;
      idx[k] = 0;
    }
  }
}

long BoxCover::flat(const std::vector<long>& idx) const {
  long f = 0;
  for (std::size_t k = 0; k < dim_; ++k) f = f * counts_[k] + idx[k];
  return f;
}

std::optional<std::size_t> BoxCover::lookup(const std::vector<long>& idx) const {
  const long b = kept_[static_cast<std::size_t>(flat(idx))];
  if (b < 0) return std::nullopt;
  return static_cast<std::size_t>(b);
}

Point BoxCover::lo(std::size_t box) const {
  Point p = Point::zeros(dim_);
  for (std::size_t k = 0; k < dim_; ++k)
    p[k] = origin_[k] + static_cast<double>(boxes_[box][k]) * side_[k];
  return p;
}

Point BoxCover::hi(std::size_t box) const {
  Point p = lo(box);
  for (std::size_t k = 0; k < dim_; ++k) p[k] += side_[k];
  return p;
}

Point BoxCover::centre(std::size_t box) const {
  Point p = lo(box);
  for (std::size_t k = 0; k < dim_; ++k) p[k] += 0.5 * side_[k];
  return X_->wrap(p);
}

std::optional<std::size_t> BoxCover::box_of(const Point& p) const {
  const Point q = X_->wrap(p);
  std::vector<std::vector<long>> cand(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const long n = counts_[k];
    const double u = (q[k] - origin_[k]) / side_[k];
    const long f = static_cast<long>(std::floor(u));
    std::vector<long> c{f};
    if (u == static_cast<double>(f)) c.push_back(f - 1);
    for (long& v : c) {
      if (chart_.periodic[k]) v = ((v % n) + n) % n;
    }
    std::vector<long> ok;
    for (long v : c) {
      if (!chart_.periodic[k] && (v < 0 || v >= n)) continue;
      ok.push_back(v);
    }
    if (ok.empty()) return std::nullopt;
    std::sort(ok.begin(), ok.end());
    ok.erase(std::unique(ok.begin(), ok.end()), ok.end());
    cand[k] = ok;
  }
  // Lexicographic enumeration of the candidate combinations.
  std::vector<std::size_t> pos(dim_, 0);
  std::vector<long> idx(dim_);
  while (true) {
    for (std::size_t k = 0; k < dim_; ++k) idx[k] = cand[k][pos[k]];
    if (auto b = lookup(idx)) return b;
    std::size_t k = dim_;
    while (k > 0) {
      --k;
      if (++pos[k] < cand[k].size()) break;
      pos[k] = 0;
      if (k == 0) return std::nullopt;
    }
    if (dim_ == 0) return std::nullopt;
  }
}

std::vector<std::size_t> BoxCover::boxes_meeting(const Point& lo, const Point& hi) const {
  std::vector<std::vector<long>> range(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    const long n = counts_[k];
    long a = static_cast<long>(std::floor((lo[k] - origin_[k]) / side_[k]));
    long b = static_cast<long>(std::floor((hi[k] - origin_[k]) / side_[k]));
    if (chart_.periodic[k]) {
      if (b - a + 1 >= n) {
        a = 0;
        b = n - 1;
      }
      for (long v = a; v <= b; ++v) range[k].push_back(((v % n) + n) % n);
    } else {
      a = std::max(a, 0L);
      b = std::min(b, n - 1);
      for (long v = a; v <= b; ++v) range[k].push_back(v);
    }
    if (range[k].empty()) return {};
  }
  std::vector<std::size_t> out;
  std::vector<std::size_t> pos(dim_, 0);
  std::vector<long> idx(dim_);
  while (true) {
    for (std::size_t k = 0; k < dim_; ++k) idx[k] = range[k][pos[k]];
    if (auto b = lookup(idx)) out.push_back(*b);
    std::size_t k = dim_;
    bool done = true;
    while (k > 0) {
      --k;
      if (++pos[k] < range[k].size()) {
        done = false;
        break;
      }
      pos[k] = 0;
    }
    if (done) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- graph

std::size_t TransitionGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& o : out) n += o.size();
  return n;
}

bool TransitionGraph::has_edge(std::size_t a, std::size_t b) const {
  return std::binary_search(out.at(a).begin(), out.at(a).end(), b);
}

TransitionGraph build_transition_graph(const FlowSystem& sys, const BoxCover& cover, double T,
                                       double delta, unsigned threads) {
  if (!(T >= 1.0)) throw std::invalid_argument("build_transition_graph: T must be >= 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("build_transition_graph: delta < 0");
  TransitionGraph G;
  G.T = T;
  G.delta = delta;
  G.out.resize(cover.size());
  const MetricSpace& X = sys.space();
  const double r = X.chart_radius(delta);
  parallel_for(cover.size(), threads, [&](std::size_t b) {
    std::vector<std::size_t> succ;
    for (const Point& y : cover.probes(b)) {
      const Point z = sys.evolve(y, T);
      Point lo = z, hi = z;
      for (std::size_t k = 0; k < z.dim(); ++k) {
        lo[k] -= r;
        hi[k] += r;
      }
      for (std::size_t c : cover.boxes_meeting(lo, hi)) succ.push_back(c);
    }
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    G.out[b] = std::move(succ);
  });
  return G;
}

std::vector<bool> reachable(const TransitionGraph& G, std::size_t from) {
  std::vector<bool> seen(G.size(), false);
  std::vector<std::size_t> stack(G.out.at(from).begin(), G.out.at(from).end());
  for (std::size_t v : stack) seen[v] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : G.out[v])
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
  }
  return seen;
}

bool chain_related(const Point& p, const Point& q, const BoxCover& cover,
                   const TransitionGraph& G) {
  const auto bp = cover.box_of(p), bq = cover.box_of(q);
  if (!bp || !bq) throw OutsideCover("chain_related: point outside the cover");
  return reachable(G, *bp)[*bq] && reachable(G, *bq)[*bp];
}

std::vector<std::size_t> strongly_connected_components(const TransitionGraph& G,
                                                       std::size_t* count) {
  const std::size_t n = G.size();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kNone), low(n, 0), comp(n, kNone);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
  std::size_t counter = 0, comps = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] != kNone) continue;
    call.push_back({s, 0});
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < G.out[v].size()) {
        const std::size_t w = G.out[v][e++];
        if (index[w] == kNone) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != done);
        ++comps;
      }
    }
  }
  if (count) *count = comps;
  return comp;
}

std::vector<std::size_t> chain_recurrent_estimate(const TransitionGraph& G) {
  std::size_t nc = 0;
  const auto comp = strongly_connected_components(G, &nc);
  std::vector<std::size_t> sizes(nc, 0);
  for (std::size_t c : comp) ++sizes[c];
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < G.size(); ++v)
    if (sizes[comp[v]] > 1 || G.has_edge(v, v)) out.push_back(v);
  return out;
}

bool chain_transitive_check(const TransitionGraph& G) {
  if (G.size() == 0) return false;
  std::size_t nc = 0;
  strongly_connected_components(G, &nc);
  if (nc != 1) return false;
  return G.size() > 1 || G.has_edge(0, 0);
}

// ---------------------------------------------------------------- probes

namespace {

double probe_step(const FlowSystem& sys, double r) {
  const double v = sys.speed_bound();
  return v > 0.0 ? std::min(0.05, r / (2.0 * v)) : 0.05;
}

}  // namespace

std::vector<NonwanderingLabel> nonwandering_estimate(const FlowSystem& sys,
                                                     const std::vector<Point>& samples,
                                                     double t_max, double r, std::size_t probes,
                                                     std::uint64_t seed, unsigned threads) {
  if (!(t_max >= 1.0)) throw std::invalid_argument("nonwandering_estimate: t_max < 1");
  if (!(r > 0.0)) throw std::invalid_argument("nonwandering_estimate: r <= 0");
  const MetricSpace& X = sys.space();
  const double dt = probe_step(sys, r);
  const auto steps = static_cast<std::size_t>(std::ceil((t_max - 1.0) / dt)) + 1;
  std::vector<NonwanderingLabel> out(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const Point& p = samples[i];
    Rng rng(derive_seed(seed, i));
    std::vector<Point> us{p};
    for (std::size_t j = 1; j < probes; ++j)
      if (auto u = X.sample_in_ball(p, r, rng)) us.push_back(*u);
    for (const Point& u : us) {
      Point y = sys.evolve(u, 1.0);
      for (std::size_t k = 0; k < steps; ++k) {
        if (k > 0) y = sys.evolve(y, dt);
        if (X.distance(y, p) < r) {
          const double t = 1.0 + static_cast<double>(k) * dt;
          if (!out[i].nonwandering || t < out[i].return_time) out[i] = {true, t};
          break;
        }
      }
    }
  });
  return out;
}

ProbeResult transitivity_probe(const FlowSystem& sys, const Point& x, double horizon,
                               double eps_dense, const std::vector<Point>& targets) {
  const MetricSpace& X = sys.space();
  const double dt = probe_step(sys, eps_dense);
  std::vector<bool> covered(targets.size(), false);
  std::size_t left = targets.size();
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  constexpr std::size_t kChunk = 4096;
  Point y = x;
  for (std::size_t k = 0; k <= steps && left > 0; k += kChunk) {
    const std::size_t n = std::min(kChunk, steps + 1 - k);
    const auto pts = sys.orbit(y, 0.0, dt, n + 1);
    for (std::size_t j = 0; j < n && left > 0; ++j)
      for (std::size_t i = 0; i < targets.size(); ++i)
        if (!covered[i] && X.distance(pts[j], targets[i]) <= eps_dense) {
          covered[i] = true;
          --left;
        }
    y = pts[n];
  }
  ProbeResult r;
  r.ok = left == 0;
  r.coverage = targets.empty()
                   ? 1.0
                   : static_cast<double>(targets.size() - left) / static_cast<double>(targets.size());
  return r;
}

MinimalityResult minimality_probe(const FlowSystem& sys, const std::vector<Point>& starts,
                                  double horizon, double eps_dense,
                                  const std::vector<Point>& targets, unsigned threads) {
  MinimalityResult m;
  m.starts.resize(starts.size());
  parallel_for(starts.size(), threads, [&](std::size_t i) {
    m.starts[i] = transitivity_probe(sys, starts[i], horizon, eps_dense, targets);
  });
  m.ok = std::all_of(m.starts.begin(), m.starts.end(), [](const ProbeResult& r) { return r.ok; });
  return m;
}

void write_edges_csv(std::ostream& os, const TransitionGraph& G) {
  os << "from,to\r\n";
  for (std::size_t a = 0; a < G.size(); ++a)
    for (std::size_t b : G.out[a]) os << a << ',' << b << "\r\n";
}

void write_boxes_csv(std::ostream& os, const BoxCover& cover,
                     const std::vector<std::size_t>& boxes) {
  const std::size_t d = cover.space().dim();
  os << "box";
  for (std::size_t k = 0; k < d; ++k) os << ",lo" << k << ",hi" << k;
  os << "\r\n";
  for (std::size_t b : boxes) {
    const Point lo = cover.lo(b), hi = cover.hi(b);
    os << b;
    for (std::size_t k = 0; k < d; ++k) os << ',' << format_double(lo[k]) << ',' << format_double(hi[k]);
    os << "\r\n";
  }
}

}  // namespace shadowlab
