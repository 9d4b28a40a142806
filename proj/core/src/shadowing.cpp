#include "shadowlab/shadowing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace shadowlab {

std::string to_string(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::kShadowed: return "SHADOWED";
    case VerdictTag::kNotShadowedAtResolution: return "NOT_SHADOWED_AT_RESOLUTION";
    case VerdictTag::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::kPass: return "PASS";
    case PointStatus::kFail: return "FAIL";
    case PointStatus::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

unsigned default_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SHADOWLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---- replay

ReplayResult check_certificate(const FlowSystem& sys, const PseudoOrbit& P, double eps,
                               const ShadowingCertificate& cert,
                               std::optional<double> max_step) {
  const TimeGrid& g = cert.grid;
  const double a = P.span_begin(), b = P.span_end();
  const double tol = 1e-9 * std::max(1.0, std::fabs(b - a));
  if (!(g.step > 0.0)) throw GridTooCoarse("check_certificate: grid step must be positive");
  if (max_step && g.step > *max_step * (1 + 1e-12))
    throw GridTooCoarse("check_certificate: grid step " + format_double(g.step) +
                        " exceeds " + format_double(*max_step));
  if (g.start > a + tol || g.end < b - tol)
    throw GridTooCoarse("check_certificate: grid does not cover the pseudo-orbit window");
  const MetricSpace& X = sys.space();
  ReplayResult r;
  auto probe = [&](const Point& trace, double t) {
    const double d = X.distance(trace, sys.evolve(cert.y, cert.h(t)));
    if (d > r.achieved_sup || std::isnan(d)) {
      r.achieved_sup = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
      r.worst_time = t;
    }
  };
  const long n = static_cast<long>(std::ceil((g.end - g.start) / g.step - 1e-9));
  for (long j = 0; j <= n; ++j) {
    const double t = std::min(g.start + static_cast<double>(j) * g.step, g.end);
    if (t < a - tol || t > b + tol) continue;
    const double tc = std::clamp(t, a, b);
    probe(star(sys, P, tc), tc);
  }
  for (long i = P.low(); i < P.high(); ++i)
    probe(sys.evolve(P.point(i), P.duration(i)), P.sum(i + 1));
  r.ok = r.achieved_sup <= eps;
  return r;
}

// ---- discretisation

TraceSamples sample_trace(const FlowSystem& sys, const PseudoOrbit& P, double dt) {
  TraceSamples tr;
  std::optional<Point> left;
  for (long i = P.low(); i <= P.high(); ++i) {
    const double t = P.duration(i);
    const long m = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-9)));
    const double h = t / static_cast<double>(m);
    std::vector<Point> pts = sys.orbit(P.point(i), 0.0, h, static_cast<std::size_t>(m + 1));
    for (long j = 0; j < m; ++j) {
      if (i == 0 && j == 0) tr.k0 = static_cast<long>(tr.row_time.size());
      tr.row_time.push_back(P.sum(i) + h * static_cast<double>(j));
      std::vector<Point> row{pts[static_cast<std::size_t>(j)]};
      if (j == 0 && left) row.push_back(*left);
      tr.rows.push_back(std::move(row));
    }
    left = pts.back();
  }
  tr.row_time.push_back(P.span_end());
  tr.rows.push_back({*left});
  return tr;
}

OrbitSamples sample_orbit(const FlowSystem& sys, const TraceSamples& tr, const Point& y,
                          double dt, double band, bool forward_only) {
  OrbitSamples o;
  o.band = band;
  const double v_min = forward_only ? 0.0 : std::min(0.0, tr.row_time.front() - band);
  const double v_max = std::max(0.0, tr.row_time.back() + band);
  o.l0 = static_cast<long>(std::ceil(-v_min / dt - 1e-9));
  const long n = o.l0 + static_cast<long>(std::ceil(v_max / dt - 1e-9)) + 1;
  o.col_time.resize(static_cast<std::size_t>(n));
  for (long l = 0; l < n; ++l) o.col_time[static_cast<std::size_t>(l)] = dt * static_cast<double>(l - o.l0);
  if (o.l0 > 0) {
    // Backward part from y so the sample at time 0 is y itself.
    std::vector<Point> back = sys.orbit(y, 0.0, -dt, static_cast<std::size_t>(o.l0 + 1));
    o.cols.assign(back.rbegin(), back.rend());
    std::vector<Point> fwd = sys.orbit(y, dt, dt, static_cast<std::size_t>(n - o.l0 - 1));
    o.cols.insert(o.cols.end(), fwd.begin(), fwd.end());
  } else {
    o.cols = sys.orbit(y, 0.0, dt, static_cast<std::size_t>(n));
  }
  return o;
}

bool cell_free(const TraceSamples& tr, const OrbitSamples& orb, const MetricSpace& X, long k,
               long l, double thr) {
  if (k < 0 || l < 0 || k >= static_cast<long>(tr.rows.size()) ||
      l >= static_cast<long>(orb.cols.size()))
    return false;
  if (std::fabs(orb.col_time[static_cast<std::size_t>(l)] -
                tr.row_time[static_cast<std::size_t>(k)]) > orb.band + 1e-9)
    return false;
  const Point& w = orb.cols[static_cast<std::size_t>(l)];
  for (const Point& u : tr.rows[static_cast<std::size_t>(k)])
    if (!(X.distance(u, w) <= thr)) return false;
  return true;
}

namespace {

using Intervals = std::vector<std::pair<long, long>>;

bool member(const Intervals& iv, long c) {
  auto it = std::upper_bound(iv.begin(), iv.end(), c,
                             [](long v, const std::pair<long, long>& x) { return v < x.first; });
  return it != iv.begin() && (it - 1)->second >= c;
}

// Sweep in local coordinates: row r, column c, start (0, 0). Returns the
// matched column range of each row, or nothing.
std::optional<Intervals> sweep(long rows, long cols, const std::function<bool(long, long)>& free,
                               std::size_t& cells, std::size_t max_cells, bool& exhausted) {
  auto test = [&](long r, long c) {
    if (c >= cols) return false;
    ++cells;
    return free(r, c);
  };
  std::vector<Intervals> reach(static_cast<std::size_t>(rows));
  if (!test(0, 0)) return std::nullopt;
  long e = 0;
  while (test(0, e + 1)) ++e;
  reach[0].push_back({0, e});
  for (long r = 1; r < rows; ++r) {
    if (cells > max_cells) {
      exhausted = true;
      return std::nullopt;
    }
    const Intervals& prev = reach[static_cast<std::size_t>(r - 1)];
    Intervals& cur = reach[static_cast<std::size_t>(r)];
    long done = -1;  // last column already tested in this row
    for (const auto& [a, b] : prev) {
      for (long c = std::max(a, done + 1); c <= b + 1 && c < cols; ++c) {
        if (!test(r, c)) {
          done = c;
          continue;
        }
        long end = c;
        while (test(r, end + 1)) ++end;
        cur.push_back({c, end});
        done = end + 1;  // end + 1 was tested and is blocked (or out of range)
        c = end + 1;
      }
    }
    if (cur.empty()) return std::nullopt;
  }
  Intervals ranges(static_cast<std::size_t>(rows));
  // Last row: prefer the column closest to the start diagonal.
  const Intervals& last = reach.back();
  long x = last.front().first;
  long best = std::numeric_limits<long>::max();
  for (const auto& [a, b] : last) {
    long cand = std::clamp(rows - 1, a, b);
    if (std::labs(cand - (rows - 1)) < best) {
      best = std::labs(cand - (rows - 1));
      x = cand;
    }
  }
  for (long r = rows - 1; r >= 1; --r) {
    const Intervals& row = reach[static_cast<std::size_t>(r)];
    const Intervals& prev = reach[static_cast<std::size_t>(r - 1)];
    auto it = std::upper_bound(row.begin(), row.end(), x,
                               [](long v, const std::pair<long, long>& iv) { return v < iv.first; });
    const long a = (it - 1)->first;
    long entry = x;
    while (entry > a && !member(prev, entry) && !member(prev, entry - 1)) --entry;
    ranges[static_cast<std::size_t>(r)] = {entry, x};
    x = member(prev, entry) ? entry : entry - 1;
  }
  ranges[0] = {0, x};
  return ranges;
}

}  // namespace

PathResult match_path(const TraceSamples& tr, const OrbitSamples& orb, const MetricSpace& X,
                      double thr, std::size_t max_cells) {
  PathResult res;
  const long K = static_cast<long>(tr.rows.size());
  const long L = static_cast<long>(orb.cols.size());
  const long k0 = tr.k0, l0 = orb.l0;
  std::vector<std::pair<long, long>> ranges(static_cast<std::size_t>(K));

  auto fwd = sweep(
      K - k0, L - l0, [&](long r, long c) { return cell_free(tr, orb, X, k0 + r, l0 + c, thr); },
      res.cells, max_cells, res.exhausted);
  if (!fwd) return res;
  for (long r = 0; r < K - k0; ++r) {
    const auto& [a, b] = (*fwd)[static_cast<std::size_t>(r)];
    ranges[static_cast<std::size_t>(k0 + r)] = {l0 + a, l0 + b};
  }
  long bwd_row0 = 0;
  if (k0 > 0) {
    auto bwd = sweep(
        k0 + 1, l0 + 1,
        [&](long r, long c) { return cell_free(tr, orb, X, k0 - r, l0 - c, thr); }, res.cells,
        max_cells, res.exhausted);
    if (!bwd) return res;
    bwd_row0 = (*bwd)[0].second;
    for (long r = 1; r <= k0; ++r) {
      const auto& [a, b] = (*bwd)[static_cast<std::size_t>(r)];
      ranges[static_cast<std::size_t>(k0 - r)] = {l0 - b, l0 - a};
    }
  }
  // Row k0 holds the horizontal moves of both halves.
  const long right = (*fwd)[0].second;
  const long left = k0 > 0 ? bwd_row0 : 0;
  ranges[static_cast<std::size_t>(k0)] = {l0 - left, l0 + right};
  res.ranges = std::move(ranges);
  return res;
}

Reparam reparam_from_path(const TraceSamples& tr, const OrbitSamples& orb,
                          const std::vector<std::pair<long, long>>& ranges, double dt) {
  const long K = static_cast<long>(ranges.size());
  // Twice the matched time in units of dt keeps ties exact.
  std::vector<long> twice(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) {
    const auto& [a, b] = ranges[static_cast<std::size_t>(k)];
    twice[static_cast<std::size_t>(k)] = a + b - 2 * orb.l0;
  }
  twice[static_cast<std::size_t>(tr.k0)] = 0;
  std::vector<Reparam::Anchor> anchors;
  anchors.reserve(static_cast<std::size_t>(K));
  for (long k = 0; k < K;) {
    long e = k;
    while (e + 1 < K && twice[static_cast<std::size_t>(e + 1)] == twice[static_cast<std::size_t>(k)]) ++e;
    const long m = e - k + 1;
    const double base = 0.5 * dt * static_cast<double>(twice[static_cast<std::size_t>(k)]);
    const double step = dt / (4.0 * static_cast<double>(m));
    const double ref = (tr.k0 >= k && tr.k0 <= e) ? static_cast<double>(tr.k0 - k)
                                                   : 0.5 * static_cast<double>(m - 1);
    for (long j = k; j <= e; ++j) {
      const double v = j == tr.k0 ? 0.0 : base + step * (static_cast<double>(j - k) - ref);
      anchors.emplace_back(j == tr.k0 ? 0.0 : tr.row_time[static_cast<std::size_t>(j)], v);
    }
    k = e + 1;
  }
  return simplify(Reparam(std::move(anchors), 1.0, 1.0), 1e-9);
}

// ---- decision

namespace {

struct CandidateOutcome {
  std::optional<ShadowingCertificate> cert;
  bool path_hi = false;
  bool over_budget = false;
  std::size_t cells = 0;
  std::string error;
};

Verdict decide(const FlowSystem& sys, const PseudoOrbit& P, double eps, const SearchConfig& cfg,
               bool forward_only) {
  if (!(eps > 0.0)) throw std::invalid_argument("decide_shadowing: eps must be positive");
  if (!sys.invertible()) forward_only = true;
  if (forward_only && P.low() < 0)
    throw std::invalid_argument("decide_shadowing: forward search needs a pseudo-orbit from index 0");
  const MetricSpace& X = sys.space();
  Verdict v;
  SearchLog& log = v.log;
  log.eps = eps;
  const double speed = sys.speed_bound();
  log.dt = cfg.dt.value_or(speed > 0.0 ? std::min(0.1, eps / (4.0 * speed)) : 0.1);
  log.grid_spacing = cfg.grid_spacing.value_or(eps / 5.0);
  log.band = cfg.band;
  log.horizon_begin = P.span_begin();
  log.horizon_end = P.span_end();
  log.forward_only = forward_only;
  const double slack = sys.speed_bound() * log.dt;
  log.eps_lo = std::max(eps - slack, 0.5 * eps);
  log.eps_hi = eps + slack;
  const double dt = log.dt;
  const TimeGrid grid{P.span_begin(), P.span_end(), dt / 2.0};

  if (cfg.seed_certificate) {
    ShadowingCertificate c = *cfg.seed_certificate;
    try {
      ReplayResult r = check_certificate(sys, P, eps, c);
      if (r.ok) {
        c.achieved_sup = r.achieved_sup;
        v.tag = VerdictTag::kShadowed;
        v.certificate = c;
        v.reason = "seed certificate replays";
        return v;
      }
    } catch (const GridTooCoarse&) {
    }
  }

  const std::vector<Point> cands =
      cfg.candidates ? *cfg.candidates : X.ball_grid(P.point(0), eps, log.grid_spacing);
  log.candidates = cands.size();
  if (cands.size() > cfg.max_candidates) {
    v.reason = "candidate budget exhausted (" + std::to_string(cands.size()) + " > " +
               std::to_string(cfg.max_candidates) + ")";
    return v;
  }
  const TraceSamples tr = sample_trace(sys, P, dt);

  std::vector<CandidateOutcome> out(cands.size());
  auto run = [&](std::size_t i) {
    CandidateOutcome& o = out[i];
    const Point& y = cands[i];
    if (X.distance(P.point(0), y) > eps) return;
    try {
      const OrbitSamples orb = sample_orbit(sys, tr, y, dt, cfg.band, forward_only);
      auto attempt = [&](double thr) -> bool {
        PathResult pr = match_path(tr, orb, X, thr, cfg.max_cells);
        o.cells += pr.cells;
        o.over_budget = o.over_budget || pr.exhausted;
        if (!pr.ranges) return false;
        o.path_hi = true;
        ShadowingCertificate c{y, reparam_from_path(tr, orb, *pr.ranges, dt), 0.0, grid};
        ReplayResult r = check_certificate(sys, P, eps, c);
        if (r.ok) {
          c.achieved_sup = r.achieved_sup;
          o.cert = std::move(c);
        }
        return true;
      };
      if (attempt(log.eps_lo) && o.cert) return;
      if (!attempt(log.eps_hi) || o.cert) return;
      attempt(eps);
    } catch (const FlowError& e) {
      o.error = e.what();
      o.over_budget = true;
    }
  };
  // The centre goes first: when it already works the rest is not needed.
  if (!cands.empty()) run(0);
  if (cands.empty() || !out[0].cert || cfg.best_certificate)
    parallel_for(cands.size() - (cands.empty() ? 0 : 1), cfg.threads,
                 [&](std::size_t i) { run(i + 1); });

  std::optional<std::size_t> best;
  std::string first_error;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const CandidateOutcome& o = out[i];
    log.cells_evaluated += o.cells;
    log.candidates_with_path += o.path_hi ? 1 : 0;
    log.candidates_over_budget += o.over_budget ? 1 : 0;
    if (!o.error.empty() && first_error.empty()) first_error = o.error;
    if (!o.cert) continue;
    ++log.candidates_certified;
    if (!best || o.cert->achieved_sup < out[*best].cert->achieved_sup) best = i;
  }
  if (best) {
    v.tag = VerdictTag::kShadowed;
    v.certificate = out[*best].cert;
    log.best_candidate = *best;
    return v;
  }
  if (log.candidates_with_path > 0) {
    v.reason = "discrete matchings exist but none replays within eps";
  } else if (log.candidates_over_budget > 0) {
    v.reason = first_error.empty() ? "cell budget exhausted" : "flow error: " + first_error;
  } else {
    v.tag = VerdictTag::kNotShadowedAtResolution;
    v.reason = "no candidate admits a monotone matching at eps + slack";
  }
  return v;
}

}  // namespace

Verdict decide_shadowing(const FlowSystem& sys, const PseudoOrbit& P, double eps,
                         const SearchConfig& cfg) {
  return decide(sys, P, eps, cfg, false);
}

Verdict decide_forward_shadowing(const FlowSystem& sys, const PseudoOrbit& F, double eps,
                                 const SearchConfig& cfg) {
  return decide(sys, F, eps, cfg, true);
}

// ---- estimation

PointEstimate estimate_shadowable_point(const FlowSystem& sys, const Point& p, double eps,
                                        const PointEstimateConfig& cfg, std::uint64_t seed,
                                        CertificateCache* cache) {
  const auto& ds = cfg.delta_schedule;
  if (ds.empty()) throw std::invalid_argument("estimate_shadowable_point: empty delta schedule");
  for (std::size_t i = 1; i < ds.size(); ++i)
    if (!(ds[i] < ds[i - 1]))
      throw std::invalid_argument("estimate_shadowable_point: delta schedule must decrease");
  const bool forward_only = cfg.forward_only || !sys.invertible();
  PointEstimate est;
  for (std::size_t di = 0; di < ds.size(); ++di) {
    const double delta = ds[di];
    bool all_pass = true;
    std::optional<PseudoOrbit> fail_orbit, pass_orbit;
    std::optional<Verdict> fail_verdict, pass_verdict;
    for (std::size_t j = 0; j < cfg.trials; ++j) {
      const std::uint64_t s = derive_seed(seed, di, j);
      PseudoOrbit P = [&] {
        if (j == 0 && cfg.adversarial) {
          AdversarialConfig ac;
          ac.delta = delta;
          ac.eps = cfg.adversarial_eps.value_or(eps);
          ac.back = forward_only ? 0 : cfg.adversarial_back;
          ac.max_steps = cfg.adversarial_max_steps;
          ac.extra_steps = cfg.adversarial_extra_steps;
          ac.stall_factor = cfg.adversarial_stall_factor;
          return generate_adversarial(sys, p, ac, s);
        }
        NoiseConfig nc;
        nc.delta = delta;
        nc.t_min = cfg.t_min;
        nc.t_max = cfg.t_max;
        nc.back = forward_only ? 0 : cfg.back;
        nc.forward = cfg.forward;
        return generate_noisy(sys, p, nc, s);
      }();
      SearchConfig sc = cfg.search;
      if (cache) {
        auto it = cache->find({di, j});
        if (it != cache->end()) sc.seed_certificate = it->second;
      }
      Verdict v = forward_only ? decide_forward_shadowing(sys, P, eps, sc)
                               : decide_shadowing(sys, P, eps, sc);
      est.trials.push_back({delta, j, v.tag});
      if (v.shadowed()) {
        if (cache) (*cache)[{di, j}] = *v.certificate;
        if (j == 0) {
          pass_orbit = std::move(P);
          pass_verdict = std::move(v);
        }
        continue;
      }
      all_pass = false;
      const bool falsified = v.tag == VerdictTag::kNotShadowedAtResolution;
      if (!fail_verdict || falsified) {
        fail_orbit = std::move(P);
        fail_verdict = std::move(v);
      }
      if (falsified) break;
    }
    est.delta = delta;
    if (all_pass) {
      est.status = PointStatus::kPass;
      est.witness = std::move(pass_orbit);
      est.witness_verdict = std::move(pass_verdict);
      return est;
    }
    est.witness = std::move(fail_orbit);
    est.witness_verdict = std::move(fail_verdict);
  }
  est.status = est.witness_verdict->tag == VerdictTag::kNotShadowedAtResolution
                   ? PointStatus::kFail
                   : PointStatus::kUnknown;
  return est;
}

double SetEstimate::pass_fraction(std::size_t eps_index) const {
  const auto& row = by_eps.at(eps_index);
  if (row.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& e : row) n += e.status == PointStatus::kPass ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(row.size());
}

SetEstimate estimate_shadowable_set(const FlowSystem& sys, const std::vector<Point>& samples,
                                    std::vector<double> eps_schedule,
                                    const PointEstimateConfig& cfg, std::uint64_t seed) {
  std::sort(eps_schedule.begin(), eps_schedule.end());
  SetEstimate out;
  out.samples = samples;
  out.eps = eps_schedule;
  if (eps_schedule.empty()) return out;
  PointEstimateConfig c = cfg;
  c.adversarial_eps = cfg.adversarial_eps.value_or(eps_schedule.back());
  const unsigned threads = cfg.search.threads == 0 ? default_threads() : cfg.search.threads;
  if (threads > 1) c.search.threads = 1;
  std::vector<CertificateCache> caches(samples.size());
  out.by_eps.assign(eps_schedule.size(), std::vector<PointEstimate>(samples.size()));
  for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
    parallel_for(samples.size(), threads, [&](std::size_t i) {
      out.by_eps[e][i] = estimate_shadowable_point(sys, samples[i], eps_schedule[e], c,
                                                   derive_seed(seed, i), &caches[i]);
    });
  }
  for (std::size_t e = 0; e + 1 < eps_schedule.size(); ++e)
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (out.by_eps[e][i].status == PointStatus::kPass &&
          out.by_eps[e + 1][i].status != PointStatus::kPass)
        out.nesting_violations.push_back({i, eps_schedule[e], eps_schedule[e + 1]});
  return out;
}

ShadowingCertificate transport_certificate(const FlowSystem& sys,
                                           const ShadowingCertificate& cert,
                                           const PseudoOrbit& chain, const PseudoOrbit& F) {
  const double r = chain.sum(chain.high());
  if (r == 0.0) return cert;
  ShadowingCertificate out;
  out.y = sys.evolve(cert.y, cert.h(r));
  out.h = shift_reparam(cert.h, r);
  out.grid = {F.span_begin(), std::max(F.span_end(), cert.grid.end - r), cert.grid.step};
  out.achieved_sup =
      check_certificate(sys, F, std::numeric_limits<double>::infinity(), out).achieved_sup;
  return out;
}

}  // namespace shadowlab
