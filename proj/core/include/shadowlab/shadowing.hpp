#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shadowlab/flow.hpp"
#include "shadowlab/point.hpp"
#include "shadowlab/pseudo_orbit.hpp"
#include "shadowlab/reparam.hpp"

namespace shadowlab {

/// Uniform sample grid start, start + step, ..., end (end always included).
struct TimeGrid {
  double start = 0.0;
  double end = 0.0;
  double step = 0.1;
};

struct ShadowingCertificate {
  Point y;
  Reparam h = Reparam::identity();
  double achieved_sup = 0.0;
  TimeGrid grid;
};

class GridTooCoarse : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReplayResult {
  bool ok = false;
  double achieved_sup = 0.0;
  double worst_time = 0.0;
};

/// Recomputes sup_t d(x_0 * t, phi_{h(t)}(y)) on the certificate grid, plus
/// the left limits at every jump of the trace. Throws GridTooCoarse if the
/// grid misses part of the window or its step exceeds max_step.
ReplayResult check_certificate(const FlowSystem& sys, const PseudoOrbit& P, double eps,
                               const ShadowingCertificate& cert,
                               std::optional<double> max_step = std::nullopt);

struct SearchConfig {
  std::optional<double> dt;            // default min(0.1, eps / (4 speed))
  std::optional<double> grid_spacing;  // default eps / 5
  double band = 5.0;                   // max |h(t) - t| explored, in time units
  std::size_t max_candidates = 20000;
  std::size_t max_cells = 50'000'000;  // per candidate
  unsigned threads = 0;                // 0: SHADOWLAB_THREADS or hardware
  /// Search every candidate and keep the smallest sup (ties: lowest index).
  /// Otherwise a certificate for the centre x_0 is returned as soon as found.
  bool best_certificate = false;
  /// A certificate found earlier (e.g. at a smaller eps); used as is if it
  /// replays at the requested eps.
  std::optional<ShadowingCertificate> seed_certificate;
  /// Explicit candidate list, overriding the ball grid.
  std::optional<std::vector<Point>> candidates;
};

enum class VerdictTag { kShadowed, kNotShadowedAtResolution, kUnknown };
std::string to_string(VerdictTag tag);

struct SearchLog {
  double eps = 0.0;
  double eps_lo = 0.0;  // threshold used to build certificates
  double eps_hi = 0.0;  // threshold below which no path means falsified
  double dt = 0.0;
  double grid_spacing = 0.0;
  double band = 0.0;
  double horizon_begin = 0.0;
  double horizon_end = 0.0;
  bool forward_only = false;
  std::size_t candidates = 0;
  std::size_t candidates_with_path = 0;
  std::size_t candidates_certified = 0;
  std::size_t candidates_over_budget = 0;
  std::size_t cells_evaluated = 0;
  std::size_t best_candidate = 0;
};

struct Verdict {
  VerdictTag tag = VerdictTag::kUnknown;
  std::optional<ShadowingCertificate> certificate;
  SearchLog log;
  std::string reason;

  bool shadowed() const { return tag == VerdictTag::kShadowed; }
};

Verdict decide_shadowing(const FlowSystem& sys, const PseudoOrbit& P, double eps,
                         const SearchConfig& cfg = {});

/// Same search with orbit times restricted to [0, horizon]; P must start at
/// index 0.
Verdict decide_forward_shadowing(const FlowSystem& sys, const PseudoOrbit& F, double eps,
                                 const SearchConfig& cfg = {});

// ---- the discrete matching problem, exposed for oracles and diagnostics

/// Samples of the trace of P (rows). Row k holds x_0 * row_time[k]; rows at
/// jump times also hold the left limit of the trace. row_time[k0] = 0.
struct TraceSamples {
  std::vector<double> row_time;
  std::vector<std::vector<Point>> rows;
  long k0 = 0;
};

/// Samples phi_{col_time[l]}(y) of one candidate (columns), col_time[l0] = 0.
struct OrbitSamples {
  std::vector<double> col_time;
  std::vector<Point> cols;
  long l0 = 0;
  double band = 0.0;
};

TraceSamples sample_trace(const FlowSystem& sys, const PseudoOrbit& P, double dt);
OrbitSamples sample_orbit(const FlowSystem& sys, const TraceSamples& trace, const Point& y,
                          double dt, double band, bool forward_only);

/// Cell (k, l) lies in the band and every point of row k is within thr of
/// column l.
bool cell_free(const TraceSamples& tr, const OrbitSamples& orb, const MetricSpace& X, long k,
               long l, double thr);

struct PathResult {
  /// Matched column range of every row, if a path exists.
  std::optional<std::vector<std::pair<long, long>>> ranges;
  std::size_t cells = 0;
  bool exhausted = false;
};

/// Monotone lattice path through free cells from (k0, l0) to the last row
/// (moves (+1,0), (0,+1), (+1,+1)) and, mirrored, to the first row.
PathResult match_path(const TraceSamples& tr, const OrbitSamples& orb, const MetricSpace& X,
                      double thr, std::size_t max_cells = 50'000'000);

/// h through (row_time[k], midpoint time of the matched range of row k),
/// pinned to 0 at k0; ties are spread by less than dt / 4.
Reparam reparam_from_path(const TraceSamples& tr, const OrbitSamples& orb,
                          const std::vector<std::pair<long, long>>& ranges, double dt);

// ---- shadowable-point estimation

enum class PointStatus { kPass, kFail, kUnknown };
std::string to_string(PointStatus s);

/// Per (point, delta index, trial) certificates from an earlier eps.
using CertificateCache = std::map<std::pair<std::size_t, std::size_t>, ShadowingCertificate>;

struct PointEstimateConfig {
  std::vector<double> delta_schedule;  // strictly decreasing
  std::size_t trials = 20;             // trial 0 is adversarial
  double t_min = 1.0;
  double t_max = 2.0;
  long back = 6;
  long forward = 6;
  bool adversarial = true;
  /// eps used to size adversarial runs; defaults to the requested eps.
  std::optional<double> adversarial_eps;
  long adversarial_back = 4;
  long adversarial_max_steps = 2000;
  long adversarial_extra_steps = 4;
  double adversarial_stall_factor = 4.0;
  bool forward_only = false;
  SearchConfig search;
};

struct TrialRecord {
  double delta = 0.0;
  std::size_t trial = 0;
  VerdictTag tag = VerdictTag::kUnknown;
};

struct PointEstimate {
  PointStatus status = PointStatus::kUnknown;
  double delta = 0.0;  // passing delta, or the smallest delta tried
  /// PASS: the first trial at the passing delta, with its certificate.
  /// Otherwise the failing trial (a falsified one if any).
  std::optional<PseudoOrbit> witness;
  std::optional<Verdict> witness_verdict;
  std::vector<TrialRecord> trials;
};

/// For each delta (largest first) runs the trials through p and stops at the
/// first delta where all of them are shadowed.
PointEstimate estimate_shadowable_point(const FlowSystem& sys, const Point& p, double eps,
                                        const PointEstimateConfig& cfg, std::uint64_t seed,
                                        CertificateCache* cache = nullptr);

struct NestingViolation {
  std::size_t sample = 0;
  double eps_small = 0.0;
  double eps_large = 0.0;
};

struct SetEstimate {
  std::vector<Point> samples;
  std::vector<double> eps;                     // ascending
  std::vector<std::vector<PointEstimate>> by_eps;  // [eps index][sample]
  std::vector<NestingViolation> nesting_violations;

  double pass_fraction(std::size_t eps_index) const;
};

/// Runs estimate_shadowable_point over `samples` for every eps (sorted
/// ascending). Trials do not depend on eps, and certificates found at a
/// smaller eps are reused, so pass labels nest.
SetEstimate estimate_shadowable_set(const FlowSystem& sys, const std::vector<Point>& samples,
                                    std::vector<double> eps_schedule,
                                    const PointEstimateConfig& cfg, std::uint64_t seed);

/// Certificate for F from a certificate of prepend_chain(chain, F):
/// (phi_{h(r)}(y), h(. + r) - h(r)) with r the total chain time.
ShadowingCertificate transport_certificate(const FlowSystem& sys,
                                           const ShadowingCertificate& cert,
                                           const PseudoOrbit& chain, const PseudoOrbit& F);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0: from the
/// SHADOWLAB_THREADS environment variable, else hardware concurrency).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);
unsigned default_threads();

}  // namespace shadowlab
