#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/flow.hpp"
#include "shadowlab/point.hpp"

namespace shadowlab {

enum class PseudoOrbitKind { kBiInfinite, kForward, kChain };

/// What star() does for times outside the stored window.
enum class WindowPolicy { kTruncate, kExtendByTrueOrbit };

struct Entry {
  Point x;
  double t = 1.0;
};

/// A finite window (x_i, t_i), low <= i <= high, of a pseudo-orbit, with
/// low <= 0 <= high. Durations t_i for i < high are the hops between stored
/// points; t_high is the length of the final segment of the trace.
class PseudoOrbit {
 public:
  PseudoOrbit(long low, std::vector<Entry> entries,
              PseudoOrbitKind kind = PseudoOrbitKind::kBiInfinite,
              WindowPolicy policy = WindowPolicy::kExtendByTrueOrbit);

  long low() const { return low_; }
  long high() const { return low_ + static_cast<long>(entries_.size()) - 1; }
  std::size_t size() const { return entries_.size(); }
  PseudoOrbitKind kind() const { return kind_; }
  WindowPolicy policy() const { return policy_; }

  const Entry& at(long i) const { return entries_.at(static_cast<std::size_t>(i - low_)); }
  const Point& point(long i) const { return at(i).x; }
  double duration(long i) const { return at(i).t; }
  const std::vector<Entry>& entries() const { return entries_; }

  /// s_i for low <= i <= high + 1.
  double sum(long i) const { return sums_.at(static_cast<std::size_t>(i - low_)); }
  double span_begin() const { return sums_.front(); }
  double span_end() const { return sums_.back(); }
  /// Index i with s_i <= t < s_{i+1}, clamped to the window.
  long segment(double t) const;

 private:
  long low_;
  std::vector<Entry> entries_;
  std::vector<double> sums_;
  PseudoOrbitKind kind_;
  WindowPolicy policy_;
};

/// The three-case partial sums s_i of a duration sequence whose element at
/// position `zero` carries index 0; returns s_i for every position plus one.
std::vector<double> partial_sums(const std::vector<double>& durations, long zero);

class OutsideWindow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// x_0 * t = phi_{t - s_i}(x_i) for s_i <= t < s_{i+1}.
Point star(const FlowSystem& sys, const PseudoOrbit& P, double t);

struct Violation {
  long index = 0;
  double jump = 0.0;           // d(phi_{t_i}(x_i), x_{i+1}), NaN if n/a
  double duration = 0.0;
  bool jump_too_large = false;
  bool duration_too_short = false;
  bool duration_too_long = false;
};

struct ValidationReport {
  bool ok = true;
  double max_jump = 0.0;
  std::vector<double> jumps;  // jumps[i - low] for low <= i < high
  std::vector<Violation> violations;
};

/// Checks t_i >= T (and t_i <= T2 if given) and jumps <= delta for
/// low <= i < high. Jumps are compared against delta plus the flow's group
/// tolerance.
ValidationReport validate(const FlowSystem& sys, const PseudoOrbit& P, double delta,
                          double T, std::optional<double> T2 = std::nullopt);

enum class NoiseLaw { kUniformBall, kDirectional };

struct NoiseConfig {
  double delta = 0.0;
  double t_min = 1.0;
  double t_max = 2.0;
  long back = 10;     // entries with negative index
  long forward = 10;  // entries with positive index
  NoiseLaw law = NoiseLaw::kUniformBall;
  std::optional<Point> direction;  // chart direction for kDirectional
};

class GeneratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pseudo-orbit through p with durations uniform in [t_min, t_max] and jumps
/// drawn from the noise law. Valid at (delta, t_min, t_max) by construction.
PseudoOrbit generate_noisy(const FlowSystem& sys, const Point& p, const NoiseConfig& cfg,
                           std::uint64_t seed);

struct AdversarialConfig {
  double delta = 0.0;
  double eps = 0.1;           // separation target is 2 eps from whole orbits
  double duration = 1.0;
  long back = 4;
  long max_steps = 4000;
  long extra_steps = 8;
  double stall_factor = 4.0;  // give up after stall_factor * eps / delta idle steps
};

/// Directional drift: every forward jump is a kick of size ~delta along the
/// model's adversarial direction (or a seeded fixed direction). Stops a few
/// steps after the trace has, for every point of a coarse grid on B[p, eps],
/// visited a place 2 eps away from that point's whole orbit, or after
/// stall_factor * eps / delta steps without a new separation.
PseudoOrbit generate_adversarial(const FlowSystem& sys, const Point& p,
                                 const AdversarialConfig& cfg, std::uint64_t seed);

/// Kick y by at most `delta` (metric) along chart direction dir.
Point kick(const MetricSpace& X, const Point& y, const Point& dir, double delta);

// ---- transformations of pseudo-orbits

/// Splits every duration t_n = m_n a + r_n (a <= r_n < 2a) into m_n steps of
/// length a plus one of length r_n along the true orbit of x_n.
PseudoOrbit refine_to_bounded_steps(const FlowSystem& sys, const PseudoOrbit& P, double a);

/// r -> bound on d(phi_t x, phi_t y) when d(x, y) <= r, uniformly over the
/// relevant time box.
using ContinuityModulus = std::function<double(double)>;

struct CoarsenResult {
  PseudoOrbit orbit;
  double jump_bound;  // m * modulus(beta), must be < delta
};

class ModulusBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Groups m consecutive entries of a (beta, 1, 2)-pseudo-orbit:
/// (x_{im}, sum_{j<m} t_{j+im}). Throws ModulusBoundError if
/// m * modulus(beta) >= delta.
CoarsenResult coarsen_steps(const FlowSystem& sys, const PseudoOrbit& P, long m,
                            double beta, double delta, const ContinuityModulus& modulus);

struct SpliceResult {
  PseudoOrbit orbit;
  double defect_before;  // new jump at index -1
  double defect_after;   // new jump at index 0
  double bound_before;   // old jump at -1 + d(x_0, p)
  double bound_after;    // old jump at 0 + modulus(d(x_0, p))
};

/// Replaces entry 0 by (p, t_0).
SpliceResult splice_through_point(const FlowSystem& sys, const PseudoOrbit& P, const Point& p);

struct PrependResult {
  PseudoOrbit orbit;
  double offset;  // r_hat_m, the time at which the suffix starts
};

/// Concatenates a chain (y_j, s_j)_{j=0}^m ending at q with a forward
/// pseudo-orbit through q. Throws std::invalid_argument on endpoint mismatch.
PrependResult prepend_chain(const FlowSystem& sys, const PseudoOrbit& chain,
                            const PseudoOrbit& forward, double tol = 1e-9);

/// Repeats a loop chain (x_0 = x_k) `periods` times on each side of index 0.
PseudoOrbit periodic_extension(const FlowSystem& sys, const PseudoOrbit& loop, long periods,
                               double tol = 1e-9);

// ---- serialization

/// RFC-4180 CSV: index,t,x0,x1,... with 17 significant digits.
void write_csv(std::ostream& out, const PseudoOrbit& P);
PseudoOrbit read_csv(std::istream& in);

std::string format_double(double v);

}  // namespace shadowlab
