#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowlab/point.hpp"
#include "shadowlab/space.hpp"

namespace shadowlab {

enum class FlowKind { kAnalytic, kIntegrated, kSuspensionDerived };

std::string to_string(FlowKind kind);

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HorizonExceeded : public FlowError {
 public:
  using FlowError::FlowError;
};

class IntegrationFailure : public FlowError {
 public:
  using FlowError::FlowError;
};

/// A continuous flow phi on a compact metric space: evolve(x, t) is the
/// time-t map. Implementations are immutable and safe to share across
/// threads.
class FlowSystem {
 public:
  virtual ~FlowSystem() = default;

  virtual std::string name() const = 0;
  virtual const MetricSpace& space() const = 0;
  virtual FlowKind kind() const = 0;

  /// Allowed deviation from the group law; zero for exact models.
  virtual double group_tolerance() const { return 1e-12; }
  /// Largest |t| accepted by evolve().
  virtual double horizon() const { return 1e6; }
  /// Upper bound on the metric speed of orbits, used for discretisation slack.
  virtual double speed_bound() const = 0;
  /// Lipschitz bound for phi_t over |t| <= span (the continuity modulus).
  virtual double lipschitz(double span) const = 0;
  /// False for forward semiflows (evolve rejects t < 0).
  virtual bool invertible() const { return true; }
  /// Preferred chart direction for adversarial pseudo-orbit kicks at x, for a
  /// pseudo-orbit through `anchor`.
  virtual std::optional<Point> adversarial_direction(const Point& x,
                                                     const Point& anchor) const {
    (void)x;
    (void)anchor;
    return std::nullopt;
  }

  /// phi_t(x). Throws HorizonExceeded or IntegrationFailure; never clamps.
  Point evolve(const Point& x, double t) const;
  /// Samples phi_{t0 + k dt}(y) for k = 0..n-1.
  virtual std::vector<Point> orbit(const Point& y, double t0, double dt,
                                   std::size_t n) const;

 protected:
  virtual Point flow_impl(const Point& x, double t) const = 0;
};

inline Point evaluate_flow(const FlowSystem& sys, const Point& x, double t) {
  return sys.evolve(x, t);
}

/// d(phi_t(phi_s(x)), phi_{s+t}(x)).
double group_defect(const FlowSystem& sys, const Point& x, double s, double t);

/// Empirical Lipschitz constant of phi_t over |t| <= span on sampled pairs,
/// scaled by a 1.5 safety factor.
double empirical_lipschitz(const FlowSystem& sys, double span, std::size_t samples,
                           std::uint64_t seed);

/// Adaptive Dormand-Prince 5(4) integration of x' = F(x) over time t
/// (negative t integrates backwards).
struct IntegratorOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-11;
  double min_step = 1e-12;
  double max_step = 0.05;
  std::size_t max_steps = 5'000'000;
};

using VectorField = std::function<void(const double* x, double* dx)>;

Point integrate_dopri(const VectorField& field, const Point& x0, double t,
                      const IntegratorOptions& opts);

}  // namespace shadowlab
