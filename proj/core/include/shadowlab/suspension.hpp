#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/flow.hpp"
#include "shadowlab/shadowing.hpp"
#include "shadowlab/space.hpp"

namespace shadowlab {

/// A homeomorphism f of a compact space of diameter 1 together with a roof
/// function. Roofs default to 1.
class BaseSystem {
 public:
  virtual ~BaseSystem() = default;
  virtual std::string name() const = 0;
  virtual const MetricSpace& space() const = 0;
  virtual Point map(const Point& x) const = 0;
  virtual Point inverse(const Point& x) const = 0;
  virtual double roof(const Point& x) const {
    (void)x;
    return 1.0;
  }
  virtual double roof_min() const { return 1.0; }
  virtual double roof_max() const { return 1.0; }
  /// Lipschitz bound shared by f and its inverse.
  virtual double lipschitz() const { return 1.0; }
  virtual std::optional<Point> adversarial_direction(const Point& x, const Point& anchor) const {
    (void)x;
    (void)anchor;
    return std::nullopt;
  }
};

/// The same map over a different roof.
std::shared_ptr<BaseSystem> with_roof(std::shared_ptr<const BaseSystem> base,
                                      std::function<double(const Point&)> roof, double lo,
                                      double hi);

/// Checks f(f^-1(x)) = x, the roof bounds and diam(X) = 1 on samples; throws
/// std::invalid_argument on the first failure.
void validate_base(const BaseSystem& base, std::size_t samples = 200, std::uint64_t seed = 1);

/// (x, s) with 0 <= s < roof(x).
struct SuspensionPoint {
  Point x;
  double s = 0.0;
};

SuspensionPoint normalize(const BaseSystem& base, Point x, double s);
SuspensionPoint suspension_flow(const BaseSystem& base, const SuspensionPoint& p, double t);

/// Bowen-Walters distance on the unit-roof suspension: the cheapest of the
/// direct path (vertical plus one horizontal move), the path up through the
/// roof and the path down through the base.
double bw_distance(const BaseSystem& base, const SuspensionPoint& p, const SuspensionPoint& q);

/// Brute-force minimum over chains of at most `moves` horizontal moves at
/// heights on a grid of `levels` values per fiber crossing; used to validate
/// bw_distance.
double bw_chain_distance(const BaseSystem& base, const SuspensionPoint& p,
                         const SuspensionPoint& q, int levels = 64);

/// (x, t) -> (x, t / roof(x)) and back.
SuspensionPoint conjugacy_to_unit_roof(const BaseSystem& base, const SuspensionPoint& p);
SuspensionPoint conjugacy_from_unit_roof(const BaseSystem& base, const SuspensionPoint& p);

/// X^{roof, f} as a metric space. Chart points are (base coordinates..., s);
/// the metric is the Bowen-Walters metric pulled back through the unit-roof
/// conjugacy.
class SuspensionSpace final : public MetricSpace {
 public:
  explicit SuspensionSpace(std::shared_ptr<const BaseSystem> base);
  std::string name() const override;
  std::size_t dim() const override { return base_->space().dim() + 1; }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override;
  ChartBox chart() const override;
  bool chart_local() const override { return false; }
  Point wrap(const Point& p) const override;
  bool contains(const Point& p) const override;
  Point project(const Point& p) const override;
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const override;
  std::vector<Point> ball_grid(const Point& c, double r, double spacing) const override;
  std::optional<Point> sample_in_ball(const Point& c, double r, Rng& rng) const override;

  SuspensionPoint decode(const Point& p) const;
  Point encode(const SuspensionPoint& p) const;
  const BaseSystem& base() const { return *base_; }

 private:
  std::shared_ptr<const BaseSystem> base_;
};

class SuspensionFlow final : public FlowSystem {
 public:
  explicit SuspensionFlow(std::shared_ptr<const BaseSystem> base);
  std::string name() const override;
  const MetricSpace& space() const override { return space_; }
  FlowKind kind() const override { return FlowKind::kSuspensionDerived; }
  double group_tolerance() const override { return 1e-12; }
  double speed_bound() const override;
  double lipschitz(double span) const override;
  std::optional<Point> adversarial_direction(const Point& x, const Point& anchor) const override;
  std::vector<Point> orbit(const Point& y, double t0, double dt, std::size_t n) const override;

  const SuspensionSpace& suspension_space() const { return space_; }
  const BaseSystem& base() const { return space_.base(); }

 protected:
  Point flow_impl(const Point& x, double t) const override;

 private:
  SuspensionSpace space_;
};

// ---- discrete shadowing for the base map

struct DiscreteConfig {
  std::vector<double> delta_schedule;  // strictly decreasing
  std::size_t trials = 20;             // trial 0 is adversarial
  long back = 20;
  long forward = 20;
  bool adversarial = true;
  long adversarial_back = 4;
  long adversarial_max_steps = 600;
  long adversarial_extra_steps = 4;
  std::optional<double> adversarial_eps;
  std::optional<double> grid_spacing;  // default eps / 5
};

struct DiscreteVerdict {
  VerdictTag tag = VerdictTag::kUnknown;
  Point q;                 // best candidate
  double achieved_sup = 0.0;
  double eps_hi = 0.0;
  std::size_t candidates = 0;
};

/// Indexed points x_low .. x_high with x_0 the anchor.
struct DiscretePseudoOrbit {
  long low = 0;
  std::vector<Point> x;
};

DiscreteVerdict decide_discrete_shadowing(const BaseSystem& base, const DiscretePseudoOrbit& P,
                                          double eps, std::optional<double> grid_spacing = {});

struct DiscreteEstimate {
  PointStatus status = PointStatus::kUnknown;
  double delta = 0.0;
  std::optional<DiscretePseudoOrbit> witness;
  std::optional<DiscreteVerdict> witness_verdict;
};

DiscreteEstimate discrete_shadowable_estimate(const BaseSystem& base, const Point& p, double eps,
                                              const DiscreteConfig& cfg, std::uint64_t seed);

// ---- correspondence between suspension and base verdicts

struct CorrespondenceConfig {
  std::vector<double> heights{0.25, 0.5, 0.75};
  std::size_t fiber_checks = 4;  // fibers evaluated at every height
  PointEstimateConfig flow;
  DiscreteConfig discrete;
};

struct CorrespondenceRow {
  Point x;
  double s = 0.0;
  PointStatus suspension = PointStatus::kUnknown;
  PointStatus base = PointStatus::kUnknown;
};

struct CorrespondenceReport {
  std::vector<CorrespondenceRow> rows;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t pass_fail_conflicts = 0;  // PASS on one side, FAIL on the other
  std::size_t fibers_checked = 0;
  std::size_t fiber_violations = 0;
  std::vector<std::vector<std::size_t>> matrix;  // [suspension][base] counts
};

CorrespondenceReport suspension_correspondence_check(std::shared_ptr<const BaseSystem> base,
                                                     const std::vector<Point>& base_samples,
                                                     double eps,
                                                     const CorrespondenceConfig& cfg,
                                                     std::uint64_t seed);

}  // namespace shadowlab
