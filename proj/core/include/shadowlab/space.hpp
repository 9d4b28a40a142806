#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shadowlab/point.hpp"

namespace shadowlab {

/// Axis-aligned chart region that contains the sampled part of a space.
struct ChartBox {
  Point lo;
  Point hi;
  std::array<bool, Point::kMaxDim> periodic{};
};

/// A compact metric space modelled as a bounded chart region with a
/// deterministic quasi-uniform sampler. Points are chart coordinates; the
/// metric need not be the chart's Euclidean one.
class MetricSpace {
 public:
  virtual ~MetricSpace() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double distance(const Point& p, const Point& q) const = 0;
  virtual double diameter() const = 0;
  virtual ChartBox chart() const = 0;

  /// Applies periodic identifications without moving the point otherwise.
  virtual Point wrap(const Point& p) const;
  /// Membership of an already wrapped chart point.
  virtual bool contains(const Point& p) const;
  /// Nearest member of the space to a chart point.
  virtual Point project(const Point& p) const;
  /// Half-width of a chart cube that encloses the metric ball of radius r.
  virtual double chart_radius(double r) const { return r; }
  /// Whether B(c, r) lies in the chart cube of half-width chart_radius(r)
  /// around c (modulo periodic axes). False for glued spaces.
  virtual bool chart_local() const { return true; }

  /// n quasi-uniform points (Kronecker sequence with a seeded shift).
  virtual std::vector<Point> sample(std::size_t n, std::uint64_t seed) const;
  /// Quasi-uniform members of the chart cell [lo, hi]; may be empty.
  virtual std::vector<Point> sample_in_box(const Point& lo, const Point& hi,
                                           std::size_t n,
                                           std::uint64_t seed) const;
  /// Uniform point of the closed metric ball B[c, r] by rejection sampling.
  virtual std::optional<Point> sample_in_ball(const Point& c, double r,
                                              Rng& rng) const;
  /// Lattice of spacing `spacing` around c, projected into the space and
  /// restricted to B[c, r]. The centre is always the first entry.
  virtual std::vector<Point> ball_grid(const Point& c, double r,
                                       double spacing) const;
  /// p moved by a chart displacement, then projected into the space.
  Point displace(const Point& p, std::span<const double> delta) const;
};

/// Shifted R_d (generalised golden ratio) sequence in [0,1)^dim.
std::vector<std::array<double, Point::kMaxDim>> kronecker_unit(std::size_t n,
                                                              std::size_t dim,
                                                              std::uint64_t seed);

/// S^1 parametrised by [0,1) with the arc-length metric min(|a-b|, 1-|a-b|).
class CircleSpace final : public MetricSpace {
 public:
  std::string name() const override { return "S1"; }
  std::size_t dim() const override { return 1; }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override { return 0.5; }
  ChartBox chart() const override;
};

/// T^2 = S^1 x S^1 with the Euclidean combination of the arc metrics.
class TorusSpace final : public MetricSpace {
 public:
  std::string name() const override { return "T2"; }
  std::size_t dim() const override { return 2; }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override;
  ChartBox chart() const override;
};

/// Euclidean box in R^d.
class BoxSpace final : public MetricSpace {
 public:
  BoxSpace(Point lo, Point hi);
  std::string name() const override { return "box"; }
  std::size_t dim() const override { return lo_.dim(); }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override;
  ChartBox chart() const override { return {lo_, hi_, {}}; }

 private:
  Point lo_, hi_;
};

/// X = C_n u [1, 2] where C_n is the level-n ternary Cantor approximation
/// (2^n closed intervals of length 3^-n). The metric is |x - y| / 2 so that
/// diam(X) = 1.
class CantorIntervalSpace final : public MetricSpace {
 public:
  explicit CantorIntervalSpace(int level);
  std::string name() const override;
  std::size_t dim() const override { return 1; }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override { return 1.0; }
  ChartBox chart() const override { return {Point{0.0}, Point{2.0}, {}}; }
  bool contains(const Point& p) const override;
  Point project(const Point& p) const override;
  double chart_radius(double r) const override { return 2.0 * r; }
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const override;
  std::vector<Point> sample_in_box(const Point& lo, const Point& hi,
                                   std::size_t n,
                                   std::uint64_t seed) const override;

  int level() const { return level_; }
  double gap() const;  // 3^-n, the smallest gap between Cantor intervals
  /// Index of the C_n interval containing x, or -1 (points of [1,2] and the
  /// last Cantor interval touching 1 share the component index 2^n - 1).
  long component(double x) const;
  /// Sample split: half of the points on C_n, half on [1, 2].
  std::vector<Point> sample_cantor(std::size_t n, std::uint64_t seed) const;
  std::vector<Point> sample_interval(std::size_t n, std::uint64_t seed) const;

 private:
  int level_;
  std::vector<double> left_;  // left endpoints of the C_n intervals
};

/// Finite subset of R with the metric scale * |a - b|.
class FiniteSpace final : public MetricSpace {
 public:
  FiniteSpace(std::vector<double> points, double scale = 1.0);
  std::string name() const override { return "finite"; }
  std::size_t dim() const override { return 1; }
  double distance(const Point& p, const Point& q) const override;
  double diameter() const override;
  ChartBox chart() const override;
  bool contains(const Point& p) const override;
  Point project(const Point& p) const override;
  double chart_radius(double r) const override { return r / scale_; }
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const override;
  std::vector<Point> sample_in_box(const Point& lo, const Point& hi,
                                   std::size_t n,
                                   std::uint64_t seed) const override;
  std::optional<Point> sample_in_ball(const Point& c, double r,
                                      Rng& rng) const override;
  const std::vector<double>& points() const { return pts_; }

 private:
  std::vector<double> pts_;
  double scale_;
};

/// Arc distance on [0,1) with period 1.
double circle_arc(double a, double b);
/// Reduces x into [0, 1).
double wrap_unit(double x);

}  // namespace shadowlab
