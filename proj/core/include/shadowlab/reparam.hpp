#pragma once

#include <utility>
#include <vector>

namespace shadowlab {

/// Strictly increasing piecewise-linear surjection h: R -> R with h(0) = 0.
/// Anchors are (t, h(t)) pairs; beyond the first and last anchor h continues
/// with the given positive tail slopes.
class Reparam {
 public:
  using Anchor = std::pair<double, double>;

  /// Throws std::invalid_argument unless the anchors contain (0, 0), are
  /// strictly increasing in both coordinates, and both tail slopes are > 0.
  Reparam(std::vector<Anchor> anchors, double left_slope, double right_slope);

  static Reparam identity() { return Reparam({{0.0, 0.0}}, 1.0, 1.0); }
  static Reparam linear(double slope) { return Reparam({{0.0, 0.0}}, slope, slope); }

  double operator()(double t) const;
  double inverse(double u) const;

  const std::vector<Anchor>& anchors() const { return anchors_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  /// Left tail, each segment, right tail.
  std::vector<double> slopes() const;

 private:
  std::vector<Anchor> anchors_;
  double left_slope_;
  double right_slope_;
};

inline double reparam_eval(const Reparam& h, double t) { return h(t); }
inline double reparam_inverse(const Reparam& h, double u) { return h.inverse(u); }

/// g(t) = h(t + c) - h(c).
Reparam shift_reparam(const Reparam& h, double c);

/// Drops anchors that lie on the line through their neighbours (except the
/// mandatory origin anchor).
Reparam simplify(const Reparam& h, double rel_tol = 1e-13);

}  // namespace shadowlab
