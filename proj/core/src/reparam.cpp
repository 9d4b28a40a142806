#include "shadowlab/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shadowlab {

Reparam::Reparam(std::vector<Anchor> anchors, double left_slope, double right_slope)
    : anchors_(std::move(anchors)), left_slope_(left_slope), right_slope_(right_slope) {
  if (!(left_slope_ > 0.0) || !(right_slope_ > 0.0))
    throw std::invalid_argument("Reparam: tail slopes must be positive");
  bool has_origin = false;
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    if (anchors_[i].first == 0.0) {
      if (anchors_[i].second != 0.0) throw std::invalid_argument("Reparam: h(0) != 0");
      has_origin = true;
    }
    if (i > 0 && !(anchors_[i].first > anchors_[i - 1].first &&
                   anchors_[i].second > anchors_[i - 1].second))
      throw std::invalid_argument("Reparam: anchors not strictly increasing");
  }
  if (!has_origin) throw std::invalid_argument("Reparam: missing anchor at t = 0");
}

double Reparam::operator()(double t) const {
  const auto& a = anchors_;
  if (t <= a.front().first) return a.front().second + left_slope_ * (t - a.front().first);
  if (t >= a.back().first) return a.back().second + right_slope_ * (t - a.back().first);
  auto it = std::upper_bound(a.begin(), a.end(), t,
                             [](double v, const Anchor& x) { return v < x.first; });
  const Anchor& r = *it;
  const Anchor& l = *(it - 1);
  const double w = (t - l.first) / (r.first - l.first);
  return l.second + w * (r.second - l.second);
}

double Reparam::inverse(double u) const {
  const auto& a = anchors_;
  if (u <= a.front().second) return a.front().first + (u - a.front().second) / left_slope_;
  if (u >= a.back().second) return a.back().first + (u - a.back().second) / right_slope_;
  auto it = std::upper_bound(a.begin(), a.end(), u,
                             [](double v, const Anchor& x) { return v < x.second; });
  const Anchor& r = *it;
  const Anchor& l = *(it - 1);
  const double w = (u - l.second) / (r.second - l.second);
  return l.first + w * (r.first - l.first);
}

std::vector<double> Reparam::slopes() const {
  std::vector<double> s{left_slope_};
  for (std::size_t i = 1; i < anchors_.size(); ++i)
    s.push_back((anchors_[i].second - anchors_[i - 1].second) /
                (anchors_[i].first - anchors_[i - 1].first));
  s.push_back(right_slope_);
  return s;
}

Reparam shift_reparam(const Reparam& h, double c) {
  const double hc = h(c);
  std::vector<Reparam::Anchor> shifted;
  bool inserted = false;
  for (const auto& [t, v] : h.anchors()) {
    if (!inserted && t >= c) {
      if (t != c) shifted.emplace_back(0.0, 0.0);
      inserted = true;
    }
    shifted.emplace_back(t == c ? 0.0 : t - c, t == c ? 0.0 : v - hc);
  }
  if (!inserted) shifted.emplace_back(0.0, 0.0);
  return simplify(Reparam(std::move(shifted), h.left_slope(), h.right_slope()));
}

Reparam simplify(const Reparam& h, double rel_tol) {
  const auto& a = h.anchors();
  std::vector<double> sl = h.slopes();
  std::vector<Reparam::Anchor> kept;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double in = sl[i], out = sl[i + 1];
    bool collinear = std::fabs(in - out) <= rel_tol * std::max(std::fabs(in), std::fabs(out));
    if (a[i].first == 0.0 || !collinear) kept.push_back(a[i]);
  }
  return Reparam(std::move(kept), h.left_slope(), h.right_slope());
}

}  // namespace shadowlab
