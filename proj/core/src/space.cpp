#include "shadowlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shadowlab {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double circle_arc(double a, double b) {
  double d = std::fabs(wrap_unit(a) - wrap_unit(b));
  return std::min(d, 1.0 - d);
}

std::vector<std::array<double, Point::kMaxDim>> kronecker_unit(std::size_t n,
                                                              std::size_t dim,
                                                              std::uint64_t seed) {
  // g is the unique positive root of x^(d+1) = x + 1.
  double g = 2.0;
  for (int it = 0; it < 64; ++it) {
    double f = std::pow(g, static_cast<double>(dim + 1)) - g - 1.0;
    double df = static_cast<double>(dim + 1) * std::pow(g, static_cast<double>(dim)) - 1.0;
    g -= f / df;
  }
  std::array<double, Point::kMaxDim> alpha{}, shift{};
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t k = 0; k < dim; ++k) {
    alpha[k] = wrap_unit(std::pow(1.0 / g, static_cast<double>(k + 1)));
    shift[k] = u01(rng);
  }
  std::vector<std::array<double, Point::kMaxDim>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < dim; ++k)
      out[i][k] = wrap_unit(shift[k] + static_cast<double>(i + 1) * alpha[k]);
  return out;
}

Point MetricSpace::wrap(const Point& p) const {
  ChartBox box = chart();
  Point q = p;
  for (std::size_t k = 0; k < p.dim(); ++k) {
    if (!box.periodic[k]) continue;
    double span = box.hi[k] - box.lo[k];
    q[k] = box.lo[k] + span * wrap_unit((p[k] - box.lo[k]) / span);
  }
  return q;
}

bool MetricSpace::contains(const Point& p) const {
  if (p.dim() != dim()) return false;
  ChartBox box = chart();
  for (std::size_t k = 0; k < p.dim(); ++k) {
    if (box.periodic[k]) continue;
    if (p[k] < box.lo[k] || p[k] > box.hi[k]) return false;
  }
  return true;
}

Point MetricSpace::project(const Point& p) const {
  ChartBox box = chart();
  Point q = wrap(p);
  for (std::size_t k = 0; k < q.dim(); ++k)
    if (!box.periodic[k]) q[k] = std::clamp(q[k], box.lo[k], box.hi[k]);
  return q;
}

std::vector<Point> MetricSpace::sample(std::size_t n, std::uint64_t seed) const {
  ChartBox box = chart();
  std::vector<Point> out;
  out.reserve(n);
  for (const auto& u : kronecker_unit(n, dim(), seed)) {
    Point p = Point::zeros(dim());
    for (std::size_t k = 0; k < dim(); ++k) p[k] = box.lo[k] + u[k] * (box.hi[k] - box.lo[k]);
    out.push_back(project(p));
  }
  return out;
}

std::vector<Point> MetricSpace::sample_in_box(const Point& lo, const Point& hi,
                                              std::size_t n,
                                              std::uint64_t seed) const {
  std::vector<Point> out;
  for (const auto& u : kronecker_unit(n, dim(), seed)) {
    Point p = Point::zeros(dim());
    for (std::size_t k = 0; k < dim(); ++k) p[k] = lo[k] + u[k] * (hi[k] - lo[k]);
    p = wrap(p);
    if (contains(p)) out.push_back(p);
  }
  return out;
}

std::optional<Point> MetricSpace::sample_in_ball(const Point& c, double r,
                                                 Rng& rng) const {
  if (r <= 0.0) return c;
  const double half = chart_radius(r);
  std::uniform_real_distribution<double> u(-half, half);
  for (int attempt = 0; attempt < 4000; ++attempt) {
    Point q = c;
    for (std::size_t k = 0; k < dim(); ++k) q[k] += u(rng);
    q = wrap(q);
    if (contains(q) && distance(c, q) <= r) return q;
  }
  return std::nullopt;
}

std::vector<Point> MetricSpace::ball_grid(const Point& c, double r,
                                          double spacing) const {
  std::vector<Point> out{c};
  if (spacing <= 0.0 || r <= 0.0) return out;
  const double step = chart_radius(spacing);
  const int m = static_cast<int>(std::ceil(chart_radius(r) / step - 1e-9));
  const std::size_t d = dim();
  std::array<int, Point::kMaxDim> idx{};
  for (std::size_t k = 0; k < d; ++k) idx[k] = -m;
  auto seen = [&](const Point& q) {
    for (const Point& o : out)
      if (distance(o, q) <= 1e-13) return true;
    return false;
  };
  while (true) {
    Point q = c;
    for (std::size_t k = 0; k < d; ++k) q[k] += idx[k] * step;
    q = project(q);
    if (distance(c, q) <= r * (1.0 + 1e-12) && !seen(q)) out.push_back(q);
    std::size_t k = 0;
    while (k < d && ++idx[k] > m) idx[k++] = -m;
    if (k == d) break;
  }
  return out;
}

Point MetricSpace::displace(const Point& p, std::span<const double> delta) const {
  Point q = p;
  for (std::size_t k = 0; k < q.dim() && k < delta.size(); ++k) q[k] += delta[k];
  return project(q);
}

// ---------------------------------------------------------------- circle

double CircleSpace::distance(const Point& p, const Point& q) const {
  return circle_arc(p[0], q[0]);
}

ChartBox CircleSpace::chart() const {
  ChartBox b{Point{0.0}, Point{1.0}, {}};
  b.periodic[0] = true;
  return b;
}

// ----------------------------------------------------------------- torus

double TorusSpace::distance(const Point& p, const Point& q) const {
  return std::hypot(circle_arc(p[0], q[0]), circle_arc(p[1], q[1]));
}

double TorusSpace::diameter() const { return std::sqrt(0.5); }

ChartBox TorusSpace::chart() const {
  ChartBox b{Point{0.0, 0.0}, Point{1.0, 1.0}, {}};
  b.periodic[0] = b.periodic[1] = true;
  return b;
}

// ------------------------------------------------------------------- box

BoxSpace::BoxSpace(Point lo, Point hi) : lo_(lo), hi_(hi) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("BoxSpace: dimension mismatch");
}

double BoxSpace::distance(const Point& p, const Point& q) const {
  double s = 0.0;
  for (std::size_t k = 0; k < p.dim(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
  return std::sqrt(s);
}

double BoxSpace::diameter() const { return distance(lo_, hi_); }

// ---------------------------------------------------------------- cantor

CantorIntervalSpace::CantorIntervalSpace(int level) : level_(level) {
  if (level < 0 || level > 20) throw std::invalid_argument("Cantor level must be in [0, 20]");
  left_ = {0.0};
  for (int k = 0; k < level; ++k) {
    std::vector<double> next;
    next.reserve(left_.size() * 2);
    for (double l : left_) next.push_back(l / 3.0);
    for (double l : left_) next.push_back(2.0 / 3.0 + l / 3.0);
    left_ = std::move(next);
  }
}

std::string CantorIntervalSpace::name() const {
  return "C_" + std::to_string(level_) + " u [1,2]";
}

double CantorIntervalSpace::gap() const { return std::pow(3.0, -level_); }

double CantorIntervalSpace::distance(const Point& p, const Point& q) const {
  return 0.5 * std::fabs(p[0] - q[0]);
}

long CantorIntervalSpace::component(double x) const {
  const long last = static_cast<long>(left_.size()) - 1;
  if (x >= 1.0 && x <= 2.0) return last;
  auto it = std::upper_bound(left_.begin(), left_.end(), x);
  if (it == left_.begin()) return -1;
  long j = static_cast<long>(it - left_.begin()) - 1;
  // Endpoints are exact thirds; a small slack absorbs rounding in left_.
  return x <= left_[j] + gap() * (1.0 + 1e-12) ? j : -1;
}

bool CantorIntervalSpace::contains(const Point& p) const {
  return p.dim() == 1 && component(p[0]) >= 0;
}

Point CantorIntervalSpace::project(const Point& p) const {
  double x = std::clamp(p[0], 0.0, 2.0);
  if (component(x) >= 0) return Point{x};
  auto it = std::upper_bound(left_.begin(), left_.end(), x);
  double below = *(it - 1) + gap();
  double above = it == left_.end() ? 1.0 : *it;
  return Point{(x - below) <= (above - x) ? below : above};
}

std::vector<Point> CantorIntervalSpace::sample_cantor(std::size_t n,
                                                      std::uint64_t seed) const {
  std::vector<Point> out;
  for (const auto& u : kronecker_unit(n, 2, seed)) {
    std::size_t j = std::min(left_.size() - 1,
                             static_cast<std::size_t>(u[0] * static_cast<double>(left_.size())));
    out.push_back(Point{left_[j] + u[1] * gap()});
  }
  return out;
}

std::vector<Point> CantorIntervalSpace::sample_interval(std::size_t n,
                                                        std::uint64_t seed) const {
  std::vector<Point> out;
  for (const auto& u : kronecker_unit(n, 1, seed)) out.push_back(Point{1.0 + u[0]});
  return out;
}

std::vector<Point> CantorIntervalSpace::sample(std::size_t n, std::uint64_t seed) const {
  auto c = sample_cantor((n + 1) / 2, seed);
  auto i = sample_interval(n / 2, seed ^ 0x5bd1e995ULL);
  std::vector<Point> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(k % 2 == 0 ? c[k / 2] : i[k / 2]);
  return out;
}

std::vector<Point> CantorIntervalSpace::sample_in_box(const Point& lo, const Point& hi,
                                                      std::size_t n,
                                                      std::uint64_t seed) const {
  std::vector<std::pair<double, double>> pieces;
  auto add = [&](double a, double b) {
    a = std::max(a, lo[0]);
    b = std::min(b, hi[0]);
    if (a <= b) pieces.emplace_back(a, b);
  };
  for (double l : left_) add(l, l + gap());
  add(1.0, 2.0);
  double total = 0.0;
  for (auto [a, b] : pieces) total += b - a;
  std::vector<Point> out;
  if (pieces.empty()) return out;
  if (total <= 0.0) {
    out.push_back(Point{pieces.front().first});
    return out;
  }
  for (const auto& u : kronecker_unit(n, 1, seed)) {
    double s = u[0] * total;
    for (auto [a, b] : pieces) {
      if (s <= b - a) {
        out.push_back(Point{a + s});
        break;
      }
      s -= b - a;
    }
  }
  return out;
}

// ---------------------------------------------------------------- finite

FiniteSpace::FiniteSpace(std::vector<double> points, double scale)
    : pts_(std::move(points)), scale_(scale) {
  if (pts_.empty()) throw std::invalid_argument("FiniteSpace: no points");
  std::sort(pts_.begin(), pts_.end());
}

double FiniteSpace::distance(const Point& p, const Point& q) const {
  return scale_ * std::fabs(p[0] - q[0]);
}

double FiniteSpace::diameter() const { return scale_ * (pts_.back() - pts_.front()); }

ChartBox FiniteSpace::chart() const { return {Point{pts_.front()}, Point{pts_.back()}, {}}; }

bool FiniteSpace::contains(const Point& p) const {
  return std::binary_search(pts_.begin(), pts_.end(), p[0]);
}

Point FiniteSpace::project(const Point& p) const {
  double best = pts_.front();
  for (double x : pts_)
    if (std::fabs(x - p[0]) < std::fabs(best - p[0])) best = x;
  return Point{best};
}

std::vector<Point> FiniteSpace::sample(std::size_t n, std::uint64_t) const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Point{pts_[i % pts_.size()]});
  return out;
}

std::vector<Point> FiniteSpace::sample_in_box(const Point& lo, const Point& hi,
                                              std::size_t, std::uint64_t) const {
  std::vector<Point> out;
  for (double x : pts_)
    if (x >= lo[0] && x <= hi[0]) out.push_back(Point{x});
  return out;
}

std::optional<Point> FiniteSpace::sample_in_ball(const Point& c, double r,
                                                 Rng& rng) const {
  std::vector<double> near;
  for (double x : pts_)
    if (scale_ * std::fabs(x - c[0]) <= r) near.push_back(x);
  if (near.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, near.size() - 1);
  return Point{near[pick(rng)]};
}

}  // namespace shadowlab
