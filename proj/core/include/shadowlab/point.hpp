#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>

namespace shadowlab {

/// Fixed-capacity coordinate tuple. Every model in the library lives in a
/// chart of dimension at most kMaxDim; the point stores its own dimension so
/// spaces can reject mismatched inputs.
class Point {
 public:
  static constexpr std::size_t kMaxDim = 4;

  Point() = default;
  Point(std::initializer_list<double> coords) {
    assert(coords.size() <= kMaxDim);
    for (double c : coords) v_[n_++] = c;
  }
  explicit Point(std::span<const double> coords) {
    assert(coords.size() <= kMaxDim);
    for (double c : coords) v_[n_++] = c;
  }
  static Point zeros(std::size_t dim) {
    Point p;
    p.n_ = static_cast<std::uint8_t>(dim);
    return p;
  }

  std::size_t dim() const { return n_; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  std::span<const double> coords() const { return {v_.data(), n_}; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t i = 0; i < a.n_; ++i)
      if (a.v_[i] != b.v_[i]) return false;
    return true;
  }

  std::string to_string() const;

 private:
  std::array<double, kMaxDim> v_{};
  std::uint8_t n_ = 0;
};

/// All randomness is explicit: callers pass an engine seeded from the run seed.
using Rng = std::mt19937_64;

/// Derives an independent stream from a base seed and a tuple of indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace shadowlab
