#pragma once

#include <vector>

#include "shadowlab/shadowing.hpp"

namespace shadowlab::testing {

// Exhaustive reachability over the free-cell lattice, written independently
// of the interval sweep: memoized DFS from (k0, l0) to the last row and, with
// mirrored moves, to the first row.
class PathOracle {
 public:
  PathOracle(const TraceSamples& tr, const OrbitSamples& orb, const MetricSpace& X, double thr)
      : K_(static_cast<long>(tr.rows.size())), L_(static_cast<long>(orb.cols.size())) {
    free_.assign(static_cast<std::size_t>(K_ * L_), 0);
    for (long k = 0; k < K_; ++k)
      for (long l = 0; l < L_; ++l) free_[idx(k, l)] = cell_free(tr, orb, X, k, l, thr);
    k0_ = tr.k0;
    l0_ = orb.l0;
  }

  bool exists() {
    if (!free_[idx(k0_, l0_)]) return false;
    memo_.assign(free_.size(), -1);
    if (!reach(k0_, l0_, +1)) return false;
    memo_.assign(free_.size(), -1);
    return reach(k0_, l0_, -1);
  }

 private:
  std::size_t idx(long k, long l) const { return static_cast<std::size_t>(k * L_ + l); }

  bool reach(long k, long l, int dir) {
    if (k < 0 || l < 0 || k >= K_ || l >= L_ || !free_[idx(k, l)]) return false;
    if (k == (dir > 0 ? K_ - 1 : 0)) return true;
    signed char& m = memo_[idx(k, l)];
    if (m >= 0) return m != 0;
    m = 0;
    const bool ok = reach(k + dir, l, dir) || reach(k, l + dir, dir) || reach(k + dir, l + dir, dir);
    m = ok ? 1 : 0;
    return ok;
  }

  long K_, L_, k0_ = 0, l0_ = 0;
  std::vector<char> free_;
  std::vector<signed char> memo_;
};

}  // namespace shadowlab::testing
