#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shadowlab/flow.hpp"
#include "shadowlab/space.hpp"

namespace shadowlab {

/// Uniform grid of chart cells, keeping the cells that meet the space.
/// On periodic axes the grid is shifted by half a cell so that 0 (and any
/// point at a multiple of the cell width) sits at a cell centre.
class BoxCover {
 public:
  BoxCover(const MetricSpace& X, double rho, std::size_t probes_per_box = 8,
           std::uint64_t seed = 1);

  std::size_t size() const { return boxes_.size(); }
  double rho() const { return rho_; }
  const MetricSpace& space() const { return *X_; }

  Point lo(std::size_t box) const;
  Point hi(std::size_t box) const;
  Point centre(std::size_t box) const;
  /// Members of the space inside the cell: the centre if it is a member,
  /// then quasi-uniform points.
  const std::vector<Point>& probes(std::size_t box) const { return probes_[box]; }

  /// Box containing p; on shared faces the smallest index wins. nullopt if
  /// p is in no kept box.
  std::optional<std::size_t> box_of(const Point& p) const;
  /// Kept boxes meeting the chart rectangle [lo, hi] (periodic axes wrap).
  std::vector<std::size_t> boxes_meeting(const Point& lo, const Point& hi) const;

 private:
  long flat(const std::vector<long>& idx) const;
  std::optional<std::size_t> lookup(const std::vector<long>& idx) const;

  const MetricSpace* X_;
  ChartBox chart_;
  std::size_t dim_;
  double rho_;
  std::vector<long> counts_;
  std::vector<double> side_;
  std::vector<double> origin_;  // chart coordinate of the corner of cell 0
  std::vector<std::vector<long>> boxes_;  // grid index per kept box, lexicographic
  std::vector<long> kept_;                // flat grid index -> box or -1
  std::vector<std::vector<Point>> probes_;
};

class OutsideCover : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Edge B -> B' iff the delta-fattened chart rectangle around phi_T(y) meets
/// B' for some probe y of B.
struct TransitionGraph {
  double T = 1.0;
  double delta = 0.0;
  std::vector<std::vector<std::size_t>> out;  // sorted successor lists

  std::size_t size() const { return out.size(); }
  std::size_t edge_count() const;
  bool has_edge(std::size_t a, std::size_t b) const;
};

TransitionGraph build_transition_graph(const FlowSystem& sys, const BoxCover& cover, double T,
                                       double delta, unsigned threads = 0);

/// Boxes reachable from `from` by paths with at least one edge.
std::vector<bool> reachable(const TransitionGraph& G, std::size_t from);

/// box(p) reaches box(q) and box(q) reaches box(p). Throws OutsideCover.
bool chain_related(const Point& p, const Point& q, const BoxCover& cover,
                   const TransitionGraph& G);

/// Strongly connected component id per node, computed without recursion.
std::vector<std::size_t> strongly_connected_components(const TransitionGraph& G,
                                                       std::size_t* count = nullptr);

/// Boxes in a nontrivial SCC or carrying a self-loop (sorted indices).
std::vector<std::size_t> chain_recurrent_estimate(const TransitionGraph& G);

/// One SCC spans the cover (and it carries at least one edge).
bool chain_transitive_check(const TransitionGraph& G);

struct NonwanderingLabel {
  bool nonwandering = false;
  double return_time = 0.0;  // first witnessed return, if any
};

/// p is labelled nonwandering when some probe u of B(p, r) has phi_t(u) in
/// B(p, r) for a sampled t in [1, t_max]. Only witnessed returns count, so
/// this under-approximates the nonwandering set.
std::vector<NonwanderingLabel> nonwandering_estimate(const FlowSystem& sys,
                                                     const std::vector<Point>& samples,
                                                     double t_max, double r,
                                                     std::size_t probes = 8,
                                                     std::uint64_t seed = 1,
                                                     unsigned threads = 0);

struct ProbeResult {
  bool ok = false;
  double coverage = 0.0;  // fraction of targets visited
};

/// Does the forward orbit of x over [0, horizon] pass within eps_dense of
/// every target?
ProbeResult transitivity_probe(const FlowSystem& sys, const Point& x, double horizon,
                               double eps_dense, const std::vector<Point>& targets);

struct MinimalityResult {
  bool ok = false;
  std::vector<ProbeResult> starts;
};

MinimalityResult minimality_probe(const FlowSystem& sys, const std::vector<Point>& starts,
                                  double horizon, double eps_dense,
                                  const std::vector<Point>& targets, unsigned threads = 0);

/// "from,to" rows.
void write_edges_csv(std::ostream& os, const TransitionGraph& G);
/// "box,lo0,hi0,lo1,hi1,..." rows for the listed boxes.
void write_boxes_csv(std::ostream& os, const BoxCover& cover,
                     const std::vector<std::size_t>& boxes);

}  // namespace shadowlab
