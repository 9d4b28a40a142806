#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "shadowlab/recurrence.hpp"
#include "shadowlab/suspension.hpp"

namespace shadowlab::cli {

using nlohmann::ordered_json;

unsigned effective_threads(unsigned configured) {
  if (configured == 0) return 0;  // the library reads SHADOWLAB_THREADS itself
  if (const char* env = std::getenv("SHADOWLAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) return static_cast<unsigned>(std::min<long>(cap, configured));
  }
  return configured;
}

namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

struct Row {
  std::size_t sample = 0;
  double eps = kNone;
  double delta = kNone;
  double T = kNone;
  double height = kNone;
  Point x;
  std::string status;
  std::optional<double> value;
  std::uint64_t seed = 0;
  std::string witness;
  std::string certificate;
  std::string note;
};

std::string brief(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(double v) { return std::isnan(v) ? std::string() : format_double(v); }

bool tri_valued(const std::string& s) {
  return s == "PASS" || s == "FAIL" || s == "UNKNOWN" || s == "SHADOWED" ||
         s == "NOT_SHADOWED_AT_RESOLUTION";
}
bool positive(const std::string& s) { return s == "PASS" || s == "SHADOWED"; }
bool negative(const std::string& s) { return s == "FAIL" || s == "NOT_SHADOWED_AT_RESOLUTION"; }

std::string orbit_csv(const PseudoOrbit& P) {
  std::ostringstream os;
  write_csv(os, P);
  return os.str();
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, std::ostream& log) : c_(c), log_(log) {
    sys_ = make_flow(c.model, c.params);
    threads_ = effective_threads(c.threads);
  }

  RunOutcome run() {
    switch (c_.operation) {
      case Operation::kVerify: verify(); break;
      case Operation::kEstimatePoint:
      case Operation::kEstimateSet: estimate(); break;
      case Operation::kRecurrence: recurrence(); break;
      case Operation::kSuspensionCheck: suspension(); break;
      case Operation::kLorenzFalsify: lorenz(); break;
    }
    return finish();
  }

 private:
  // ---- shared pieces

  SearchConfig search_config() const {
    SearchConfig s;
    s.dt = c_.dt;
    s.grid_spacing = c_.grid_spacing;
    s.band = c_.band;
    s.max_candidates = c_.max_candidates;
    s.max_cells = c_.max_cells;
    s.threads = threads_;
    s.best_certificate = c_.best_certificate;
    return s;
  }

  PointEstimateConfig point_config(double T) const {
    PointEstimateConfig p;
    p.delta_schedule = c_.delta;
    p.trials = c_.trials;
    p.t_min = T;
    p.t_max = T * c_.duration_ratio;
    p.back = c_.back;
    p.forward = c_.forward;
    p.adversarial = c_.adversarial;
    p.adversarial_back = c_.adversarial_back;
    p.adversarial_max_steps = c_.adversarial_max_steps;
    p.adversarial_extra_steps = c_.adversarial_extra_steps;
    p.adversarial_stall_factor = c_.adversarial_stall_factor;
    p.forward_only = c_.forward_only;
    p.search = search_config();
    return p;
  }

  std::vector<Point> configured_points(const MetricSpace& X, std::uint64_t stream) const {
    if (c_.points.empty()) return X.sample(c_.samples, derive_seed(c_.seed, stream));
    std::vector<Point> out;
    for (const auto& p : c_.points) out.push_back(X.wrap(Point(std::span<const double>(p))));
    return out;
  }

  std::size_t add_row(Row r) {
    dim_ = std::max(dim_, r.x.dim());
    rows_.push_back(std::move(r));
    return rows_.size() - 1;
  }

  std::string row_name(std::size_t i) const { return "r" + std::to_string(i); }

  /// Witness pseudo-orbit plus the verdict metadata; a certificate when the
  /// verdict carries one.
  void attach(std::size_t i, const PseudoOrbit& P, const Verdict& v, double eps) {
    Row& r = rows_[i];
    r.witness = "witnesses/" + row_name(i) + ".csv";
    files_.add(r.witness, orbit_csv(P));
    ordered_json meta{{"row", i},
                      {"model", c_.model},
                      {"eps", eps},
                      {"verdict", to_string(v.tag)},
                      {"reason", v.reason},
                      {"pseudo_orbit", row_name(i) + ".csv"},
                      {"search", search_log_json(v.log)}};
    files_.add("witnesses/" + row_name(i) + ".json", meta.dump(2) + "\n");
    if (v.certificate) {
      r.certificate = "certificates/" + row_name(i) + ".json";
      r.value = v.certificate->achieved_sup;
      files_.add(r.certificate, certificate_json(c_.model, c_.params, eps, *v.certificate, v.log,
                                                 "../" + r.witness)
                                        .dump(2) +
                                    "\n");
    }
    if (r.note.empty() && !v.reason.empty()) r.note = v.reason;
  }

  void record_estimate(Row r, const PointEstimate& e) {
    r.status = to_string(e.status);
    r.delta = e.delta;
    const std::size_t i = add_row(std::move(r));
    if (e.witness && e.witness_verdict) attach(i, *e.witness, *e.witness_verdict, rows_[i].eps);
    rows_[i].note = std::to_string(e.trials.size()) + " trials";
  }

  void set_check(const std::string& name, bool value) { measured_[name] = value; }

  bool rows_all(bool (*pred)(const std::string&)) const {
    std::size_t n = 0;
    for (const Row& r : rows_)
      if (tri_valued(r.status)) {
        ++n;
        if (!pred(r.status)) return false;
      }
    return n > 0;
  }

  // ---- operations

  void verify() {
    const MetricSpace& X = sys_->space();
    const auto pts = X.sample(c_.axiom_samples, derive_seed(c_.seed, 11));
    double worst_triangle = 0.0, worst_symmetry = 0.0, worst_self = 0.0, max_d = 0.0;
    bool metric_ok = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point& a = pts[i];
      const Point& b = pts[(i + 1) % pts.size()];
      const Point& d = pts[(i + 2) % pts.size()];
      const double ab = X.distance(a, b), ba = X.distance(b, a);
      const double bd = X.distance(b, d), ad = X.distance(a, d);
      worst_self = std::max(worst_self, X.distance(a, a));
      worst_symmetry = std::max(worst_symmetry, std::abs(ab - ba));
      worst_triangle = std::max(worst_triangle, ad - (ab + bd));
      max_d = std::max({max_d, ab, bd, ad});
      metric_ok = metric_ok && ab >= 0.0;
    }
    const double tol = 1e-12;
    metric_ok = metric_ok && worst_self <= tol && worst_symmetry <= tol &&
                worst_triangle <= tol && max_d <= X.diameter() * (1.0 + tol) + tol;
    set_check("metricAxioms", metric_ok);
    extra_["metric"] = {{"space", X.name()},
                        {"samples", pts.size()},
                        {"max_self_distance", worst_self},
                        {"max_asymmetry", worst_symmetry},
                        {"max_triangle_excess", std::max(0.0, worst_triangle)},
                        {"max_distance", max_d},
                        {"diameter", X.diameter()}};

    Rng rng(derive_seed(c_.seed, 12));
    const bool both = sys_->invertible() && sys_->kind() != FlowKind::kIntegrated;
    std::uniform_real_distribution<double> ut(both ? -1.0 : 0.0, 1.0);
    const double gtol = std::max(sys_->group_tolerance(), 1e-12) + 1e-14;
    double worst = 0.0;
    std::size_t evaluated = 0, escaped = 0;
    for (const Point& x : pts) {
      const double s = ut(rng), t = ut(rng);
      try {
        worst = std::max(worst, group_defect(*sys_, x, s, t));
        ++evaluated;
      } catch (const FlowError&) {
        ++escaped;
      }
    }
    set_check("groupLaw", evaluated > 0 && worst <= gtol);
    extra_["group_law"] = {{"evaluated", evaluated},
                           {"left_domain", escaped},
                           {"max_defect", worst},
                           {"tolerance", gtol},
                           {"times", both ? "[-1, 1]" : "[0, 1]"}};
    log_ << "verify: metric " << (metric_ok ? "ok" : "FAILED") << ", group law max defect "
         << brief(worst) << "\n";

    if (c_.orbit.empty()) return;
    const auto path = c_.base_dir / c_.orbit;
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open pseudo-orbit");
    std::optional<PseudoOrbit> P;
    try {
      P = read_csv(in);
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    if (!c_.delta.empty()) {
      const auto rep = validate(*sys_, *P, c_.delta.front(), c_.T.front());
      extra_["orbit_valid"] = rep.ok;
      extra_["orbit_max_jump"] = rep.max_jump;
      extra_["orbit_valid_at"] = {{"delta", c_.delta.front()}, {"T", c_.T.front()}};
    }
    for (double eps : c_.eps) {
      Verdict v = c_.forward_only ? decide_forward_shadowing(*sys_, *P, eps, search_config())
                                  : decide_shadowing(*sys_, *P, eps, search_config());
      Row r;
      r.eps = eps;
      r.x = P->point(0);
      r.status = to_string(v.tag);
      const std::size_t i = add_row(std::move(r));
      attach(i, *P, v, eps);
      log_ << "verify: eps " << brief(eps) << " " << to_string(v.tag) << "\n";
    }
  }

  void estimate() {
    const MetricSpace& X = sys_->space();
    const auto pts = configured_points(X, 1);
    bool nested = true;
    ordered_json fractions = ordered_json::array();
    std::ostringstream plot, trials;
    plot << "T,eps";
    for (std::size_t d = 0; d < X.dim(); ++d) plot << ",x" << d;
    plot << ",status,pass\n";
    trials << "T,eps,sample,delta,trial,verdict\n";
    for (std::size_t ti = 0; ti < c_.T.size(); ++ti) {
      const double T = c_.T[ti];
      const std::uint64_t seed = derive_seed(c_.seed, 100 + ti);
      SetEstimate se = estimate_shadowable_set(*sys_, pts, c_.eps, point_config(T), seed);
      nested = nested && se.nesting_violations.empty();
      for (std::size_t k = 0; k < se.eps.size(); ++k) {
        const double eps = se.eps[k];
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const PointEstimate& e = se.by_eps[k][i];
          Row r;
          r.sample = i;
          r.eps = eps;
          r.T = T;
          r.x = pts[i];
          r.seed = derive_seed(seed, i);
          record_estimate(std::move(r), e);
          plot << format_double(T) << "," << format_double(eps);
          for (double v : pts[i].coords()) plot << "," << format_double(v);
          plot << "," << to_string(e.status) << "," << (e.status == PointStatus::kPass) << "\n";
          for (const TrialRecord& t : e.trials)
            trials << format_double(T) << "," << format_double(eps) << "," << i << ","
                   << format_double(t.delta) << "," << t.trial << "," << to_string(t.tag) << "\n";
        }
        fractions.push_back({{"T", T}, {"eps", eps}, {"pass_fraction", se.pass_fraction(k)}});
        log_ << to_string(c_.operation) << ": T " << brief(T) << " eps "
             << brief(eps) << ": pass fraction " << brief(se.pass_fraction(k))
             << "\n";
      }
    }
    set_check("nesting", nested);
    extra_["pass_fractions"] = fractions;
    files_.add("plotdata/sh_set.csv", plot.str());
    files_.add("plotdata/trials.csv", trials.str());
  }

  void recurrence() {
    const MetricSpace& X = sys_->space();
    BoxCover cover(X, c_.rho, c_.probes_per_box, derive_seed(c_.seed, 21));
    TransitionGraph G = build_transition_graph(*sys_, cover, c_.graph_T, c_.graph_delta, threads_);
    std::size_t sccs = 0;
    strongly_connected_components(G, &sccs);
    const auto cr = chain_recurrent_estimate(G);
    const bool chain_transitive = chain_transitive_check(G);
    set_check("chainTransitive", chain_transitive);
    set_check("notChainTransitive", !chain_transitive);
    log_ << "recurrence: " << cover.size() << " boxes, " << G.edge_count() << " edges, " << sccs
         << " components, chain transitive " << (chain_transitive ? "yes" : "no") << "\n";

    const auto targets = X.sample(c_.targets, derive_seed(c_.seed, 23));
    const auto starts = X.sample(c_.starts, derive_seed(c_.seed, 22));
    std::size_t transitive_starts = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const ProbeResult pr = transitivity_probe(*sys_, starts[i], c_.horizon, c_.eps_dense, targets);
      transitive_starts += pr.ok;
      Row r;
      r.sample = i;
      r.x = starts[i];
      r.status = pr.ok ? "DENSE_ORBIT" : "NOT_DENSE";
      r.value = pr.coverage;
      r.note = "transitivity probe";
      add_row(std::move(r));
    }
    const bool transitive = transitive_starts > 0;
    set_check("transitive", transitive);
    set_check("notTransitive", !transitive);
    log_ << "recurrence: " << transitive_starts << "/" << starts.size()
         << " starts with a dense orbit at resolution\n";

    extra_["chainTransitive"] = chain_transitive;
    extra_["transitive"] = transitive;
    extra_["cover"] = {{"rho", c_.rho},
                       {"boxes", cover.size()},
                       {"edges", G.edge_count()},
                       {"components", sccs},
                       {"chain_recurrent_boxes", cr.size()}};
    extra_["transitivity"] = {{"starts", starts.size()},
                              {"dense_orbit_starts", transitive_starts},
                              {"horizon", c_.horizon},
                              {"eps_dense", c_.eps_dense}};

    if (!c_.eps.empty()) {
      const auto pts = configured_points(X, 1);
      const std::uint64_t seed = derive_seed(c_.seed, 100);
      SetEstimate se = estimate_shadowable_set(*sys_, pts, c_.eps, point_config(c_.T.front()), seed);
      bool all_fail = true, all_pass = true;
      for (std::size_t k = 0; k < se.eps.size(); ++k)
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const PointEstimate& e = se.by_eps[k][i];
          all_fail = all_fail && e.status == PointStatus::kFail && e.witness.has_value();
          all_pass = all_pass && e.status == PointStatus::kPass;
          Row r;
          r.sample = i;
          r.eps = se.eps[k];
          r.T = c_.T.front();
          r.x = pts[i];
          r.seed = derive_seed(seed, i);
          record_estimate(std::move(r), e);
        }
      extra_["shAllFail"] = all_fail;
      extra_["shAllPass"] = all_pass;
      log_ << "recurrence: shadowable-point estimates all FAIL: " << (all_fail ? "yes" : "no")
           << "\n";
    }

    std::ostringstream boxes, edges;
    write_boxes_csv(boxes, cover, cr);
    write_edges_csv(edges, G);
    files_.add("plotdata/chain_recurrent_boxes.csv", boxes.str());
    files_.add("plotdata/edges.csv", edges.str());
  }

  void suspension() {
    std::shared_ptr<const BaseSystem> base = make_base(c_.model, c_.params);
    const MetricSpace& B = base->space();
    std::vector<Point> xs;
    if (!c_.points.empty()) {
      xs = configured_points(B, 31);
    } else if (const auto* C = dynamic_cast<const CantorIntervalSpace*>(&B)) {
      // both halves of the space, so the verdict split is visible
      xs = C->sample_cantor((c_.samples + 1) / 2, derive_seed(c_.seed, 31));
      for (const Point& x : C->sample_interval(c_.samples / 2, derive_seed(c_.seed, 32)))
        xs.push_back(x);
    } else {
      xs = B.sample(c_.samples, derive_seed(c_.seed, 31));
    }

    CorrespondenceConfig cc;
    cc.heights = c_.heights;
    cc.fiber_checks = c_.fiber_checks;
    cc.flow = point_config(c_.T.front());
    cc.discrete.delta_schedule = c_.delta;
    cc.discrete.trials = c_.discrete_trials;
    cc.discrete.back = c_.discrete_back;
    cc.discrete.forward = c_.discrete_forward;
    cc.discrete.adversarial = c_.adversarial;
    cc.discrete.adversarial_back = c_.adversarial_back;
    cc.discrete.adversarial_max_steps = c_.discrete_max_steps;
    cc.discrete.adversarial_extra_steps = c_.adversarial_extra_steps;
    cc.discrete.grid_spacing = c_.grid_spacing;

    bool ok = true;
    ordered_json per_eps = ordered_json::array();
    std::ostringstream plot;
    plot << "eps";
    for (std::size_t d = 0; d < B.dim(); ++d) plot << ",x" << d;
    plot << ",s,suspension,base\n";
    for (std::size_t k = 0; k < c_.eps.size(); ++k) {
      const double eps = c_.eps[k];
      const auto rep =
          suspension_correspondence_check(base, xs, eps, cc, derive_seed(c_.seed, 300 + k));
      const bool agree = rep.pass_fail_conflicts == 0 && rep.fiber_violations == 0 &&
                         static_cast<double>(rep.agreements) >=
                             c_.min_agreement * static_cast<double>(rep.rows.size());
      ok = ok && agree;
      std::size_t j = 0;
      for (const CorrespondenceRow& cr : rep.rows) {
        Row r;
        r.sample = j++;
        r.eps = eps;
        r.T = c_.T.front();
        r.height = cr.s;
        r.x = cr.x;
        r.status = to_string(cr.suspension);
        r.note = "base " + to_string(cr.base);
        add_row(std::move(r));
        plot << format_double(eps);
        for (double v : cr.x.coords()) plot << "," << format_double(v);
        plot << "," << format_double(cr.s) << "," << to_string(cr.suspension) << ","
             << to_string(cr.base) << "\n";
      }
      ordered_json matrix = ordered_json::array();
      for (const auto& line : rep.matrix) matrix.push_back(line);
      per_eps.push_back({{"eps", eps},
                         {"rows", rep.rows.size()},
                         {"agreements", rep.agreements},
                         {"disagreements", rep.disagreements},
                         {"pass_fail_conflicts", rep.pass_fail_conflicts},
                         {"fibers_checked", rep.fibers_checked},
                         {"fiber_violations", rep.fiber_violations},
                         {"matrix_suspension_by_base", matrix}});
      log_ << "suspension-check: eps " << brief(eps) << ": " << rep.agreements << "/"
           << rep.rows.size() << " agree, " << rep.pass_fail_conflicts << " PASS-vs-FAIL, "
           << rep.fiber_violations << " fiber violations\n";
    }
    set_check("correspondence", ok);
    extra_["correspondence"] = per_eps;
    extra_["matrix_order"] = {"PASS", "FAIL", "UNKNOWN"};
    files_.add("plotdata/correspondence.csv", plot.str());
  }

  void lorenz() {
    const auto* model = dynamic_cast<const GeometricLorenz*>(sys_.get());
    if (!model) throw ConfigError("lorenz-falsify needs geometric-lorenz");
    const ReturnMapCheck rc = check_return_map(*model);
    const double T_ret = model->mean_return_time();
    set_check("returnMapPrecondition", rc.ok);
    extra_["return_map"] = {{"F0", rc.f_left},
                            {"F1", rc.f_right},
                            {"min_slope", rc.min_slope},
                            {"precondition", rc.ok},
                            {"mean_return_time", T_ret}};
    extra_["falsification"] =
        "heuristic drift across the stable set of the singularity; a refutation holds at the "
        "recorded resolution only";

    std::vector<Point> pts;
    if (c_.points.empty())
      pts = model->attractor_samples(c_.samples, derive_seed(c_.seed, 41));
    else
      pts = configured_points(model->space(), 41);
    const long steps = static_cast<long>(std::ceil(c_.return_times * T_ret));
    for (std::size_t k = 0; k < c_.eps.size(); ++k)
      for (std::size_t d = 0; d < c_.delta.size(); ++d) {
        std::vector<std::optional<std::pair<PseudoOrbit, Verdict>>> out(pts.size());
        parallel_for(pts.size(), threads_, [&](std::size_t i) {
          AdversarialConfig ac;
          ac.delta = c_.delta[d];
          ac.eps = c_.eps[k];
          ac.duration = c_.T.front();
          ac.back = 0;
          ac.max_steps = steps;
          ac.extra_steps = steps;
          ac.stall_factor = c_.adversarial_stall_factor;
          PseudoOrbit P = generate_adversarial(*model, pts[i], ac, derive_seed(c_.seed, 400 + k, d, i));
          SearchConfig sc = search_config();
          sc.threads = 1;
          Verdict v = decide_forward_shadowing(*model, P, c_.eps[k], sc);
          out[i].emplace(std::move(P), std::move(v));
        });
        std::size_t refuted = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          Row r;
          r.sample = i;
          r.eps = c_.eps[k];
          r.delta = c_.delta[d];
          r.T = c_.T.front();
          r.x = pts[i];
          r.seed = derive_seed(c_.seed, 400 + k, d, i);
          r.status = to_string(out[i]->second.tag);
          refuted += out[i]->second.tag == VerdictTag::kNotShadowedAtResolution;
          const std::size_t row = add_row(std::move(r));
          attach(row, out[i]->first, out[i]->second, c_.eps[k]);
        }
        log_ << "lorenz-falsify: eps " << brief(c_.eps[k]) << " delta "
             << brief(c_.delta[d]) << ": " << refuted << "/" << pts.size()
             << " refuted at resolution\n";
      }

    std::ostringstream plot;
    plot << "x,return_map,computed_return_map\n";
    for (int i = -50; i <= 50; ++i) {
      if (i == 0) continue;
      const double x = i / 50.0 * (1.0 - 1e-9);
      plot << format_double(x) << "," << format_double(model->return_map(x)) << ","
           << format_double(model->computed_return_map(x)) << "\n";
    }
    files_.add("plotdata/return_map.csv", plot.str());
  }

  // ---- results, checks and the report

  std::string results_csv() const {
    std::ostringstream o;
    o << "row,operation,model,sample,eps,delta,T,height";
    for (std::size_t d = 0; d < dim_; ++d) o << ",x" << d;
    o << ",status,value,seed,witness,certificate,note\r\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Row& r = rows_[i];
      o << i << "," << to_string(c_.operation) << "," << csv_field(c_.model) << "," << r.sample
        << "," << num(r.eps) << "," << num(r.delta) << "," << num(r.T) << "," << num(r.height);
      for (std::size_t d = 0; d < dim_; ++d) o << "," << (d < r.x.dim() ? num(r.x[d]) : "");
      o << "," << r.status << "," << (r.value ? format_double(*r.value) : "") << "," << r.seed
        << "," << csv_field(r.witness) << "," << csv_field(r.certificate) << ","
        << csv_field(r.note) << "\r\n";
    }
    return o.str();
  }

  RunOutcome finish() {
    set_check("allPass", rows_all(positive));
    set_check("allFail", rows_all(negative));

    ordered_json counts = ordered_json::object();
    std::size_t tri = 0, unknown = 0;
    for (const Row& r : rows_) {
      counts[r.status] = counts.value(r.status, 0) + 1;
      if (tri_valued(r.status)) {
        ++tri;
        unknown += r.status == "UNKNOWN";
      }
    }
    const double unknown_fraction = tri ? static_cast<double>(unknown) / tri : 0.0;

    ordered_json checks = ordered_json::object();
    std::vector<std::string> failed;
    for (const auto& name : c_.checks) {
      const bool v = measured_.count(name) && measured_.at(name);
      checks[name] = v;
      if (!v) failed.push_back(name);
    }

    RunOutcome out;
    std::string status = "ok";
    if (unknown_fraction > c_.unknown_limit) {
      out.exit_code = kExitUnknownDominated;
      status = "unknown-dominated";
    } else if (!failed.empty()) {
      out.exit_code = kExitCheckFailed;
      status = "check-failed";
    }

    std::size_t certificates = 0, witnesses = 0;
    for (const Row& r : rows_) {
      certificates += !r.certificate.empty();
      witnesses += !r.witness.empty();
    }

    ordered_json report{
        {"operation", to_string(c_.operation)},
        {"model", c_.model},
        {"status", status},
        {"exit_code", out.exit_code},
        {"checks", checks},
        {"failed_checks", failed},
        {"rows", rows_.size()},
        {"counts", counts},
        {"unknown_fraction", unknown_fraction},
        {"witness_files", witnesses},
        {"certificate_files", certificates},
        {"time_quantifier",
         "shadowing is tested over the time span of each pseudo-orbit window, not all of R"},
    };
    for (auto& [k, v] : extra_.items()) report[k] = v;
    report["config"] = config_json(c_);

    out.files = std::move(files_);
    out.files.add("results.csv", results_csv());
    out.files.add("report.json", report.dump(2) + "\n");
    out.files.add("config.toml", emit_config(c_));
    out.report = std::move(report);
    return out;
  }

  const ExperimentConfig& c_;
  std::ostream& log_;
  std::shared_ptr<FlowSystem> sys_;
  unsigned threads_ = 0;
  std::vector<Row> rows_;
  std::size_t dim_ = 0;
  std::map<std::string, bool> measured_;
  ordered_json extra_ = ordered_json::object();
  ArtifactSet files_;
};

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log) {
  return Runner(config, log).run();
}

}  // namespace shadowlab::cli
