#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace shadowlab::cli {

namespace {

const std::vector<std::pair<Operation, std::string>>& operation_names() {
  static const std::vector<std::pair<Operation, std::string>> names{
      {Operation::kVerify, "verify"},
      {Operation::kEstimatePoint, "estimate-point"},
      {Operation::kEstimateSet, "estimate-set"},
      {Operation::kRecurrence, "recurrence"},
      {Operation::kSuspensionCheck, "suspension-check"},
      {Operation::kLorenzFalsify, "lorenz-falsify"},
  };
  return names;
}

// One TOML table; remembers which keys were read so leftovers can be reported.
class Section {
 public:
  Section(const toml::table* tbl, std::string name, std::string source)
      : tbl_(tbl), name_(std::move(name)), source_(std::move(source)) {}

  const toml::node* get(const std::string& key) {
    used_.insert(key);
    return tbl_ ? tbl_->get(key) : nullptr;
  }

  [[noreturn]] void fail(const std::string& key, const toml::node* n,
                         const std::string& msg) const {
    std::string where = source_;
    if (n) where += ":" + std::to_string(n->source().begin.line);
    std::string path = name_.empty() ? key : "[" + name_ + "] " + key;
    throw ConfigError(where + ": " + path + ": " + msg);
  }

  void finish() const {
    if (!tbl_) return;
    for (const auto& [k, v] : *tbl_) {
      const std::string key(k.str());
      if (!used_.count(key)) fail(key, &v, "unknown key");
    }
  }

  double number(const std::string& key, double fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    return to_number(key, n);
  }

  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0)) fail(key, get(key), "must be > 0");
    return v;
  }

  std::optional<double> auto_number(const std::string& key, std::optional<double> fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (n->is_string() && n->as_string()->get() == "auto") return std::nullopt;
    const double v = to_number(key, n);
    if (!(v > 0.0)) fail(key, n, "must be > 0 or \"auto\"");
    return v;
  }

  long integer(const std::string& key, long fallback, long min) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (!n->is_integer()) fail(key, n, "expected an integer");
    const auto v = n->as_integer()->get();
    if (v < min) fail(key, n, "must be >= " + std::to_string(min));
    if (v > std::numeric_limits<long>::max()) fail(key, n, "too large");
    return static_cast<long>(v);
  }

  std::size_t count(const std::string& key, std::size_t fallback, long min) {
    return static_cast<std::size_t>(integer(key, static_cast<long>(fallback), min));
  }

  bool boolean(const std::string& key, bool fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (!n->is_boolean()) fail(key, n, "expected true or false");
    return n->as_boolean()->get();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (!n->is_string()) fail(key, n, "expected a string");
    return n->as_string()->get();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (!n->is_array()) fail(key, n, "expected an array of numbers");
    std::vector<double> out;
    for (const toml::node& e : *n->as_array()) out.push_back(to_number(key, &e));
    return out;
  }

  std::vector<std::string> strings(const std::string& key,
                                   const std::vector<std::string>& fallback) {
    const toml::node* n = get(key);
    if (!n) return fallback;
    if (!n->is_array()) fail(key, n, "expected an array of strings");
    std::vector<std::string> out;
    for (const toml::node& e : *n->as_array()) {
      if (!e.is_string()) fail(key, &e, "expected an array of strings");
      out.push_back(e.as_string()->get());
    }
    return out;
  }

  std::vector<std::vector<double>> point_list(const std::string& key) {
    const toml::node* n = get(key);
    if (!n) return {};
    if (!n->is_array()) fail(key, n, "expected an array of coordinate arrays");
    std::vector<std::vector<double>> out;
    for (const toml::node& e : *n->as_array()) {
      if (!e.is_array()) fail(key, &e, "expected an array of coordinate arrays");
      std::vector<double> p;
      for (const toml::node& c : *e.as_array()) p.push_back(to_number(key, &c));
      out.push_back(std::move(p));
    }
    return out;
  }

  const toml::table* table() const { return tbl_; }

 private:
  double to_number(const std::string& key, const toml::node* n) const {
    double v = 0.0;
    if (n->is_integer())
      v = static_cast<double>(n->as_integer()->get());
    else if (n->is_floating_point())
      v = n->as_floating_point()->get();
    else
      fail(key, n, "expected a number");
    if (!std::isfinite(v)) fail(key, n, "must be finite");
    return v;
  }

  const toml::table* tbl_;
  std::string name_;
  std::string source_;
  std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, const std::string& key,
                            const std::string& source) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (!n->is_table())
    throw ConfigError(source + ":" + std::to_string(n->source().begin.line) + ": " + key +
                      ": expected a table");
  return n->as_table();
}

void check_sorted(Section& s, const std::string& key, const std::vector<double>& v,
                  bool increasing) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) s.fail(key, s.get(key), "entries must be > 0");
    if (i > 0 && (increasing ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])))
      s.fail(key, s.get(key),
             std::string("must be strictly ") + (increasing ? "increasing" : "decreasing") +
                 " (entry " + std::to_string(i) + ")");
  }
}

std::string fmt_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (ch < 0x20 || ch == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += static_cast<char>(ch);
        }
    }
  }
  return out + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_number(v[i]);
  return out + "]";
}

std::string list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quote(v[i]);
  return out + "]";
}

bool needs_schedules(Operation op) {
  return op == Operation::kEstimatePoint || op == Operation::kEstimateSet ||
         op == Operation::kSuspensionCheck || op == Operation::kLorenzFalsify;
}

}  // namespace

std::string to_string(Operation op) {
  for (const auto& [o, n] : operation_names())
    if (o == op) return n;
  return "?";
}

Operation parse_operation(const std::string& s) {
  for (const auto& [o, n] : operation_names())
    if (n == s) return o;
  std::string known;
  for (const auto& [o, n] : operation_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown operation '" + s + "' (one of " + known + ")");
}

const std::vector<std::string>& available_checks(Operation op) {
  static const std::vector<std::string> verify{"metricAxioms", "groupLaw", "allPass", "allFail"};
  static const std::vector<std::string> estimate{"allPass", "allFail", "nesting"};
  static const std::vector<std::string> recurrence{
      "chainTransitive", "notChainTransitive", "transitive", "notTransitive",
      "allPass",         "allFail"};
  static const std::vector<std::string> suspension{"correspondence", "allPass", "allFail"};
  static const std::vector<std::string> lorenz{"returnMapPrecondition", "allFail"};
  switch (op) {
    case Operation::kVerify: return verify;
    case Operation::kEstimatePoint:
    case Operation::kEstimateSet: return estimate;
    case Operation::kRecurrence: return recurrence;
    case Operation::kSuspensionCheck: return suspension;
    case Operation::kLorenzFalsify: return lorenz;
  }
  return verify;
}

std::vector<std::string> default_checks(Operation op) {
  switch (op) {
    case Operation::kVerify: return {"metricAxioms", "groupLaw"};
    case Operation::kEstimatePoint: return {};
    case Operation::kEstimateSet: return {"nesting"};
    case Operation::kRecurrence: return {};
    case Operation::kSuspensionCheck: return {"correspondence"};
    case Operation::kLorenzFalsify: return {"returnMapPrecondition", "allFail"};
  }
  return {};
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }

  ExperimentConfig c;
  Section top(&root, "", source);

  const toml::node* op = top.get("operation");
  if (!op) top.fail("operation", nullptr, "missing");
  if (!op->is_string()) top.fail("operation", op, "expected a string");
  try {
    c.operation = parse_operation(op->as_string()->get());
  } catch (const ConfigError& e) {
    top.fail("operation", op, e.what());
  }

  const toml::node* seed = top.get("seed");
  if (!seed) top.fail("seed", nullptr, "missing (every run needs an explicit seed)");
  c.seed = static_cast<std::uint64_t>(top.integer("seed", 0, 0));
  c.output = top.string("output", c.output);
  if (c.output.empty()) top.fail("output", top.get("output"), "must not be empty");
  c.checks = top.strings("checks", default_checks(c.operation));
  {
    const auto& ok = available_checks(c.operation);
    std::set<std::string> seen;
    for (const auto& name : c.checks) {
      if (std::find(ok.begin(), ok.end(), name) == ok.end()) {
        std::string known;
        for (const auto& k : ok) known += (known.empty() ? "" : ", ") + k;
        top.fail("checks", top.get("checks"),
                 "'" + name + "' is not a check of " + to_string(c.operation) + " (one of " +
                     known + ")");
      }
      if (!seen.insert(name).second)
        top.fail("checks", top.get("checks"), "'" + name + "' listed twice");
    }
  }
  c.unknown_limit = top.number("unknown_limit", c.unknown_limit);
  if (!(c.unknown_limit >= 0.0 && c.unknown_limit <= 1.0))
    top.fail("unknown_limit", top.get("unknown_limit"), "must lie in [0, 1]");

  // [model]
  const toml::table* mt = subtable(root, "model", source);
  top.get("model");
  if (!mt) top.fail("model", nullptr, "missing table [model]");
  Section model(mt, "model", source);
  const toml::node* name = model.get("name");
  if (!name) model.fail("name", nullptr, "missing");
  c.model = model.string("name", "");
  const ModelInfo* info = nullptr;
  try {
    info = &find_model(c.model);
  } catch (const UnknownModel& e) {
    model.fail("name", name, e.what());
  }
  c.params = info->defaults;
  const toml::table* pt = subtable(*mt, "params", source);
  model.get("params");
  if (pt) {
    Section params(pt, "model.params", source);
    for (const auto& [k, v] : *pt) {
      const std::string key(k.str());
      if (!info->defaults.count(key))
        params.fail(key, &v, "model " + c.model + " has no parameter '" + key + "'");
      c.params[key] = params.number(key, 0.0);
    }
    params.finish();
  }
  model.finish();
  try {
    if (info->kind == "base-map")
      make_base(c.model, c.params);
    else
      make_flow(c.model, c.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": [model.params]: " + e.what());
  }
  if (c.operation == Operation::kSuspensionCheck && info->kind != "base-map")
    model.fail("name", name, "suspension-check needs a base-map model, got " + c.model);
  if (c.operation == Operation::kLorenzFalsify && c.model != "geometric-lorenz")
    model.fail("name", name, "lorenz-falsify needs geometric-lorenz, got " + c.model);

  // [schedules]
  top.get("schedules");
  Section sch(subtable(root, "schedules", source), "schedules", source);
  c.eps = sch.numbers("eps", {});
  c.delta = sch.numbers("delta", {});
  c.T = sch.numbers("T", c.T);
  check_sorted(sch, "eps", c.eps, true);
  check_sorted(sch, "delta", c.delta, false);
  check_sorted(sch, "T", c.T, true);
  if (c.T.empty()) sch.fail("T", sch.get("T"), "must not be empty");
  sch.finish();

  // [sampling]
  top.get("sampling");
  Section smp(subtable(root, "sampling", source), "sampling", source);
  c.samples = smp.count("samples", c.samples, 0);
  c.points = smp.point_list("points");
  smp.finish();

  // [pseudo_orbit]
  top.get("pseudo_orbit");
  Section po(subtable(root, "pseudo_orbit", source), "pseudo_orbit", source);
  c.trials = po.count("trials", c.trials, 1);
  c.duration_ratio = po.number("duration_ratio", c.duration_ratio);
  if (!(c.duration_ratio >= 1.0))
    po.fail("duration_ratio", po.get("duration_ratio"), "must be >= 1");
  c.back = po.integer("back", c.back, 0);
  c.forward = po.integer("forward", c.forward, 0);
  c.adversarial = po.boolean("adversarial", c.adversarial);
  c.adversarial_back = po.integer("adversarial_back", c.adversarial_back, 0);
  c.adversarial_max_steps = po.integer("adversarial_max_steps", c.adversarial_max_steps, 1);
  c.adversarial_extra_steps = po.integer("adversarial_extra_steps", c.adversarial_extra_steps, 0);
  c.adversarial_stall_factor = po.positive("adversarial_stall_factor", c.adversarial_stall_factor);
  c.forward_only = po.boolean("forward_only", c.forward_only);
  po.finish();

  // [search]
  top.get("search");
  Section se(subtable(root, "search", source), "search", source);
  c.dt = se.auto_number("dt", c.dt);
  c.grid_spacing = se.auto_number("grid_spacing", c.grid_spacing);
  c.band = se.positive("band", c.band);
  c.max_candidates = se.count("max_candidates", c.max_candidates, 1);
  c.max_cells = se.count("max_cells", c.max_cells, 1);
  c.threads = static_cast<unsigned>(se.integer("threads", c.threads, 0));
  c.best_certificate = se.boolean("best_certificate", c.best_certificate);
  se.finish();

  // [verify]
  top.get("verify");
  Section ve(subtable(root, "verify", source), "verify", source);
  c.orbit = ve.string("orbit", c.orbit);
  c.axiom_samples = ve.count("axiom_samples", c.axiom_samples, 1);
  ve.finish();

  // [recurrence]
  top.get("recurrence");
  Section re(subtable(root, "recurrence", source), "recurrence", source);
  c.rho = re.positive("rho", c.rho);
  c.graph_delta = re.number("delta", c.graph_delta);
  if (!(c.graph_delta >= 0.0)) re.fail("delta", re.get("delta"), "must be >= 0");
  c.graph_T = re.positive("T", c.graph_T);
  c.probes_per_box = re.count("probes_per_box", c.probes_per_box, 1);
  c.horizon = re.positive("horizon", c.horizon);
  c.eps_dense = re.positive("eps_dense", c.eps_dense);
  c.starts = re.count("starts", c.starts, 0);
  c.targets = re.count("targets", c.targets, 1);
  re.finish();

  // [suspension]
  top.get("suspension");
  Section su(subtable(root, "suspension", source), "suspension", source);
  c.heights = su.numbers("heights", c.heights);
  for (std::size_t i = 0; i < c.heights.size(); ++i)
    if (!(c.heights[i] >= 0.0 && c.heights[i] < 1.0) ||
        (i > 0 && !(c.heights[i] > c.heights[i - 1])))
      su.fail("heights", su.get("heights"), "must be strictly increasing in [0, 1)");
  c.fiber_checks = su.count("fiber_checks", c.fiber_checks, 0);
  c.discrete_trials = su.count("discrete_trials", c.discrete_trials, 1);
  c.discrete_back = su.integer("discrete_back", c.discrete_back, 0);
  c.discrete_forward = su.integer("discrete_forward", c.discrete_forward, 0);
  c.discrete_max_steps = su.integer("discrete_max_steps", c.discrete_max_steps, 1);
  c.min_agreement = su.number("min_agreement", c.min_agreement);
  if (!(c.min_agreement >= 0.0 && c.min_agreement <= 1.0))
    su.fail("min_agreement", su.get("min_agreement"), "must lie in [0, 1]");
  su.finish();

  // [lorenz]
  top.get("lorenz");
  Section lo(subtable(root, "lorenz", source), "lorenz", source);
  c.return_times = lo.positive("return_times", c.return_times);
  lo.finish();

  top.finish();

  // cross-field requirements
  if (needs_schedules(c.operation) || (c.operation == Operation::kVerify && !c.orbit.empty())) {
    if (c.eps.empty()) sch.fail("eps", nullptr, "required by " + to_string(c.operation));
  }
  if (needs_schedules(c.operation) ||
      (c.operation == Operation::kRecurrence && !c.eps.empty())) {
    if (c.delta.empty()) sch.fail("delta", nullptr, "required by " + to_string(c.operation));
  }
  if (c.operation == Operation::kEstimatePoint && c.points.empty())
    smp.fail("points", nullptr, "estimate-point needs at least one point");
  const bool has_rows = c.operation == Operation::kVerify       ? !c.orbit.empty()
                        : c.operation == Operation::kRecurrence ? !c.eps.empty()
                                                                : true;
  if (!has_rows)
    for (const auto& ch : c.checks)
      if (ch == "allPass" || ch == "allFail")
        top.fail("checks", top.get("checks"),
                 ch + (c.operation == Operation::kVerify ? " needs [verify] orbit"
                                                         : " needs an eps schedule"));

  // points must live in the sampled space (the base space for suspension-check)
  if (!c.points.empty()) {
    std::shared_ptr<BaseSystem> base;
    std::shared_ptr<FlowSystem> sys;
    if (c.operation == Operation::kSuspensionCheck)
      base = make_base(c.model, c.params);
    else
      sys = make_flow(c.model, c.params);
    const MetricSpace& space = base ? base->space() : sys->space();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const auto& p = c.points[i];
      if (p.size() != space.dim())
        smp.fail("points", smp.get("points"),
                 "point " + std::to_string(i) + " has " + std::to_string(p.size()) +
                     " coordinates, the space has " + std::to_string(space.dim()));
      const Point q = space.wrap(Point(std::span<const double>(p)));
      if (!space.contains(q))
        smp.fail("points", smp.get("points"),
                 "point " + std::to_string(i) + " is not in " + space.name());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str(), file.string());
  c.base_dir = file.parent_path();
  return c;
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt_number(*v) : std::string("\"auto\"");
  };
  o << "operation = " << quote(to_string(c.operation)) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "output = " << quote(c.output) << "\n";
  o << "checks = " << list(c.checks) << "\n";
  o << "unknown_limit = " << fmt_number(c.unknown_limit) << "\n";

  o << "\n[model]\nname = " << quote(c.model) << "\n";
  o << "\n[model.params]\n";
  for (const auto& [k, v] : c.params) o << k << " = " << fmt_number(v) << "\n";

  o << "\n[schedules]\n";
  o << "eps = " << list(c.eps) << "\n";
  o << "delta = " << list(c.delta) << "\n";
  o << "T = " << list(c.T) << "\n";

  o << "\n[sampling]\n";
  o << "samples = " << c.samples << "\n";
  o << "points = [";
  for (std::size_t i = 0; i < c.points.size(); ++i) o << (i ? ", " : "") << list(c.points[i]);
  o << "]\n";

  o << "\n[pseudo_orbit]\n";
  o << "trials = " << c.trials << "\n";
  o << "duration_ratio = " << fmt_number(c.duration_ratio) << "\n";
  o << "back = " << c.back << "\n";
  o << "forward = " << c.forward << "\n";
  o << "adversarial = " << (c.adversarial ? "true" : "false") << "\n";
  o << "adversarial_back = " << c.adversarial_back << "\n";
  o << "adversarial_max_steps = " << c.adversarial_max_steps << "\n";
  o << "adversarial_extra_steps = " << c.adversarial_extra_steps << "\n";
  o << "adversarial_stall_factor = " << fmt_number(c.adversarial_stall_factor) << "\n";
  o << "forward_only = " << (c.forward_only ? "true" : "false") << "\n";

  o << "\n[search]\n";
  o << "dt = " << opt(c.dt) << "\n";
  o << "grid_spacing = " << opt(c.grid_spacing) << "\n";
  o << "band = " << fmt_number(c.band) << "\n";
  o << "max_candidates = " << c.max_candidates << "\n";
  o << "max_cells = " << c.max_cells << "\n";
  o << "threads = " << c.threads << "\n";
  o << "best_certificate = " << (c.best_certificate ? "true" : "false") << "\n";

  o << "\n[verify]\n";
  o << "orbit = " << quote(c.orbit) << "\n";
  o << "axiom_samples = " << c.axiom_samples << "\n";

  o << "\n[recurrence]\n";
  o << "rho = " << fmt_number(c.rho) << "\n";
  o << "delta = " << fmt_number(c.graph_delta) << "\n";
  o << "T = " << fmt_number(c.graph_T) << "\n";
  o << "probes_per_box = " << c.probes_per_box << "\n";
  o << "horizon = " << fmt_number(c.horizon) << "\n";
  o << "eps_dense = " << fmt_number(c.eps_dense) << "\n";
  o << "starts = " << c.starts << "\n";
  o << "targets = " << c.targets << "\n";

  o << "\n[suspension]\n";
  o << "heights = " << list(c.heights) << "\n";
  o << "fiber_checks = " << c.fiber_checks << "\n";
  o << "discrete_trials = " << c.discrete_trials << "\n";
  o << "discrete_back = " << c.discrete_back << "\n";
  o << "discrete_forward = " << c.discrete_forward << "\n";
  o << "discrete_max_steps = " << c.discrete_max_steps << "\n";
  o << "min_agreement = " << fmt_number(c.min_agreement) << "\n";

  o << "\n[lorenz]\n";
  o << "return_times = " << fmt_number(c.return_times) << "\n";
  return o.str();
}

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json("auto");
  };
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  return ordered_json{
      {"operation", to_string(c.operation)},
      {"seed", c.seed},
      {"output", c.output},
      {"checks", c.checks},
      {"unknown_limit", c.unknown_limit},
      {"model", {{"name", c.model}, {"params", params}}},
      {"schedules", {{"eps", c.eps}, {"delta", c.delta}, {"T", c.T}}},
      {"sampling", {{"samples", c.samples}, {"points", c.points}}},
      {"pseudo_orbit",
       {{"trials", c.trials},
        {"duration_ratio", c.duration_ratio},
        {"back", c.back},
        {"forward", c.forward},
        {"adversarial", c.adversarial},
        {"adversarial_back", c.adversarial_back},
        {"adversarial_max_steps", c.adversarial_max_steps},
        {"adversarial_extra_steps", c.adversarial_extra_steps},
        {"adversarial_stall_factor", c.adversarial_stall_factor},
        {"forward_only", c.forward_only}}},
      {"search",
       {{"dt", opt(c.dt)},
        {"grid_spacing", opt(c.grid_spacing)},
        {"band", c.band},
        {"max_candidates", c.max_candidates},
        {"max_cells", c.max_cells},
        {"threads", c.threads},
        {"best_certificate", c.best_certificate}}},
      {"verify", {{"orbit", c.orbit}, {"axiom_samples", c.axiom_samples}}},
      {"recurrence",
       {{"rho", c.rho},
        {"delta", c.graph_delta},
        {"T", c.graph_T},
        {"probes_per_box", c.probes_per_box},
        {"horizon", c.horizon},
        {"eps_dense", c.eps_dense},
        {"starts", c.starts},
        {"targets", c.targets}}},
      {"suspension",
       {{"heights", c.heights},
        {"fiber_checks", c.fiber_checks},
        {"discrete_trials", c.discrete_trials},
        {"discrete_back", c.discrete_back},
        {"discrete_forward", c.discrete_forward},
        {"discrete_max_steps", c.discrete_max_steps},
        {"min_agreement", c.min_agreement}}},
      {"lorenz", {{"return_times", c.return_times}}},
  };
}

}  // namespace shadowlab::cli
