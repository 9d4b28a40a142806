#include <gtest/gtest.h>

#include <sstream>

#include "artifacts.hpp"
#include "config.hpp"
#include "run.hpp"
#include "shadowlab/pseudo_orbit.hpp"

using namespace shadowlab;
using namespace shadowlab::cli;

namespace {

const char* kRotation = R"(
operation = "estimate-set"
seed = 7
output = "out"
checks = ["allPass", "nesting"]
[model]
name = "rotation"
[schedules]
eps = [0.1, 0.2]
delta = [0.05, 0.025]
[sampling]
samples = 6
[pseudo_orbit]
trials = 3
back = 3
forward = 3
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    out.push_back(f);
  }
  return out;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

}  // namespace

// ---- configuration

TEST(Config, DefaultsAreWrittenBack) {
  const auto c = parse_config(kRotation);
  const std::string text = emit_config(c);
  for (const char* key : {"[pseudo_orbit]", "[search]", "[recurrence]", "[suspension]",
                          "[lorenz]", "dt = \"auto\"", "band = 5.0", "max_cells = 50000000",
                          "unknown_limit = 0.5", "T = [1.0]"})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST(Config, NormalizedFormRoundTripsByteIdentically) {
  const std::vector<std::string> inputs{
      kRotation,
      R"(operation = "lorenz-falsify"
seed = 9223372036854775807
[model]
name = "geometric-lorenz"
[model.params]
c = 1.75
[schedules]
eps = [0.05, 0.1]
delta = [1e-3, 3.3333333333333335e-4]
T = [0.5, 1, 2.25]
[search]
dt = 0.01
grid_spacing = "auto"
[sampling]
points = [[0.1, 0.2, 1.0, 0.0]]
)",
      R"(operation = "verify"
seed = 0
output = "dir with \"quotes\"\\x"
[model]
name = "irrational-linear"
[model.params]
alpha = 0.1
)"};
  for (const auto& in : inputs) {
    const auto c = parse_config(in);
    const std::string once = emit_config(c);
    const std::string twice = emit_config(parse_config(once));
    EXPECT_EQ(once, twice);
    const auto back = parse_config(once);
    EXPECT_EQ(back.eps, c.eps);
    EXPECT_EQ(back.delta, c.delta);
    EXPECT_EQ(back.T, c.T);
    EXPECT_EQ(back.params, c.params);
    EXPECT_EQ(back.points, c.points);
    EXPECT_EQ(back.output, c.output);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.dt, c.dt);
  }
}

TEST(Config, ModelDefaultsAreFilledIn) {
  const auto c = parse_config(R"(operation = "verify"
seed = 1
[model]
name = "geometric-lorenz"
[model.params]
c = 1.7
)");
  EXPECT_EQ(c.params.at("c"), 1.7);
  EXPECT_EQ(c.params.at("lambda_u"), 1.0);
  EXPECT_EQ(c.params.size(), 7u);
  EXPECT_EQ(c.checks, default_checks(Operation::kVerify));
}

TEST(Config, PointedErrors) {
  const std::string head = "operation = \"estimate-set\"\nseed = 1\n[model]\nname = \"rotation\"\n";
  struct Case {
    std::string text;
    std::string expect;
  };
  const std::vector<Case> cases{
      {head + "[schedules]\neps = [0.2, 0.1]\ndelta = [0.1]\n",
       "cfg.toml:6: [schedules] eps: must be strictly increasing"},
      {head + "[schedules]\neps = [0.1]\ndelta = [0.01, 0.1]\n",
       "[schedules] delta: must be strictly decreasing"},
      {head + "[schedules]\neps = [0.1, -1]\ndelta = [0.1]\n", "entries must be > 0"},
      {head + "[schedules]\neps = [0.1]\ndelta = [\"x\"]\n", "expected a number"},
      {head + "[schedules]\ndelta = [0.1]\n", "eps: required by estimate-set"},
      {"operation = \"estimate-set\"\n[model]\nname = \"rotation\"\n", "seed: missing"},
      {"seed = 1\n[model]\nname = \"rotation\"\n", "operation: missing"},
      {"operation = \"shadow\"\nseed = 1\n", "unknown operation 'shadow'"},
      {"operation = \"verify\"\nseed = -1\n[model]\nname = \"rotation\"\n", "seed: must be >= 0"},
      {"operation = \"verify\"\nseed = 1\n[model]\nname = \"moebius\"\n", "unknown model"},
      {"operation = \"verify\"\nseed = 1\n[model]\nname = \"rotation\"\n[model.params]\nk = 1\n",
       "has no parameter 'k'"},
      {"operation = \"verify\"\nseed = 1\n[model]\nname = \"cantor-interval-identity\"\n"
       "[model.params]\nlevel = 2.5\n",
       "level must be an integer"},
      {"operation = \"verify\"\nseed = 1\nthreads = 2\n[model]\nname = \"rotation\"\n",
       "threads: unknown key"},
      {"operation = \"verify\"\nseed = 1\nchecks = [\"nesting\"]\n[model]\nname = \"rotation\"\n",
       "'nesting' is not a check of verify"},
      {"operation = \"verify\"\nseed = 1\nchecks = [\"allPass\"]\n[model]\nname = \"rotation\"\n",
       "allPass needs [verify] orbit"},
      {"operation = \"suspension-check\"\nseed = 1\n[model]\nname = \"rotation\"\n"
       "[schedules]\neps = [0.1]\ndelta = [0.01]\n",
       "needs a base-map model"},
      {"operation = \"lorenz-falsify\"\nseed = 1\n[model]\nname = \"rotation\"\n"
       "[schedules]\neps = [0.1]\ndelta = [0.01]\n",
       "needs geometric-lorenz"},
      {head + "[search]\ndt = \"fast\"\n", "[search] dt: expected a number"},
      {head + "[search]\nband = 0\n", "[search] band: must be > 0"},
      {head + "[schedules]\neps = [0.1]\ndelta = [0.01]\n[sampling]\npoints = [[0.5, 0.5]]\n",
       "has 2 coordinates"},
      {"operation = \"estimate-point\"\nseed = 1\n[model]\nname = \"rotation\"\n"
       "[schedules]\neps = [0.1]\ndelta = [0.01]\n",
       "estimate-point needs at least one point"},
      {head + "[suspension]\nheights = [0.5, 0.25]\n", "strictly increasing in [0, 1)"},
      {head + "[schedules\n", "cfg.toml:5:"},
  };
  for (const auto& c : cases) {
    const std::string msg = error_of(c.text);
    EXPECT_NE(msg.find(c.expect), std::string::npos) << "got: '" << msg << "'\nfor:\n" << c.text;
  }
}

// ---- certificates and CSV

TEST(Artifacts, CertificateJsonRoundTrip) {
  ShadowingCertificate cert;
  cert.y = Point{0.25};
  cert.h = Reparam({{-1.0, -0.9}, {0.0, 0.0}, {0.5, 0.55}}, 1.0, 0.9);
  cert.grid = {-3.0, 4.0, 0.05};
  cert.achieved_sup = 0.0123;
  SearchLog log;
  log.dt = 0.05;
  const auto j = certificate_json("rotation", {}, 0.1, cert, log, "w.csv");
  const CertificateFile f = parse_certificate(j.dump());
  EXPECT_EQ(f.model, "rotation");
  EXPECT_EQ(f.eps, 0.1);
  EXPECT_EQ(f.cert.y, cert.y);
  EXPECT_EQ(f.cert.h.anchors(), cert.h.anchors());
  EXPECT_EQ(f.cert.h.right_slope(), 0.9);
  EXPECT_EQ(f.cert.grid.step, 0.05);
  ASSERT_TRUE(f.max_step.has_value());
  EXPECT_EQ(*f.max_step, 0.05);
}

TEST(Artifacts, MalformedCertificatesAreRejected) {
  EXPECT_THROW(parse_certificate("{"), std::runtime_error);
  EXPECT_THROW(parse_certificate("{\"format\": \"other\"}"), std::runtime_error);
  EXPECT_THROW(parse_certificate(R"({"format": "shadowlab-certificate", "model": "rotation",
      "params": {}, "eps": 0.1, "y": [0.1],
      "h": {"anchors": [[1, 1]], "left_slope": 1, "right_slope": 1},
      "grid": {"start": 0, "end": 1, "step": 0.1}, "achieved_sup": 0})"),
               std::runtime_error);
}

TEST(Artifacts, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

// ---- runs

TEST(Run, RotationEstimateSetPassesWithReplayableCertificates) {
  const auto c = parse_config(kRotation);
  std::ostringstream log;
  const RunOutcome out = run_experiment(c, log);
  EXPECT_EQ(out.exit_code, kExitOk) << out.report.dump(2);
  const auto& files = out.files.files();
  const auto rows = csv_rows(files.at("results.csv"));
  ASSERT_EQ(rows.size(), 1u + 2 * 6);
  const auto& header = rows[0];
  const std::size_t status = column(header, "status"), cert = column(header, "certificate"),
                    wit = column(header, "witness"), eps = column(header, "eps");
  auto sys = make_flow("rotation");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][status], "PASS");
    ASSERT_TRUE(files.count(rows[i][cert])) << rows[i][cert];
    const CertificateFile f = parse_certificate(files.at(rows[i][cert]));
    std::istringstream orbit(files.at(rows[i][wit]));
    const PseudoOrbit P = read_csv(orbit);
    const auto r = check_certificate(*sys, P, std::stod(rows[i][eps]), f.cert, f.max_step);
    EXPECT_TRUE(r.ok) << "row " << i << " sup " << r.achieved_sup;
  }
  EXPECT_TRUE(out.report["checks"]["allPass"].get<bool>());
  EXPECT_EQ(out.report["config"]["seed"].get<std::uint64_t>(), 7u);
  EXPECT_TRUE(files.count("plotdata/sh_set.csv"));
  EXPECT_EQ(files.at("config.toml"), emit_config(c));
}

TEST(Run, ResultsAreDeterministic) {
  const auto c = parse_config(kRotation);
  std::ostringstream log;
  auto c1 = c;
  c1.threads = 1;
  const std::string a = run_experiment(c, log).files.files().at("results.csv");
  const std::string b = run_experiment(c1, log).files.files().at("results.csv");
  EXPECT_EQ(a, b);
}

TEST(Run, FailedCheckGivesExitOne) {
  std::string text = kRotation;
  const std::string checks = R"(["allPass", "nesting"])";
  text.replace(text.find(checks), checks.size(), R"(["allFail"])");
  const auto out = [&] {
    std::ostringstream log;
    return run_experiment(parse_config(text), log);
  }();
  EXPECT_EQ(out.exit_code, kExitCheckFailed);
  EXPECT_EQ(out.report["failed_checks"], nlohmann::ordered_json::array({"allFail"}));
}

TEST(Run, UnknownDominatedGivesExitThree) {
  const auto c = parse_config(R"(operation = "verify"
seed = 1
checks = ["allPass"]
[model]
name = "rotation"
[schedules]
eps = [0.05]
[search]
max_cells = 1
[verify]
orbit = "data/rotation-orbit.csv"
)");
  auto cc = c;
  cc.base_dir = SHADOWLAB_CONFIG_DIR;
  std::ostringstream log;
  const auto out = run_experiment(cc, log);
  EXPECT_EQ(out.exit_code, kExitUnknownDominated) << out.report.dump(2);
  EXPECT_EQ(out.report["counts"]["UNKNOWN"].get<int>(), 1);
}

TEST(Run, MissingOrbitFileIsAConfigError) {
  auto c = parse_config(R"(operation = "verify"
seed = 1
[model]
name = "rotation"
[schedules]
eps = [0.05]
[verify]
orbit = "does/not/exist.csv"
)");
  std::ostringstream log;
  EXPECT_THROW(run_experiment(c, log), ConfigError);
}

TEST(Run, ThreadCapFromEnvironment) {
  setenv("SHADOWLAB_THREADS", "2", 1);
  EXPECT_EQ(effective_threads(8), 2u);
  EXPECT_EQ(effective_threads(1), 1u);
  EXPECT_EQ(effective_threads(0), 0u);
  unsetenv("SHADOWLAB_THREADS");
  EXPECT_EQ(effective_threads(8), 8u);
}
