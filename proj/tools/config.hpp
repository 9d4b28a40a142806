#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "shadowlab/models.hpp"

namespace shadowlab::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Operation {
  kVerify,
  kEstimatePoint,
  kEstimateSet,
  kRecurrence,
  kSuspensionCheck,
  kLorenzFalsify,
};

std::string to_string(Operation op);
Operation parse_operation(const std::string& s);

/// Named checks a run can be asked to enforce; the report carries one
/// boolean per requested check.
const std::vector<std::string>& available_checks(Operation op);
std::vector<std::string> default_checks(Operation op);

struct ExperimentConfig {
  Operation operation = Operation::kEstimateSet;
  std::uint64_t seed = 0;
  std::string output = "shadowlab-out";
  std::vector<std::string> checks;
  double unknown_limit = 0.5;  // exit 3 when more rows than this are UNKNOWN

  std::string model;
  ModelParams params;  // complete after normalization

  // schedules
  std::vector<double> eps;
  std::vector<double> delta;
  std::vector<double> T{1.0};  // minimal hop durations; hops lie in [T, T * duration_ratio]

  // sampling
  std::size_t samples = 20;
  std::vector<std::vector<double>> points;

  // pseudo-orbits
  std::size_t trials = 20;
  double duration_ratio = 2.0;
  long back = 6;
  long forward = 6;
  bool adversarial = true;
  long adversarial_back = 4;
  long adversarial_max_steps = 2000;
  long adversarial_extra_steps = 4;
  double adversarial_stall_factor = 4.0;
  bool forward_only = false;

  // search
  std::optional<double> dt;
  std::optional<double> grid_spacing;
  double band = 5.0;
  std::size_t max_candidates = 20000;
  std::size_t max_cells = 50'000'000;
  unsigned threads = 0;
  bool best_certificate = false;

  // verify
  std::string orbit;  // pseudo-orbit CSV, relative to the config file
  std::size_t axiom_samples = 200;

  // recurrence
  double rho = 0.005;
  double graph_delta = 0.01;
  double graph_T = 1.0;
  std::size_t probes_per_box = 8;
  double horizon = 1000.0;
  double eps_dense = 0.01;
  std::size_t starts = 20;
  std::size_t targets = 40;

  // suspension
  std::vector<double> heights{0.25, 0.5, 0.75};
  std::size_t fiber_checks = 4;
  std::size_t discrete_trials = 20;
  long discrete_back = 20;
  long discrete_forward = 20;
  long discrete_max_steps = 600;
  double min_agreement = 0.95;

  // lorenz
  double return_times = 30.0;

  /// Directory that relative paths in the file refer to (not serialized).
  std::filesystem::path base_dir;
};

/// Parses and validates; throws ConfigError with the offending key and line.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& file);

/// Canonical TOML: every key written, fixed order, shortest round-trip floats.
std::string emit_config(const ExperimentConfig& c);

/// Same content as a JSON document (for report.json).
nlohmann::ordered_json config_json(const ExperimentConfig& c);

}  // namespace shadowlab::cli
