#pragma once

#include <iosfwd>

#include "artifacts.hpp"
#include "config.hpp"

namespace shadowlab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitUnknownDominated = 3,
};

struct RunOutcome {
  int exit_code = kExitOk;
  nlohmann::ordered_json report;
  ArtifactSet files;  // paths relative to the output directory
};

/// Executes one experiment. Progress goes to `log`; nothing is written to
/// disk. Throws ConfigError for inputs that only turn out bad at run time
/// (e.g. an unreadable pseudo-orbit file).
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Thread count for the search: the configured value, capped by
/// SHADOWLAB_THREADS when that is set.
unsigned effective_threads(unsigned configured);

}  // namespace shadowlab::cli
