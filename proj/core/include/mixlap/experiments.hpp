#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mixlap/config.hpp"

namespace mixlap {

struct RunOutcome {
  // 0 when every required check passed, 1 otherwise
  int exit_code = 0;
  std::filesystem::path report;
  std::vector<std::filesystem::path> files;  // report included
  std::string summary;                       // one line per headline result
};

// Resolves and validates the config, runs the experiment and writes
// report.json plus CSV tables into output_dir. Outputs depend only on the
// resolved config (seed included). Throws ConfigError for invalid input.
RunOutcome run_experiment(const ExperimentConfig& config);

// Current version of the JSON report layout.
inline constexpr int kReportSchemaVersion = 1;

}  // namespace mixlap
