#pragma once

#include "visc/diagnostics.hpp"
#include "visc/experiment/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace visc::experiment {

inline constexpr const char* kCodeVersion = "visc 0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitDivergence = 2,
  kExitConfig = 3,
  kExitIo = 4,
};

/// Radius around the moving hat edges used for localisation statistics.
inline constexpr double kLocalisationRadius = 0.05;
/// Per-step entropy increases above this fraction of S^0 are reported as warnings.
inline constexpr double kEntropyWarningFraction = 1e-6;

/// Statistics derived from a (possibly partial) trajectory. Both the producing
/// command and `analyze` go through this function.
nlohmann::ordered_json summarize(const ExperimentConfig& config, const Trajectory& traj);

int cmd_run(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
            std::ostream& err);
int cmd_train(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log,
              std::ostream& err);
int cmd_analyze(const std::filesystem::path& run_dir, std::ostream& log, std::ostream& err);
int cmd_reproduce(const std::string& preset, const std::filesystem::path& out_dir, std::ostream& log,
                  std::ostream& err);

}  // namespace visc::experiment
