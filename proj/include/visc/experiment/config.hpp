#pragma once

#include "visc/optimizer.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace visc::experiment {

/// Invalid or inconsistent configuration (exit code 3).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing, unreadable or corrupt files (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrainingMode { per_step, global };

std::string to_string(TrainingMode mode);

struct TrainingConfig {
  TrainingMode mode = TrainingMode::per_step;
  OptimizerConfig optimizer;
};

struct OutputConfig {
  std::string directory = "out";
  bool solution = true;
  bool error = true;
  bool entropy = true;
  bool mu = true;
};

struct ExperimentConfig {
  Scheme scheme = Scheme::ftcs_mu;
  Index n_cells = 100;
  double length = 1.0;
  double c = 1.0;
  double dt = 1e-3;
  double t_final = 0.15;
  InitialProfile initial_condition = HatProfile{};
  /// Constant face viscosity for untrained ftcs_mu runs; unset means c dx / 2.
  std::optional<double> mu;
  std::optional<TrainingConfig> training;
  OutputConfig outputs;

  /// Throws ConfigError.
  void validate() const;
  Index n_steps() const;
  SchemeConfig scheme_config() const;
  double run_mu() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Re-parseable echo; doubles keep 17 significant digits.
std::string to_yaml(const ExperimentConfig& config);

/// Named configurations: paper-hat, paper-hat-nonneg, sine-smooth.
ExperimentConfig preset_config(const std::string& name);
bool is_preset(const std::string& name);

}  // namespace visc::experiment
