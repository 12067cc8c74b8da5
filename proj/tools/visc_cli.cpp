// Command-line harness: run, train, analyze, reproduce.

#include "visc/experiment/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace fs = std::filesystem;
using namespace visc::experiment;

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig resolve_config(const Options& opt) {
  if (!opt.config_path.empty() && !opt.preset.empty()) throw ConfigError("give either --config or --preset, not both");
  ExperimentConfig cfg;
  if (!opt.preset.empty())
    cfg = preset_config(opt.preset);
  else if (!opt.config_path.empty())
    cfg = load_config(opt.config_path);
  else
    throw ConfigError("missing --config PATH (or --preset NAME)");
  if (opt.seed && cfg.training) cfg.training->optimizer.seed = *opt.seed;
  return cfg;
}

// --out wins, then VISC_OUTPUT_DIR, then the config's outputs.directory.
fs::path resolve_out(const Options& opt, const std::string& fallback) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("VISC_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned artificial-viscosity closures for FTCS linear advection"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "Training seed override");
  };

  auto* run = app.add_subcommand("run", "Simulate one scheme and write CSV outputs");
  run->add_option("--config", opt.config_path, "Experiment config (YAML)");
  run->add_option("--preset", opt.preset, "Use a named preset instead of a config file");
  add_common(run);

  auto* train = app.add_subcommand("train", "Train a viscosity closure and write CSV outputs");
  train->add_option("--config", opt.config_path, "Experiment config (YAML)");
  train->add_option("--preset", opt.preset, "Use a named preset instead of a config file");
  add_common(train);

  auto* analyze = app.add_subcommand("analyze", "Recompute diagnostics for a run directory");
  std::string analyze_dir;
  analyze->add_option("dir", analyze_dir, "Run directory");
  add_common(analyze);

  auto* reproduce = app.add_subcommand("reproduce", "Run a named preset with baselines and compare");
  reproduce->add_option("--preset", opt.preset, "paper-hat | paper-hat-nonneg | sine-smooth")->required();
  add_common(reproduce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (run->parsed()) {
    return guarded([&] {
      const auto cfg = resolve_config(opt);
      return cmd_run(cfg, resolve_out(opt, cfg.outputs.directory), std::cout, std::cerr);
    });
  }
  if (train->parsed()) {
    return guarded([&] {
      const auto cfg = resolve_config(opt);
      return cmd_train(cfg, resolve_out(opt, cfg.outputs.directory), std::cout, std::cerr);
    });
  }
  if (analyze->parsed()) {
    const fs::path dir = !analyze_dir.empty() ? fs::path(analyze_dir) : resolve_out(opt, "");
    if (dir.empty()) {
      std::cerr << "analyze: give the run directory\n";
      return kExitConfig;
    }
    return cmd_analyze(dir, std::cout, std::cerr);
  }
  return guarded([&] {
    if (!is_preset(opt.preset)) throw ConfigError("unknown preset '" + opt.preset + "'");
    return cmd_reproduce(opt.preset, resolve_out(opt, "reproduce_" + opt.preset), std::cout, std::cerr);
  });
}
