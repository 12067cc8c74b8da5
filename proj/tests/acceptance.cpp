// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "visc/diagnostics.hpp"
#include "visc/experiment/commands.hpp"
#include "visc/experiment/config.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace visc;
using namespace visc::experiment;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

CellField random_field(std::mt19937_64& rng, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  CellField v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

double rel_gap(const CellField& a, const CellField& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared preset trainings, computed once.
struct PresetRun {
  ExperimentConfig config;
  TrainingReport report;
  double seconds;
};

PresetRun train_preset(ExperimentConfig config) {
  const SchemeConfig cfg = config.scheme_config();
  const ExactProvider exact = exact_provider(config.initial_condition, cfg);
  const auto start = Clock::now();
  TrainingReport report = train_per_step(exact(0), config.n_steps(), cfg, config.training->optimizer, exact);
  return {config, std::move(report), seconds_since(start)};
}

const PresetRun& paper_hat() {
  static const PresetRun run = train_preset(preset_config("paper-hat"));
  return run;
}

Outcome adjoint_correctness() {
  Outcome out;
  const auto start = Clock::now();
  const SchemeConfig cfg(Grid1D(16, 1.0), 1.0, 0.00625);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const CellField u0 = random_field(rng, 16, -1.0, 1.0);
    SpaceTimeViscosity mu(5, 16);
    for (Index s = 0; s < 5; ++s) mu.row(s) = random_field(rng, 16, -5e-3, 9.5e-2).transpose();
    std::vector<CellField> targets;
    for (Index s = 0; s <= 5; ++s) targets.push_back(random_field(rng, 16, -1.0, 1.0));
    const ExactProvider exact = [&](Index s) { return targets[static_cast<std::size_t>(s)]; };
    const SpaceTimeViscosity g = grad_mu_global(u0, mu, cfg, exact, LossSpec{});
    const SpaceTimeViscosity fd = fd_gradient(u0, mu, cfg, exact, LossSpec{}, 1e-6);
    worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(start);
  out.require(worst < 1e-6, "max rel err " + num(worst) + " < 1e-6");
  out.require(t < 5.0, "runtime " + num(t) + " s < 5 s");
  return out;
}

Outcome scheme_equivalence() {
  Outcome out;
  const SchemeConfig cfg(Grid1D(100, 1.0), 1.0, 1e-3);
  const FaceViscosity mu_up = FaceViscosity::Constant(100, cfg.c * cfg.dx() / 2.0);
  const FaceViscosity mu_lw = FaceViscosity::Constant(100, cfg.c * cfg.c * cfg.dt / 2.0);
  std::mt19937_64 rng(2024);
  double up = 0.0, lw = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CellField u = random_field(rng, 100, -1.0, 1.0);
    up = std::max(up, rel_gap(ftcs_step(u, mu_up, cfg), upwind_step(u, cfg)));
    lw = std::max(lw, rel_gap(ftcs_step(u, mu_lw, cfg), lax_wendroff_step(u, cfg)));
  }
  out.require(up < 1e-13, "upwind " + num(up) + " < 1e-13");
  out.require(lw < 1e-13, "lax_wendroff " + num(lw) + " < 1e-13");
  return out;
}

Outcome ftcs_instability() {
  Outcome out;
  const auto start = Clock::now();
  const SchemeConfig cfg(Grid1D(100, 1.0), 1.0, 1e-3);
  const CellField u0 = exact_solution(SineProfile{}, cfg.grid, cfg.c, 0.0);
  const Trajectory traj = simulate(u0, Stepper{Scheme::ftcs_bare, {}}, 1000, cfg);
  bool increasing = true;
  for (Index n = 0; n < 1000; ++n) increasing = increasing && traj.state(n + 1).norm() > traj.state(n).norm();
  bool amplified = true;
  double min_excess = INFINITY;
  for (int k = 0; k < 512; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 512.0;
    if (k == 0 || k == 256) continue;  // sin(theta) == 0
    const double g = std::abs(amplification_factor(theta, cfg.cfl(), 0.0));
    min_excess = std::min(min_excess, g - 1.0);
    amplified = amplified && g > 1.0;
  }
  const double t = seconds_since(start);
  out.require(increasing, "L2 strictly increasing over 1000 steps (" + num(traj.state(0).norm()) + " -> " +
                              num(traj.final_state().norm()) + ")");
  out.require(amplified, "|G| > 1 on the sweep, min excess " + num(min_excess));
  out.require(t < 1.0, "runtime " + num(t) + " s < 1 s");
  return out;
}

Outcome hat_preset_training() {
  Outcome out;
  const PresetRun& run = paper_hat();
  const SchemeConfig cfg = run.config.scheme_config();
  const ExactProvider exact = exact_provider(run.config.initial_condition, cfg);
  const Trajectory upwind = simulate(exact(0), Stepper{Scheme::upwind, {}}, run.config.n_steps(), cfg);
  const double mse_up = mse(upwind.final_state(), exact(run.config.n_steps()));
  const auto& traj = run.report.trajectory;
  const double mse_learned = mse(traj.final_state(), exact(traj.n_steps()));
  const double max_u = traj.states().cwiseAbs().maxCoeff();
  out.require(run.report.divergence_events == 0 && !run.report.halted && traj.n_steps() == 150,
              "150 steps, divergence events " + std::to_string(run.report.divergence_events));
  out.require(max_u <= 2.0, "max|u| " + num(max_u) + " <= 2");
  out.require(mse_learned < mse_up, "mse " + num(mse_learned) + " < upwind " + num(mse_up));
  out.require(run.seconds < 60.0, "runtime " + num(run.seconds) + " s < 60 s");
  return out;
}

Outcome sign_indefiniteness() {
  Outcome out;
  const PresetRun& run = paper_hat();
  const auto& opt = run.config.training->optimizer;
  const MuStats s = mu_stats(run.report.final_mu, run.config.scheme_config(),
                             std::get<HatProfile>(run.config.initial_condition), kLocalisationRadius);
  out.require(s.min < 0.0 && s.max > 0.0, "min " + num(s.min) + " < 0 < max " + num(s.max));
  out.require(s.min >= opt.mu_min && s.max <= opt.mu_max, "within [" + num(opt.mu_min) + ", " + num(opt.mu_max) + "]");
  out.require(s.negative_mass_near_discontinuity > 0.5,
              "negative mass near edges " + num(s.negative_mass_near_discontinuity) + " > 0.5");
  return out;
}

Outcome entropy() {
  Outcome out;
  const EntropyReport r = entropy_report(paper_hat().report.trajectory);
  const auto warnings = r.increases_above(kEntropyWarningFraction * r.initial());
  out.require(r.final() <= r.initial(), "S_T " + num(r.final()) + " <= S_0 " + num(r.initial()));
  out.detail += "; " + std::to_string(r.per_step_delta.size()) + " per-step deltas, " +
                std::to_string(warnings.size()) + " warning steps";
  if (!warnings.empty()) {
    std::fprintf(stderr, "warning: entropy rose by more than %g S0 at steps:", kEntropyWarningFraction);
    for (Index s : warnings) std::fprintf(stderr, " %ld", static_cast<long>(s));
    std::fprintf(stderr, "\n");
  }
  return out;
}

Outcome positivity_comparison() {
  Outcome out;
  ExperimentConfig signed_cfg = preset_config("sine-smooth");
  ExperimentConfig nonneg_cfg = signed_cfg;
  nonneg_cfg.training->optimizer.mu_min = 0.0;
  const PresetRun s = train_preset(signed_cfg);
  const PresetRun n = train_preset(nonneg_cfg);
  const double ms = s.report.trajectory.final_state().cwiseAbs().maxCoeff();
  const double mn = n.report.trajectory.final_state().cwiseAbs().maxCoeff();
  out.require(s.report.trajectory.n_steps() == 150 && n.report.trajectory.n_steps() == 150, "both runs complete");
  out.require(mn < ms, "max|u|_T nonneg " + num(mn) + " < signed " + num(ms));
  return out;
}

Outcome conservation() {
  Outcome out;
  const PresetRun& run = paper_hat();
  const SchemeConfig cfg = run.config.scheme_config();
  const auto& traj = run.report.trajectory;
  const double m0 = traj.state(0).sum() * cfg.dx();
  double drift = 0.0;
  for (Index n = 1; n <= traj.n_steps(); ++n) drift = std::max(drift, std::abs(traj.state(n).sum() * cfg.dx() - m0));
  out.require(drift / std::abs(m0) < 1e-12, "mass drift " + num(drift / std::abs(m0)) + " < 1e-12 over 150 steps");

  const CellField K = CellField::Constant(100, 0.7);
  std::mt19937_64 rng(8);
  const FaceViscosity mu = random_field(rng, 100, -5e-3, 9.5e-2);
  double worst = 0.0;
  for (const CellField& v : {ftcs_step(K, mu, cfg), upwind_step(K, cfg), lax_wendroff_step(K, cfg),
                             ftcs_bare_step(K, cfg)})
    worst = std::max(worst, (v - K).cwiseAbs().maxCoeff() / 0.7);
  out.require(worst < 1e-14, "constant states preserved, max rel dev " + num(worst));
  return out;
}

Outcome global_vs_constant() {
  Outcome out;
  const SchemeConfig cfg(Grid1D(16, 1.0), 1.0, 0.00625);
  const ExactProvider exact = exact_provider(HatProfile{}, cfg);
  const Index steps = 20;
  OptimizerConfig opt;
  opt.learning_rate = 0.1;
  opt.n_iters = 200;
  double best_const = INFINITY;
  double best_mu = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double m = opt.mu_min + (opt.mu_max - opt.mu_min) * k / 199.0;
    const double l = global_loss(exact(0), SpaceTimeViscosity::Constant(steps, 16, m), cfg, exact, LossSpec{});
    if (l < best_const) {
      best_const = l;
      best_mu = m;
    }
  }
  const TrainingReport r = train_global(exact(0), steps, cfg, opt, exact);
  const double learned = r.best_loss_history.back();
  out.require(learned < best_const,
              "global " + num(learned) + " < best constant " + num(best_const) + " (mu " + num(best_mu) + ")");
  return out;
}

Outcome determinism_round_trip() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / ("visc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  ExperimentConfig config = preset_config("paper-hat");
  config.training->optimizer.seed = 11;
  std::ostringstream log, err;
  const int a = cmd_train(config, root / "a", log, err);
  const int b = cmd_train(config, root / "b", log, err);
  out.require(a == kExitOk && b == kExitOk, "two train runs exit 0");
  int csvs = 0;
  bool identical = true;
  for (const auto& entry : fs::directory_iterator(root / "a"))
    if (entry.path().extension() == ".csv") {
      ++csvs;
      identical = identical && slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
    }
  out.require(identical && csvs > 0, std::to_string(csvs) + " csv files byte-identical");
  const int an = cmd_analyze(root / "a", log, err);
  bool round_trip = false;
  if (fs::exists(root / "a" / "analysis.json")) {
    const json analysis = json::parse(slurp(root / "a" / "analysis.json"));
    int rows = 0;
    round_trip = true;
    for (const auto& row : analysis["checks"])
      if (row["check"].get<std::string>().rfind("roundtrip", 0) == 0) {
        ++rows;
        round_trip = round_trip && row["verdict"] == "PASS";
      }
    round_trip = round_trip && rows > 0;
  }
  out.require(an == kExitOk && round_trip, "analyze reproduces summary statistics within 1e-12");
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"adjoint gradient matches finite differences", adjoint_correctness},
      {"upwind / lax-wendroff equivalence", scheme_equivalence},
      {"bare ftcs instability", ftcs_instability},
      {"paper-hat training beats upwind", hat_preset_training},
      {"sign-indefinite, localised viscosity", sign_indefiniteness},
      {"entropy non-increasing", entropy},
      {"non-negative bounds decay smooth extrema", positivity_comparison},
      {"conservation and constant states", conservation},
      {"global training beats best constant viscosity", global_vs_constant},
      {"determinism and analyze round-trip", determinism_round_trip},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%-4s %2zu  %-46s %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
