#include "visc/experiment/commands.hpp"

#include "visc/experiment/csv.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace visc::experiment {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": corrupt JSON (" + e.what() + ")");
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

bool plain_name(const std::string& name) {
  return !name.empty() && name.find('/') == std::string::npos && name != "." && name != "..";
}

/// Output directory with a file ledger; the manifest is written last.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory " + root_.string() + ": " + ec.message());
    clear_previous();
  }

  fs::path path(const std::string& name) const { return root_ / name; }
  const fs::path& root() const { return root_; }

  void add(const std::string& name, const std::string& role) { files_.push_back({{"path", name}, {"role", role}}); }

  void write_json(const std::string& name, const std::string& role, const json& value) {
    write_text_atomic(path(name), value.dump(2) + "\n");
    add(name, role);
  }

  void finalize(json manifest) {
    manifest["code_version"] = kCodeVersion;
    manifest["started_utc"] = started_;
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json files = files_;
    files.push_back({{"path", "manifest.json"}, {"role", "manifest"}});
    manifest["files"] = files;
    write_text_atomic(path("manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  void clear_previous() {
    const fs::path manifest = path("manifest.json");
    if (!fs::exists(manifest)) return;
    json old;
    try {
      old = read_json(manifest);
    } catch (const IoError&) {
      fs::remove(manifest);
      return;
    }
    fs::remove(manifest);
    if (!old.contains("files")) return;
    for (const auto& f : old["files"]) {
      const auto name = f.value("path", std::string());
      if (plain_name(name) && fs::is_regular_file(path(name))) fs::remove(path(name));
    }
  }

  fs::path root_;
  std::chrono::steady_clock::time_point start_;
  std::string started_ = utc_now();
  json files_ = json::array();
};

std::vector<double> level_times(const SchemeConfig& cfg, Index levels) {
  std::vector<double> t(static_cast<std::size_t>(levels));
  for (Index n = 0; n < levels; ++n) t[n] = static_cast<double>(n) * cfg.dt;
  return t;
}

std::vector<double> to_vector(const Eigen::Ref<const Eigen::VectorXd>& v) { return {v.data(), v.data() + v.size()}; }

double max_abs(const SpaceTimeField& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ExactProvider exact_for(const ExperimentConfig& config) {
  return exact_provider(config.initial_condition, config.scheme_config());
}

void write_trajectory_outputs(OutputDir& dir, const ExperimentConfig& config, const Trajectory& traj) {
  const SchemeConfig scfg = traj.config();
  const auto exact = exact_for(config);
  const Index levels = traj.n_steps() + 1;
  const auto times = level_times(scfg, levels);
  const CellField centers = scfg.grid.centers();

  if (config.outputs.solution) {
    write_space_time(dir.path("solution.csv"), times, centers, traj.states());
    dir.add("solution.csv", "solution space-time (rows t^n, columns cell centres)");
  }

  const CellField final_exact = exact(traj.n_steps());
  write_columns(dir.path("final_state.csv"), {"x", "u", "u_exact"},
                {to_vector(centers), to_vector(traj.final_state()), to_vector(final_exact)});
  dir.add("final_state.csv", "final numerical and exact state");

  if (config.outputs.error) {
    write_space_time(dir.path("error.csv"), times, centers, error_field(traj, exact));
    dir.add("error.csv", "pointwise error u - u_exact space-time");
  }

  const auto& history = traj.viscosity_history();
  if (config.outputs.entropy) {
    const EntropyReport report = entropy_report(traj, history.has_value());
    write_series(dir.path("entropy.csv"), "t,value", times, report.total_entropy);
    dir.add("entropy.csv", "total discrete entropy S^n");
    if (history) {
      write_series(dir.path("dissipation.csv"), "t,value", level_times(scfg, traj.n_steps()),
                   report.spatial_dissipation);
      dir.add("dissipation.csv", "spatial viscous dissipation D^n");
    }
  }

  if (history && config.outputs.mu) {
    write_space_time(dir.path("mu.csv"), level_times(scfg, traj.n_steps()), scfg.grid.faces(), *history);
    dir.add("mu.csv", "face viscosity space-time (rows t^n, columns face positions)");
  }
}

json manifest_base(const std::string& command, const ExperimentConfig& config, const std::string& status) {
  json m;
  m["command"] = command;
  m["status"] = status;
  m["seed"] = config.training ? config.training->optimizer.seed : 0;
  m["config"] = to_yaml(config);
  return m;
}

int report_exception(std::ostream& err, const std::exception_ptr& eptr) {
  try {
    std::rethrow_exception(eptr);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

ExperimentConfig with_directory(ExperimentConfig config, const fs::path& out_dir) {
  config.outputs.directory = out_dir.string();
  return config;
}

}  // namespace

json summarize(const ExperimentConfig& config, const Trajectory& traj) {
  const auto exact = exact_for(config);
  const SchemeConfig& scfg = traj.config();
  const double dx = scfg.dx();
  const Index M = traj.n_steps();
  const CellField u0 = traj.state(0);
  const CellField uT = traj.final_state();
  const CellField eT = exact(M);

  json s;
  s["n_steps"] = M;
  s["recorded_states"] = M + 1;
  s["t_final"] = traj.time(M);
  s["mse_final"] = mse(uT, eT);
  s["loss_global"] = M > 0 ? loss_value(traj, exact, LossSpec{}) : 0.0;
  s["max_abs_u"] = max_abs(traj.states());
  s["max_abs_u_final"] = uT.cwiseAbs().maxCoeff();
  s["max_u_final"] = uT.maxCoeff();
  s["l2_initial"] = std::sqrt(u0.squaredNorm() * dx);
  s["l2_final"] = std::sqrt(uT.squaredNorm() * dx);
  s["mass_initial"] = u0.sum() * dx;
  s["mass_final"] = uT.sum() * dx;
  s["total_variation_final"] = total_variation(uT);
  s["total_variation_exact_final"] = total_variation(eT);

  const auto& history = traj.viscosity_history();
  const EntropyReport ent = entropy_report(traj, history.has_value());
  const double tol = kEntropyWarningFraction * ent.initial();
  double max_increase = 0.0;
  for (double d : ent.per_step_delta) max_increase = std::max(max_increase, d);
  json e;
  e["initial"] = ent.initial();
  e["final"] = ent.final();
  e["non_increasing"] = ent.non_increasing_globally();
  e["max_step_increase"] = max_increase;
  e["warning_steps"] = ent.increases_above(tol).size();
  if (history) {
    double total = 0.0;
    for (double d : ent.spatial_dissipation) total += d;
    e["spatial_dissipation_total"] = total;
  }
  s["entropy"] = e;

  if (history && history->size() > 0) {
    MuStats ms;
    if (const auto* hat = std::get_if<HatProfile>(&config.initial_condition))
      ms = mu_stats(*history, scfg, *hat, kLocalisationRadius);
    else
      ms = mu_stats(*history);
    json m;
    m["min"] = ms.min;
    m["max"] = ms.max;
    m["fraction_negative"] = ms.fraction_negative;
    m["negative_mass_near_discontinuity"] = ms.negative_mass_near_discontinuity;
    m["steps_with_negative"] = ms.steps_with_negative;
    s["mu_stats"] = m;
  }
  return s;
}

int cmd_run(const ExperimentConfig& config_in, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig config = with_directory(config_in, out_dir);
    config.validate();
    const SchemeConfig scfg = config.scheme_config();
    const Index steps = config.n_steps();
    const CellField u0 = exact_for(config)(0);

    Stepper stepper{config.scheme, nullptr};
    if (config.scheme == Scheme::ftcs_mu) stepper.mu = constant_mu(scfg, config.run_mu());

    OutputDir dir(out_dir);
    bool diverged = false;
    Index divergence_step = -1;
    std::optional<Trajectory> traj;
    try {
      traj.emplace(simulate(u0, stepper, steps, scfg));
    } catch (const DivergenceError& e) {
      diverged = true;
      divergence_step = e.step();
      traj.emplace(*e.partial());
      err << "divergence: " << e.what() << '\n';
    }

    write_trajectory_outputs(dir, config, *traj);
    json summary;
    summary["command"] = "run";
    summary["scheme"] = to_string(config.scheme);
    summary["status"] = diverged ? "diverged" : "ok";
    summary["partial"] = diverged;
    summary["n_steps_requested"] = steps;
    if (diverged) summary["divergence_step"] = divergence_step;
    if (config.scheme == Scheme::ftcs_mu) summary["mu"] = config.run_mu();
    summary["statistics"] = summarize(config, *traj);
    dir.write_json("summary.json", "summary statistics", summary);
    dir.finalize(manifest_base("run", config, diverged ? "diverged" : "ok"));

    log << "run " << to_string(config.scheme) << ": " << traj->n_steps() << " steps, mse_final="
        << format_double(summary["statistics"]["mse_final"].get<double>()) << " -> " << out_dir.string() << '\n';
    return diverged ? kExitDivergence : kExitOk;
  } catch (...) {
    return report_exception(err, std::current_exception());
  }
}

int cmd_train(const ExperimentConfig& config_in, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig config = with_directory(config_in, out_dir);
    config.validate();
    if (!config.training) throw ConfigError("train: config has no training section");
    if (config.scheme != Scheme::ftcs_mu) throw ConfigError("train: scheme must be ftcs_mu");
    const SchemeConfig scfg = config.scheme_config();
    const Index steps = config.n_steps();
    const auto exact = exact_for(config);
    const CellField u0 = exact(0);
    const OptimizerConfig& opt = config.training->optimizer;

    OutputDir dir(out_dir);
    const TrainingReport report = config.training->mode == TrainingMode::per_step
                                      ? train_per_step(u0, steps, scfg, opt, exact)
                                      : train_global(u0, steps, scfg, opt, exact);
    const bool diverged = report.halted;

    write_trajectory_outputs(dir, config, report.trajectory);

    if (report.final_mu.rows() > 0) {
      const CellField last = report.final_mu.bottomRows(1).transpose();
      const double scale = last.cwiseAbs().maxCoeff();
      const CellField normalized = scale > 0.0 ? CellField(last / scale) : CellField(CellField::Zero(last.size()));
      write_columns(dir.path("mu_at_T.csv"), {"x", "mu", "mu_normalized"},
                    {to_vector(scfg.grid.faces()), to_vector(last), to_vector(normalized)});
      dir.add("mu_at_T.csv", "viscosity of the last step, raw and divided by max|mu|");
    }

    std::vector<double> iters(report.loss_history.size());
    for (std::size_t k = 0; k < iters.size(); ++k) iters[k] = static_cast<double>(k);
    write_series(dir.path("loss_history.csv"), "iter,value", iters, report.loss_history);
    dir.add("loss_history.csv",
            config.training->mode == TrainingMode::per_step ? "best instantaneous loss per time step"
                                                            : "global objective per accepted iterate");

    json summary;
    summary["command"] = "train";
    summary["scheme"] = to_string(config.scheme);
    summary["status"] = diverged ? "diverged" : "ok";
    summary["partial"] = diverged;
    summary["n_steps_requested"] = steps;
    json t;
    t["mode"] = to_string(config.training->mode);
    t["converged"] = report.converged;
    t["halted"] = report.halted;
    t["divergence_events"] = report.divergence_events;
    t["loss_last"] = report.loss_history.back();
    t["loss_best"] = report.best_loss_history.back();
    summary["training"] = t;
    summary["statistics"] = summarize(config, report.trajectory);
    dir.write_json("summary.json", "summary statistics", summary);
    dir.finalize(manifest_base("train", config, diverged ? "diverged" : "ok"));

    if (!report.converged && !diverged) err << "note: iteration budget used up before projected-gradient stationarity\n";
    if (diverged) err << "divergence: training halted after " << report.trajectory.n_steps() << " steps\n";
    log << "train " << to_string(config.training->mode) << ": " << report.trajectory.n_steps()
        << " steps, mse_final=" << format_double(summary["statistics"]["mse_final"].get<double>()) << " -> "
        << out_dir.string() << '\n';
    return diverged ? kExitDivergence : kExitOk;
  } catch (...) {
    return report_exception(err, std::current_exception());
  }
}

namespace {

struct CheckRow {
  std::string name;
  std::string value;
  std::string threshold;
  std::string verdict;  // PASS, FAIL or INFO
};

void compare_stats(const json& original, const json& recomputed, const std::string& prefix,
                   std::vector<CheckRow>& rows) {
  for (auto it = original.begin(); it != original.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!recomputed.contains(it.key())) {
      rows.push_back({"roundtrip " + key, "missing", "present", "FAIL"});
      continue;
    }
    const json& other = recomputed[it.key()];
    if (it->is_object()) {
      compare_stats(*it, other, key, rows);
    } else if (it->is_number()) {
      const double a = it->get<double>();
      const double b = other.get<double>();
      const double diff = std::abs(a - b);
      const bool ok = diff <= 1e-12 * std::max(1.0, std::abs(a));
      std::ostringstream v;
      v << std::scientific << std::setprecision(2) << diff;
      rows.push_back({"roundtrip " + key, v.str(), "1e-12", ok ? "PASS" : "FAIL"});
    } else {
      rows.push_back({"roundtrip " + key, other.dump(), it->dump(), *it == other ? "PASS" : "FAIL"});
    }
  }
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(3) << v;
  return ss.str();
}

double relative_gap(const CellField& a, const CellField& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  const double gap = (a - b).cwiseAbs().maxCoeff();
  return scale > 0.0 ? gap / scale : gap;
}

/// Worst relative gap between the stepper applied to each stored level and the next stored level.
template <typename Step>
double replay_gap(const SpaceTimeField& states, Step&& step) {
  double worst = 0.0;
  for (Index n = 0; n + 1 < states.rows(); ++n) {
    const CellField u = states.row(n).transpose();
    worst = std::max(worst, relative_gap(step(n, u), states.row(n + 1).transpose()));
  }
  return worst;
}

}  // namespace

int cmd_analyze(const fs::path& run_dir, std::ostream& log, std::ostream& err) {
  try {
    const fs::path manifest_path = run_dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw IoError("missing manifest: " + manifest_path.string());
    json manifest = read_json(manifest_path);
    if (!manifest.contains("config") || !manifest["config"].is_string())
      throw IoError("manifest has no config echo");
    const ExperimentConfig config = parse_config(manifest["config"].get<std::string>());
    const SchemeConfig scfg = config.scheme_config();
    const json summary = read_json(run_dir / "summary.json");

    const fs::path solution_path = run_dir / "solution.csv";
    if (!fs::exists(solution_path)) throw IoError("solution.csv was not recorded; nothing to analyze");
    const SpaceTimeTable solution = read_space_time(solution_path);
    if (solution.values.cols() != scfg.n_cells()) throw IoError("solution.csv: width does not match n_cells");
    if (solution.values.rows() < 1) throw IoError("solution.csv: no states");

    std::optional<SpaceTimeViscosity> history;
    if (fs::exists(run_dir / "mu.csv")) {
      SpaceTimeTable mu = read_space_time(run_dir / "mu.csv");
      if (mu.values.rows() != solution.values.rows() - 1 || mu.values.cols() != scfg.n_cells())
        throw IoError("mu.csv: shape does not match solution.csv");
      history = std::move(mu.values);
    }
    const Trajectory traj(scfg, solution.values, history);

    std::vector<CheckRow> rows;
    const json recomputed = summarize(config, traj);
    compare_stats(summary.at("statistics"), recomputed, "", rows);

    const double tol = 1e-13;
    const auto& states = traj.states();
    if (config.scheme == Scheme::upwind) {
      const FaceViscosity mu = FaceViscosity::Constant(scfg.n_cells(), scfg.upwind_viscosity());
      const double ident = replay_gap(states, [&](Index, const CellField& u) {
        return CellField(ftcs_apply(u, mu, scfg));
      });
      rows.push_back({"identity upwind == ftcs(mu=|c|dx/2)", sci(ident), "1e-13", ident <= tol ? "PASS" : "FAIL"});
    } else if (config.scheme == Scheme::lax_wendroff) {
      const FaceViscosity mu = FaceViscosity::Constant(scfg.n_cells(), scfg.lax_wendroff_viscosity());
      const double ident = replay_gap(states, [&](Index, const CellField& u) {
        return CellField(ftcs_apply(u, mu, scfg));
      });
      rows.push_back({"identity lax_wendroff == ftcs(mu=c^2 dt/2)", sci(ident), "1e-13",
                      ident <= tol ? "PASS" : "FAIL"});
    } else if (config.scheme == Scheme::ftcs_bare) {
      const double replay = replay_gap(states, [&](Index, const CellField& u) {
        return CellField(ftcs_apply(u, FaceViscosity::Zero(scfg.n_cells()), scfg));
      });
      rows.push_back({"replay ftcs(mu=0)", sci(replay), "1e-13", replay <= tol ? "PASS" : "FAIL"});
    } else if (history) {
      const double replay = replay_gap(states, [&](Index n, const CellField& u) {
        return CellField(ftcs_apply(u, FaceViscosity(history->row(n).transpose()), scfg));
      });
      rows.push_back({"replay ftcs with recorded mu", sci(replay), "1e-13", replay <= tol ? "PASS" : "FAIL"});
    }

    if (recomputed.contains("mu_stats")) {
      const double mmin = recomputed["mu_stats"]["min"].get<double>();
      rows.push_back({"report min mu < 0", sci(mmin), "< 0", mmin < 0.0 ? "yes" : "no"});
    }
    const auto& ent = recomputed["entropy"];
    rows.push_back({"report S_final <= S_0",
                    sci(ent["final"].get<double>()) + " vs " + sci(ent["initial"].get<double>()), "<=",
                    ent["non_increasing"].get<bool>() ? "yes" : "no"});
    if (summary.value("partial", false)) rows.push_back({"run status", "partial (diverged)", "complete", "INFO"});

    bool all_pass = true;
    json table = json::array();
    for (const auto& r : rows) {
      if (r.verdict == "FAIL") all_pass = false;
      table.push_back({{"check", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"verdict", r.verdict}});
    }
    json analysis;
    analysis["all_passed"] = all_pass;
    analysis["checks"] = table;
    analysis["statistics"] = recomputed;
    write_text_atomic(run_dir / "analysis.json", analysis.dump(2) + "\n");

    json files = json::array();
    for (const auto& f : manifest["files"]) {
      const auto name = f.value("path", std::string());
      if (name != "analysis.json" && name != "manifest.json") files.push_back(f);
    }
    files.push_back({{"path", "analysis.json"}, {"role", "analysis pass/fail table"}});
    files.push_back({{"path", "manifest.json"}, {"role", "manifest"}});
    manifest["files"] = files;
    write_text_atomic(manifest_path, manifest.dump(2) + "\n");

    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    for (const auto& r : rows)
      log << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::setw(6) << r.verdict << r.value
          << "  (" << r.threshold << ")\n";
    log << (all_pass ? "analysis: all checks passed" : "analysis: some checks FAILED") << '\n';
    return all_pass ? kExitOk : kExitCheckFailed;
  } catch (...) {
    return report_exception(err, std::current_exception());
  }
}

namespace {

ExperimentConfig baseline(ExperimentConfig config, Scheme scheme) {
  config.scheme = scheme;
  config.training.reset();
  config.mu.reset();
  return config;
}

ExperimentConfig with_lower_bound(ExperimentConfig config, double mu_min) {
  config.training->optimizer.mu_min = mu_min;
  return config;
}

}  // namespace

int cmd_reproduce(const std::string& preset, const fs::path& out_dir, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig base = preset_config(preset);
    OutputDir dir(out_dir);

    struct Member {
      std::string name;
      ExperimentConfig config;
      bool train;
    };
    std::vector<Member> members;
    const double signed_min = preset_config("paper-hat").training->optimizer.mu_min;
    if (preset == "paper-hat") {
      members.push_back({"learned", base, true});
    } else if (preset == "paper-hat-nonneg") {
      members.push_back({"learned", base, true});
      members.push_back({"learned_signed", with_lower_bound(base, signed_min), true});
    } else {
      members.push_back({"learned_signed", with_lower_bound(base, signed_min), true});
      members.push_back({"learned_nonneg", with_lower_bound(base, 0.0), true});
    }
    members.push_back({"upwind", baseline(base, Scheme::upwind), false});
    members.push_back({"lax_wendroff", baseline(base, Scheme::lax_wendroff), false});

    json comparison;
    comparison["preset"] = preset;
    json runs;
    int worst = kExitOk;
    for (const auto& m : members) {
      const fs::path sub = out_dir / m.name;
      const int code = m.train ? cmd_train(m.config, sub, log, err) : cmd_run(m.config, sub, log, err);
      if (code != kExitOk) worst = std::max(worst, code);
      if (code == kExitConfig || code == kExitIo) return code;
      const json summary = read_json(sub / "summary.json");
      json r;
      r["status"] = summary["status"];
      r["mse_final"] = summary["statistics"]["mse_final"];
      r["loss_global"] = summary["statistics"]["loss_global"];
      r["max_abs_u"] = summary["statistics"]["max_abs_u"];
      r["max_abs_u_final"] = summary["statistics"]["max_abs_u_final"];
      r["entropy_non_increasing"] = summary["statistics"]["entropy"]["non_increasing"];
      r["entropy_warning_steps"] = summary["statistics"]["entropy"]["warning_steps"];
      if (summary["statistics"].contains("mu_stats")) r["mu_stats"] = summary["statistics"]["mu_stats"];
      if (summary.contains("training")) r["training"] = summary["training"];
      runs[m.name] = r;
      dir.add(m.name + "/", "run directory (own manifest)");
    }
    comparison["runs"] = runs;

    std::vector<CheckRow> rows;
    auto check = [&](const std::string& name, double value, double threshold, bool ok, const std::string& rel) {
      rows.push_back({name, sci(value), rel + " " + sci(threshold), ok ? "PASS" : "FAIL"});
    };
    auto mse_of = [&](const std::string& n) { return runs[n]["mse_final"].get<double>(); };
    auto maxu_of = [&](const std::string& n) { return runs[n]["max_abs_u_final"].get<double>(); };
    const std::string main = preset == "sine-smooth" ? "learned_signed" : "learned";
    if (preset == "paper-hat-nonneg")
      rows.push_back({"mse(learned) vs mse(upwind)", sci(mse_of(main)), sci(mse_of("upwind")), "INFO"});
    else
      check("mse(" + main + ") < mse(upwind)", mse_of(main), mse_of("upwind"), mse_of(main) < mse_of("upwind"), "<");
    rows.push_back({"mse(lax_wendroff)", sci(mse_of("lax_wendroff")), "-", "INFO"});
    if (preset == "paper-hat") {
      const double mmin = runs["learned"]["mu_stats"]["min"].get<double>();
      check("min learned mu < 0", mmin, 0.0, mmin < 0.0, "<");
      const bool ent = runs["learned"]["entropy_non_increasing"].get<bool>();
      rows.push_back({"S_final <= S_0", ent ? "true" : "false", "true", ent ? "PASS" : "FAIL"});
      const double mx = runs["learned"]["max_abs_u"].get<double>();
      check("max|u| over run <= 2", mx, 2.0, mx <= 2.0, "<=");
    } else if (preset == "paper-hat-nonneg") {
      check("max|u|_T nonneg <= signed (hat plateau)", maxu_of("learned"), maxu_of("learned_signed"),
            maxu_of("learned") <= maxu_of("learned_signed"), "<=");
    } else {
      check("max|u|_T nonneg < signed (smooth extrema)", maxu_of("learned_nonneg"), maxu_of("learned_signed"),
            maxu_of("learned_nonneg") < maxu_of("learned_signed"), "<");
    }

    bool all_pass = true;
    json table = json::array();
    for (const auto& r : rows) {
      if (r.verdict == "FAIL") all_pass = false;
      table.push_back({{"check", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"verdict", r.verdict}});
    }
    comparison["checks"] = table;
    comparison["all_passed"] = all_pass;
    dir.write_json("comparison.json", "preset comparison summary", comparison);
    json manifest;
    manifest["command"] = "reproduce";
    manifest["preset"] = preset;
    manifest["status"] = worst == kExitOk ? "ok" : "diverged";
    manifest["seed"] = base.training->optimizer.seed;
    manifest["config"] = to_yaml(with_directory(base, out_dir));
    dir.finalize(manifest);

    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    log << "reproduce " << preset << ":\n";
    for (const auto& r : rows)
      log << "  " << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::setw(6) << r.verdict
          << r.value << "  (" << r.threshold << ")\n";
    if (worst != kExitOk) return worst;
    return all_pass ? kExitOk : kExitCheckFailed;
  } catch (...) {
    return report_exception(err, std::current_exception());
  }
}

}  // namespace visc::experiment
