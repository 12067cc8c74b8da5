#include "visc/optimizer.hpp"

#include <algorithm>
#include <limits>

namespace visc {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("OptimizerConfig: learning_rate must be > 0");
  if (n_iters < 1) throw std::invalid_argument("OptimizerConfig: n_iters must be >= 1");
  if (!std::isfinite(mu_min) || !std::isfinite(mu_max) || !(mu_min <= mu_max))
    throw std::invalid_argument("OptimizerConfig: need finite mu_min <= mu_max");
  if (!(l2_penalty >= 0.0) || !(smooth_penalty >= 0.0))
    throw std::invalid_argument("OptimizerConfig: penalties must be >= 0");
  if (init_mu && !(*init_mu >= mu_min && *init_mu <= mu_max))
    throw std::invalid_argument("OptimizerConfig: init_mu outside [mu_min, mu_max]");
}

double OptimizerConfig::resolved_init_mu(const SchemeConfig& cfg) const {
  if (init_mu) return *init_mu;
  return std::clamp(cfg.upwind_viscosity(), mu_min, mu_max);
}

double regularizer_value(const FaceViscosity& mu, const OptimizerConfig& opt) {
  double value = 0.0;
  if (opt.l2_penalty > 0.0) value += opt.l2_penalty * mu.squaredNorm();
  if (opt.smooth_penalty > 0.0) {
    const Index n = mu.size();
    double s = 0.0;
    for (Index f = 0; f < n; ++f) {
      const double d = mu[(f + 1) % n] - mu[f];
      s += d * d;
    }
    value += opt.smooth_penalty * s;
  }
  return value;
}

FaceViscosity regularizer_gradient(const FaceViscosity& mu, const OptimizerConfig& opt) {
  const Index n = mu.size();
  FaceViscosity g = FaceViscosity::Zero(n);
  if (opt.l2_penalty > 0.0) g += 2.0 * opt.l2_penalty * mu;
  if (opt.smooth_penalty > 0.0) {
    for (Index f = 0; f < n; ++f) {
      const Index l = f == 0 ? n - 1 : f - 1;
      const Index r = f + 1 == n ? 0 : f + 1;
      g[f] += 2.0 * opt.smooth_penalty * (2.0 * mu[f] - mu[l] - mu[r]);
    }
  }
  return g;
}

namespace {

bool has_regularizer(const OptimizerConfig& opt) { return opt.l2_penalty > 0.0 || opt.smooth_penalty > 0.0; }

double inf_norm(const auto& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Projected-gradient stationarity relative to the starting gradient.
bool stationary(double projected, double initial) { return projected <= 1e-6 * initial; }

std::vector<double> running_min(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = best = std::min(best, v[k]);
  return out;
}

}  // namespace

TrainingReport train_per_step(const CellField& u0, Index n_steps, const SchemeConfig& cfg, const OptimizerConfig& opt,
                              const ExactProvider& exact, const SimulateOptions& options) {
  opt.validate();
  if (n_steps < 0) throw std::invalid_argument("train_per_step: n_steps must be >= 0");
  if (u0.size() != cfg.n_cells()) throw std::invalid_argument("train_per_step: u0 length != n_cells");
  require_finite(u0, "train_per_step(u0)");

  const Index n = cfg.n_cells();
  const FaceViscosity init = FaceViscosity::Constant(n, opt.resolved_init_mu(cfg));
  const bool regularized = has_regularizer(opt);
  const double limit = options.guard_factor * u0.cwiseAbs().maxCoeff();

  SpaceTimeField states(n_steps + 1, n);
  states.row(0) = u0.transpose();
  SpaceTimeViscosity mu_st(n_steps, n);
  std::vector<double> losses;
  bool all_converged = true;
  int divergence_events = 0;
  Index completed = 0;

  CellField u = u0;
  FaceViscosity mu = init;
  for (Index step = 0; step < n_steps; ++step) {
    if (step > 0 && !opt.warm_start) mu = init;
    const CellField target = exact(step + 1);

    double best_obj = std::numeric_limits<double>::infinity();
    FaceViscosity best_mu = mu;
    double first_grad = 0.0;
    double last_projected = 0.0;
    for (int it = 0; it <= opt.n_iters; ++it) {
      const CellField next = ftcs_apply(u, mu, cfg);
      const CellField r = next - target;
      double obj = r.squaredNorm() / static_cast<double>(n);
      FaceViscosity g = contract_mu_sensitivity(u, (2.0 / static_cast<double>(n)) * r, cfg);
      if (regularized) {
        obj += regularizer_value(mu, opt);
        g += regularizer_gradient(mu, opt);
      }
      if (obj < best_obj) {
        best_obj = obj;
        best_mu = mu;
      }
      FaceViscosity stepped = project_bounds(mu - opt.learning_rate * g, opt.mu_min, opt.mu_max);
      last_projected = inf_norm(mu - stepped) / opt.learning_rate;
      if (it == 0) first_grad = last_projected;
      if (it < opt.n_iters) mu = std::move(stepped);
    }
    all_converged = all_converged && stationary(last_projected, first_grad);
    mu = best_mu;

    CellField next = ftcs_apply(u, mu, cfg);
    mu_st.row(step) = mu.transpose();
    losses.push_back(best_obj);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > limit) {
      ++divergence_events;
      break;
    }
    states.row(step + 1) = next.transpose();
    u = std::move(next);
    completed = step + 1;
  }

  if (n_steps == 0) losses.push_back(instantaneous_loss(u0, exact(0)));
  const bool halted = completed < n_steps;
  SpaceTimeViscosity mu_done = mu_st.topRows(completed);
  Trajectory traj(cfg, states.topRows(completed + 1), mu_done);
  TrainingReport report{std::move(mu_done), losses, running_min(losses), std::move(traj),
                        all_converged && !halted, halted, divergence_events};
  return report;
}

namespace {

struct Iterate {
  double objective;
  SpaceTimeViscosity gradient;
  Trajectory trajectory;
};

Iterate evaluate_with_penalty(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                              const OptimizerConfig& opt, const ExactProvider& exact, const LossSpec& spec,
                              const SimulateOptions& options) {
  GlobalEvaluation eval = evaluate_global(u0, mu_st, cfg, exact, spec, options);
  double objective = eval.loss;
  if (has_regularizer(opt)) {
    for (Index s = 0; s < mu_st.rows(); ++s) {
      const FaceViscosity row = mu_st.row(s).transpose();
      objective += regularizer_value(row, opt);
      eval.gradient.row(s) += regularizer_gradient(row, opt).transpose();
    }
  }
  return Iterate{objective, std::move(eval.gradient), std::move(eval.trajectory)};
}

}  // namespace

TrainingReport train_global(const CellField& u0, Index n_steps, const SchemeConfig& cfg, const OptimizerConfig& opt,
                            const ExactProvider& exact, const LossSpec& spec, const SimulateOptions& options) {
  opt.validate();
  if (n_steps < 0) throw std::invalid_argument("train_global: n_steps must be >= 0");
  constexpr int kMaxHalvings = 30;

  const Index n = cfg.n_cells();
  SpaceTimeViscosity mu = SpaceTimeViscosity::Constant(n_steps, n, opt.resolved_init_mu(cfg));

  int divergence_events = 0;
  Iterate current = [&] {
    try {
      return evaluate_with_penalty(u0, mu, cfg, opt, exact, spec, options);
    } catch (const DivergenceError& e) {
      if (!e.partial()) throw;
      // The starting point itself is unusable; report the partial run.
      const Trajectory& part = *e.partial();
      return Iterate{std::numeric_limits<double>::infinity(), SpaceTimeViscosity(), part};
    }
  }();
  if (!std::isfinite(current.objective)) {
    std::vector<double> hist{current.objective};
    SpaceTimeViscosity partial_mu = current.trajectory.viscosity_history().value_or(SpaceTimeViscosity());
    return TrainingReport{std::move(partial_mu), hist, hist, current.trajectory, false, true, 1};
  }

  std::vector<double> history{current.objective};
  SpaceTimeViscosity best_mu = mu;
  Trajectory best_traj = current.trajectory;
  double best_obj = current.objective;
  double lr = opt.learning_rate;
  const double first_grad =
      inf_norm(mu - project_bounds(mu - lr * current.gradient, opt.mu_min, opt.mu_max)) / lr;
  double last_projected = first_grad;
  bool halted = false;

  for (int it = 0; it < opt.n_iters; ++it) {
    bool accepted = false;
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
      SpaceTimeViscosity candidate = project_bounds(mu - lr * current.gradient, opt.mu_min, opt.mu_max);
      try {
        Iterate next = evaluate_with_penalty(u0, candidate, cfg, opt, exact, spec, options);
        mu = std::move(candidate);
        current = std::move(next);
        accepted = true;
        break;
      } catch (const DivergenceError&) {
        ++divergence_events;
        lr *= 0.5;
      }
    }
    if (!accepted) {
      halted = true;
      break;
    }
    history.push_back(current.objective);
    if (current.objective < best_obj) {
      best_obj = current.objective;
      best_mu = mu;
      best_traj = current.trajectory;
    }
    last_projected = inf_norm(mu - project_bounds(mu - lr * current.gradient, opt.mu_min, opt.mu_max)) / lr;
  }

  return TrainingReport{std::move(best_mu), history, running_min(history), std::move(best_traj),
                        !halted && stationary(last_projected, first_grad), halted, divergence_events};
}

}  // namespace visc
