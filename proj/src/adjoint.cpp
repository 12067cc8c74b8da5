#include "visc/adjoint.hpp"

namespace visc {

ExactProvider exact_provider(const InitialProfile& profile, const SchemeConfig& cfg) {
  return [profile, cfg](Index step) {
    return exact_solution(profile, cfg.grid, cfg.c, static_cast<double>(step) * cfg.dt);
  };
}

Eigen::VectorXd loss_coefficients(const LossSpec& spec, Index n_steps, Index n_cells) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n_steps + 1);
  if (n_steps == 0) return alpha;
  const bool mean = spec.normalization == LossSpec::Normalization::mean;
  if (spec.mode == LossSpec::Mode::instantaneous) {
    alpha[n_steps] = mean ? 1.0 / static_cast<double>(n_cells) : 1.0;
    return alpha;
  }
  if (!spec.weights.empty() && static_cast<Index>(spec.weights.size()) != n_steps)
    throw std::invalid_argument("LossSpec: weights must have one entry per step");
  const double scale = mean ? 1.0 / (static_cast<double>(n_cells) * static_cast<double>(n_steps)) : 1.0;
  for (Index n = 1; n <= n_steps; ++n) {
    const double w = spec.weights.empty() ? 1.0 : spec.weights[n - 1];
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("LossSpec: weights must be >= 0");
    alpha[n] = scale * w;
  }
  return alpha;
}

double instantaneous_loss(const CellField& u_next, const CellField& exact_next) {
  if (u_next.size() != exact_next.size()) throw std::invalid_argument("instantaneous_loss: shape mismatch");
  return (u_next - exact_next).squaredNorm() / static_cast<double>(u_next.size());
}

double loss_value(const Trajectory& traj, const ExactProvider& exact, const LossSpec& spec) {
  if (!traj.states().allFinite()) throw DivergenceError("loss_value: trajectory is not finite", traj.n_steps());
  if (spec.mode == LossSpec::Mode::instantaneous && traj.n_steps() == 0)
    throw std::invalid_argument("loss_value: instantaneous mode needs at least one step");
  const Eigen::VectorXd alpha = loss_coefficients(spec, traj.n_steps(), traj.config().n_cells());
  double loss = 0.0;
  for (Index n = 1; n <= traj.n_steps(); ++n) {
    if (alpha[n] == 0.0) continue;
    loss += alpha[n] * (traj.state(n) - exact(n)).squaredNorm();
  }
  return loss;
}

FaceViscosity contract_mu_sensitivity(const CellField& u, const CellField& lambda, const SchemeConfig& cfg) {
  const Index n = cfg.n_cells();
  const double k = cfg.viscous_factor();
  FaceViscosity g(n);
  for (Index f = 0; f < n; ++f) {
    const Index r = f + 1 == n ? 0 : f + 1;
    g[f] = k * (u[r] - u[f]) * (lambda[f] - lambda[r]);
  }
  return g;
}

FaceViscosity grad_mu_instantaneous(const CellField& u, const CellField& exact_next, const FaceViscosity& mu,
                                    const SchemeConfig& cfg) {
  const CellField next = ftcs_apply(u, mu, cfg);
  const CellField r = (2.0 / static_cast<double>(cfg.n_cells())) * (next - exact_next);
  return contract_mu_sensitivity(u, r, cfg);
}

GlobalEvaluation evaluate_global(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                                 const ExactProvider& exact, const LossSpec& spec, const SimulateOptions& options) {
  const Index steps = mu_st.rows();
  const Index n = cfg.n_cells();
  if (mu_st.cols() != n) throw std::invalid_argument("evaluate_global: mu width != n_cells");

  Trajectory traj = simulate(u0, Stepper{Scheme::ftcs_mu, space_time_mu(mu_st)}, steps, cfg, options);
  const Eigen::VectorXd alpha = loss_coefficients(spec, steps, n);

  SpaceTimeField residual(steps + 1, n);
  residual.row(0).setZero();
  double loss = 0.0;
  for (Index s = 1; s <= steps; ++s) {
    if (alpha[s] == 0.0) {
      residual.row(s).setZero();
      continue;
    }
    const CellField diff = traj.state(s) - exact(s);
    loss += alpha[s] * diff.squaredNorm();
    residual.row(s) = (2.0 * alpha[s]) * diff.transpose();
  }

  SpaceTimeField lambda(steps + 1, n);
  SpaceTimeViscosity grad(steps, n);
  lambda.row(steps) = residual.row(steps);
  for (Index s = steps - 1; s >= 0; --s) {
    const CellField next_lambda = lambda.row(s + 1).transpose();
    const FaceViscosity mu = mu_st.row(s).transpose();
    grad.row(s) = contract_mu_sensitivity(traj.state(s), next_lambda, cfg).transpose();
    lambda.row(s) = ftcs_apply_transpose(next_lambda, mu, cfg).transpose() + residual.row(s);
  }
  return GlobalEvaluation{loss, std::move(grad), std::move(lambda), std::move(traj)};
}

SpaceTimeViscosity grad_mu_global(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                                  const ExactProvider& exact, const LossSpec& spec) {
  return evaluate_global(u0, mu_st, cfg, exact, spec).gradient;
}

double global_loss(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                   const ExactProvider& exact, const LossSpec& spec, const SimulateOptions& options) {
  const Trajectory traj = simulate(u0, Stepper{Scheme::ftcs_mu, space_time_mu(mu_st)}, mu_st.rows(), cfg, options);
  return loss_value(traj, exact, spec);
}

SpaceTimeViscosity fd_gradient(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                               const ExactProvider& exact, const LossSpec& spec, double relative_step) {
  if (!(relative_step > 0.0)) throw std::invalid_argument("fd_gradient: step must be > 0");
  SpaceTimeViscosity grad(mu_st.rows(), mu_st.cols());
  SpaceTimeViscosity probe = mu_st;
  for (Index s = 0; s < mu_st.rows(); ++s) {
    for (Index f = 0; f < mu_st.cols(); ++f) {
      const double base = mu_st(s, f);
      const double h = relative_step * std::max(1.0, std::abs(base));
      probe(s, f) = base + h;
      const double plus = global_loss(u0, probe, cfg, exact, spec);
      probe(s, f) = base - h;
      const double minus = global_loss(u0, probe, cfg, exact, spec);
      probe(s, f) = base;
      grad(s, f) = (plus - minus) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace visc
