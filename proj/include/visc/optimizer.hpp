#pragma once

#include "visc/adjoint.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace visc {

struct OptimizerConfig {
  double learning_rate = 1e-2;
  int n_iters = 100;
  double mu_min = -5e-3;
  double mu_max = 9.5e-2;
  double l2_penalty = 0.0;
  double smooth_penalty = 0.0;
  /// Uniform starting viscosity. Unset means c dx / 2 clamped into the bounds.
  std::optional<double> init_mu;
  std::uint64_t seed = 0;
  /// Per-step mode: start step n from the optimum of step n-1.
  bool warm_start = true;

  void validate() const;
  double resolved_init_mu(const SchemeConfig& cfg) const;
};

struct TrainingReport {
  SpaceTimeViscosity final_mu;
  /// Per-step mode: best objective of each step. Global mode: objective of each accepted iterate.
  std::vector<double> loss_history;
  /// Running minimum of loss_history.
  std::vector<double> best_loss_history;
  Trajectory trajectory;
  bool converged = false;
  /// True when training stopped before covering the horizon (per-step) or ran out of step halvings (global).
  bool halted = false;
  int divergence_events = 0;
};

/// Entrywise clamp to [mu_min, mu_max]. Throws std::invalid_argument if mu_min > mu_max.
template <typename Derived>
typename Derived::PlainObject project_bounds(const Eigen::MatrixBase<Derived>& mu, double mu_min, double mu_max) {
  if (!(mu_min <= mu_max)) throw std::invalid_argument("project_bounds: mu_min > mu_max");
  using Scalar = typename Derived::Scalar;
  return typename Derived::PlainObject(mu.cwiseMax(Scalar(mu_min)).cwiseMin(Scalar(mu_max)));
}

/// l2 sum mu^2 + smooth sum_f (mu_{f+1} - mu_f)^2 (periodic).
double regularizer_value(const FaceViscosity& mu, const OptimizerConfig& opt);
/// 2 l2 mu + 2 smooth (2 mu_f - mu_{f-1} - mu_{f+1}).
FaceViscosity regularizer_gradient(const FaceViscosity& mu, const OptimizerConfig& opt);

/// Greedy training: each step's viscosity minimises the instantaneous error of
/// the next state, then the numerical state is advanced with it.
TrainingReport train_per_step(const CellField& u0, Index n_steps, const SchemeConfig& cfg, const OptimizerConfig& opt,
                              const ExactProvider& exact, const SimulateOptions& options = {});

/// Projected gradient descent on the whole space-time viscosity, using the
/// adjoint gradient of the global loss. Returns the best iterate.
TrainingReport train_global(const CellField& u0, Index n_steps, const SchemeConfig& cfg, const OptimizerConfig& opt,
                            const ExactProvider& exact, const LossSpec& spec = {},
                            const SimulateOptions& options = {});

}  // namespace visc
