#pragma once

#include "visc/schemes.hpp"

#include <vector>

namespace visc {

/// Reference solution at time level n (t = n dt).
using ExactProvider = std::function<CellField(Index step)>;

ExactProvider exact_provider(const InitialProfile& profile, const SchemeConfig& cfg);

struct LossSpec {
  enum class Mode { global, instantaneous };
  enum class Normalization { mean, sum };

  Mode mode = Mode::global;
  /// Per-step weights for steps 1..M; empty means uniform.
  std::vector<double> weights;
  Normalization normalization = Normalization::mean;
};

/// Coefficients alpha_n (n = 0..M) such that J = sum_n alpha_n |u^n - e^n|^2.
/// alpha_0 is always zero: the initial state does not depend on mu.
Eigen::VectorXd loss_coefficients(const LossSpec& spec, Index n_steps, Index n_cells);

/// Mean squared difference (1/N) sum (u - e)^2.
double instantaneous_loss(const CellField& u_next, const CellField& exact_next);

/// Global mode: (1/(N M)) sum_{n=1..M} w_n sum_i (u_i^n - e_i^n)^2 under mean normalization.
/// Instantaneous mode: the loss of the last step of the trajectory.
double loss_value(const Trajectory& traj, const ExactProvider& exact, const LossSpec& spec);

/// d/d mu_{i+1/2} of (1/N) |ftcs_step(u, mu) - exact_next|^2.
FaceViscosity grad_mu_instantaneous(const CellField& u, const CellField& exact_next, const FaceViscosity& mu,
                                    const SchemeConfig& cfg);

/// Contracts an adjoint vector against d(step)/d(mu) at state u:
/// g_f = (dt/dx^2)(u_{f+1} - u_f)(lambda_f - lambda_{f+1}).
FaceViscosity contract_mu_sensitivity(const CellField& u, const CellField& lambda, const SchemeConfig& cfg);

struct GlobalEvaluation {
  double loss = 0.0;
  SpaceTimeViscosity gradient;  // row n: dJ/d mu^n
  SpaceTimeField adjoint;       // row n: lambda^n, n = 0..M
  Trajectory trajectory;
};

/// One forward sweep recording states, one reverse sweep:
/// lambda^M = dJ/du^M, lambda^n = A(mu^n)^T lambda^{n+1} + dJ/du^n.
GlobalEvaluation evaluate_global(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                                 const ExactProvider& exact, const LossSpec& spec,
                                 const SimulateOptions& options = {});

SpaceTimeViscosity grad_mu_global(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                                  const ExactProvider& exact, const LossSpec& spec);

/// Loss of the trajectory driven by mu_st.
double global_loss(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                   const ExactProvider& exact, const LossSpec& spec, const SimulateOptions& options = {});

/// Central differences with per-coordinate step relative_step * max(1, |mu|).
/// Costs two full simulations per coordinate; meant for verification only.
SpaceTimeViscosity fd_gradient(const CellField& u0, const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg,
                               const ExactProvider& exact, const LossSpec& spec, double relative_step = 1e-6);

}  // namespace visc
