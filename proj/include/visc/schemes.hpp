#pragma once

#include "visc/grid_field.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace visc {

/// Advection speed, time step and grid shared by every stepper.
struct SchemeConfig {
  Grid1D grid;
  double c = 1.0;
  double dt = 1e-3;

  SchemeConfig(Grid1D g, double speed, double time_step) : grid(g), c(speed), dt(time_step) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SchemeConfig: dt must be > 0");
    if (!std::isfinite(c)) throw std::invalid_argument("SchemeConfig: c must be finite");
  }

  double dx() const { return grid.dx(); }
  Index n_cells() const { return grid.n_cells(); }
  double cfl() const { return c * dt / grid.dx(); }
  /// dt / dx^2, the factor multiplying mu in the update.
  double viscous_factor() const { return dt / (grid.dx() * grid.dx()); }
  double diffusion_number(double mu) const { return mu * viscous_factor(); }
  /// mu that turns FTCS into first-order upwind: |c| dx / 2.
  double upwind_viscosity() const { return std::abs(c) * grid.dx() / 2.0; }
  /// mu that turns FTCS into Lax-Wendroff: c^2 dt / 2.
  double lax_wendroff_viscosity() const { return c * c * dt / 2.0; }
};

namespace detail {

template <typename Derived>
void require_size(const Eigen::MatrixBase<Derived>& v, Index n, const char* what) {
  if (v.size() != n) throw std::invalid_argument(std::string(what) + ": length does not match grid");
}

}  // namespace detail

/// F_{i+1/2} = c (u_{i+1} + u_i)/2 - (mu_{i+1/2}/dx)(u_{i+1} - u_i).
template <typename DU, typename DM>
VectorX<typename DU::Scalar> ftcs_flux(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DM>& mu,
                                       const SchemeConfig& cfg) {
  using Scalar = typename DU::Scalar;
  const Index n = cfg.n_cells();
  detail::require_size(u, n, "ftcs_flux(u)");
  detail::require_size(mu, n, "ftcs_flux(mu)");
  require_finite(u, "ftcs_flux(u)");
  require_finite(mu, "ftcs_flux(mu)");
  const Scalar c(cfg.c);
  const Scalar inv_dx(1.0 / cfg.dx());
  VectorX<Scalar> flux(n);
  for (Index f = 0; f < n; ++f) {
    const Index r = f + 1 == n ? 0 : f + 1;
    flux[f] = c * (u[r] + u[f]) / Scalar(2) - Scalar(mu[f]) * inv_dx * (u[r] - u[f]);
  }
  return flux;
}

/// Conservative FTCS update with face viscosity: u_i - dt/dx (F_{i+1/2} - F_{i-1/2}).
/// Unchecked on output; see ftcs_step for the checked form.
template <typename DU, typename DM>
VectorX<typename DU::Scalar> ftcs_apply(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DM>& mu,
                                        const SchemeConfig& cfg) {
  using Scalar = typename DU::Scalar;
  const VectorX<Scalar> flux = ftcs_flux(u, mu, cfg);
  const Index n = cfg.n_cells();
  const Scalar ratio(cfg.dt / cfg.dx());
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    const Index l = i == 0 ? n - 1 : i - 1;
    out[i] = u[i] - ratio * (flux[i] - flux[l]);
  }
  return out;
}

/// Transpose of the (linear in u) FTCS operator at fixed mu. Equals the FTCS
/// operator with c replaced by -c, since the viscous part is symmetric.
template <typename DW, typename DM>
VectorX<typename DW::Scalar> ftcs_apply_transpose(const Eigen::MatrixBase<DW>& w, const Eigen::MatrixBase<DM>& mu,
                                                  const SchemeConfig& cfg) {
  using Scalar = typename DW::Scalar;
  const Index n = cfg.n_cells();
  detail::require_size(w, n, "ftcs_apply_transpose(w)");
  detail::require_size(mu, n, "ftcs_apply_transpose(mu)");
  const Scalar half_cfl(cfg.cfl() / 2.0);
  const Scalar k(cfg.viscous_factor());
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    const Index l = i == 0 ? n - 1 : i - 1;
    const Index r = i + 1 == n ? 0 : i + 1;
    out[i] = w[i] + half_cfl * (w[r] - w[l]) +
             k * (Scalar(mu[i]) * (w[r] - w[i]) - Scalar(mu[l]) * (w[i] - w[l]));
  }
  return out;
}

/// Two-sided cellwise form: mu_plus[i] acts on (u_{i+1} - u_i), mu_minus[i] on (u_i - u_{i-1}).
/// Conservative only when mu_plus[i] == mu_minus[i+1] for every i.
template <typename DU, typename DP, typename DM>
VectorX<typename DU::Scalar> ftcs_apply_two_sided(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DP>& mu_plus,
                                                  const Eigen::MatrixBase<DM>& mu_minus, const SchemeConfig& cfg) {
  using Scalar = typename DU::Scalar;
  const Index n = cfg.n_cells();
  detail::require_size(u, n, "ftcs_apply_two_sided(u)");
  detail::require_size(mu_plus, n, "ftcs_apply_two_sided(mu_plus)");
  detail::require_size(mu_minus, n, "ftcs_apply_two_sided(mu_minus)");
  const Scalar half_cfl(cfg.cfl() / 2.0);
  const Scalar k(cfg.viscous_factor());
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    const Index l = i == 0 ? n - 1 : i - 1;
    const Index r = i + 1 == n ? 0 : i + 1;
    out[i] = u[i] - half_cfl * (u[r] - u[l]) +
             k * (Scalar(mu_plus[i]) * (u[r] - u[i]) - Scalar(mu_minus[i]) * (u[i] - u[l]));
  }
  return out;
}

/// Non-conservative form with one cellwise coefficient: u_i + mu_i dt/dx^2 (u_{i+1} - 2u_i + u_{i-1}).
template <typename DU, typename DM>
VectorX<typename DU::Scalar> ftcs_apply_cellwise(const Eigen::MatrixBase<DU>& u, const Eigen::MatrixBase<DM>& mu_cell,
                                                 const SchemeConfig& cfg) {
  return ftcs_apply_two_sided(u, mu_cell, mu_cell, cfg);
}

/// Face viscosity -> (mu_plus, mu_minus) with mu_plus[i] = mu_{i+1/2}, mu_minus[i] = mu_{i-1/2}.
inline std::pair<FaceViscosity, FaceViscosity> two_sided_from_faces(const FaceViscosity& mu) {
  return {mu, periodic_shift(mu, 1)};
}

/// First-order upwind; the stencil is mirrored for c < 0.
template <typename DU>
VectorX<typename DU::Scalar> upwind_apply(const Eigen::MatrixBase<DU>& u, const SchemeConfig& cfg) {
  using Scalar = typename DU::Scalar;
  const Index n = cfg.n_cells();
  detail::require_size(u, n, "upwind_step(u)");
  const Scalar nu(cfg.cfl());
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    const Index l = i == 0 ? n - 1 : i - 1;
    const Index r = i + 1 == n ? 0 : i + 1;
    out[i] = cfg.c >= 0.0 ? u[i] - nu * (u[i] - u[l]) : u[i] - nu * (u[r] - u[i]);
  }
  return out;
}

template <typename DU>
VectorX<typename DU::Scalar> lax_wendroff_apply(const Eigen::MatrixBase<DU>& u, const SchemeConfig& cfg) {
  using Scalar = typename DU::Scalar;
  const Index n = cfg.n_cells();
  detail::require_size(u, n, "lax_wendroff_step(u)");
  const Scalar nu(cfg.cfl());
  VectorX<Scalar> out(n);
  for (Index i = 0; i < n; ++i) {
    const Index l = i == 0 ? n - 1 : i - 1;
    const Index r = i + 1 == n ? 0 : i + 1;
    out[i] = u[i] - nu / Scalar(2) * (u[r] - u[l]) + nu * nu / Scalar(2) * (u[r] - Scalar(2) * u[i] + u[l]);
  }
  return out;
}

/// Thrown when a state goes non-finite or trips the magnitude guard.
class Trajectory;
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, Index step, std::shared_ptr<const Trajectory> partial = nullptr)
      : std::runtime_error(what), step_(step), partial_(std::move(partial)) {}

  /// Index n of the step u^n -> u^{n+1} that failed.
  Index step() const { return step_; }
  /// States computed before the failure, if available.
  const std::shared_ptr<const Trajectory>& partial() const { return partial_; }

 private:
  Index step_;
  std::shared_ptr<const Trajectory> partial_;
};

// Checked double-precision steps. Non-finite inputs raise std::domain_error;
// a non-finite result raises DivergenceError.
CellField ftcs_step(const CellField& u, const FaceViscosity& mu, const SchemeConfig& cfg);
CellField upwind_step(const CellField& u, const SchemeConfig& cfg);
CellField lax_wendroff_step(const CellField& u, const SchemeConfig& cfg);
CellField ftcs_bare_step(const CellField& u, const SchemeConfig& cfg);

/// Von Neumann symbol of FTCS with uniform viscosity:
/// G(theta) = 1 - i cfl sin(theta) - 4 d sin^2(theta/2), d = mu dt / dx^2.
std::complex<double> amplification_factor(double theta, double cfl, double diffusion_number);

/// max over an even theta sweep of |G(theta)|.
double max_amplification(double cfl, double diffusion_number, int samples = 512);

enum class Scheme { ftcs_mu, upwind, lax_wendroff, ftcs_bare };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Viscosity for the step u^n -> u^{n+1}.
using MuProvider = std::function<FaceViscosity(Index step, const CellField& u)>;

MuProvider constant_mu(const SchemeConfig& cfg, double value);
MuProvider space_time_mu(const SpaceTimeViscosity& mu_st);

struct Stepper {
  Scheme scheme = Scheme::ftcs_mu;
  MuProvider mu;  // required for ftcs_mu only
};

/// States u^0..u^M as rows. viscosity_history row n maps u^n -> u^{n+1}.
class Trajectory {
 public:
  Trajectory(SchemeConfig config, SpaceTimeField states, std::optional<SpaceTimeViscosity> viscosity = std::nullopt);

  const SchemeConfig& config() const { return config_; }
  const SpaceTimeField& states() const { return states_; }
  const std::optional<SpaceTimeViscosity>& viscosity_history() const { return viscosity_; }

  Index n_steps() const { return states_.rows() - 1; }
  CellField state(Index n) const { return states_.row(n).transpose(); }
  CellField final_state() const { return state(n_steps()); }
  double time(Index n) const { return static_cast<double>(n) * config_.dt; }

 private:
  SchemeConfig config_;
  SpaceTimeField states_;
  std::optional<SpaceTimeViscosity> viscosity_;
};

struct SimulateOptions {
  /// Abort once max|u| exceeds guard_factor * max|u0|.
  double guard_factor = 1e6;
};

/// Applies the stepper n_steps times. Throws DivergenceError with the partial
/// trajectory attached on failure.
Trajectory simulate(const CellField& u0, const Stepper& stepper, Index n_steps, const SchemeConfig& cfg,
                    const SimulateOptions& options = {});

}  // namespace visc
