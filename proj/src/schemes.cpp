#include "visc/schemes.hpp"

#include <cmath>
#include <numbers>

namespace visc {

namespace {

CellField checked(CellField out, const char* what) {
  if (!out.allFinite()) throw DivergenceError(std::string(what) + ": non-finite state", 0);
  return out;
}

}  // namespace

CellField ftcs_step(const CellField& u, const FaceViscosity& mu, const SchemeConfig& cfg) {
  return checked(ftcs_apply(u, mu, cfg), "ftcs_step");
}

CellField upwind_step(const CellField& u, const SchemeConfig& cfg) {
  require_finite(u, "upwind_step(u)");
  return checked(upwind_apply(u, cfg), "upwind_step");
}

CellField lax_wendroff_step(const CellField& u, const SchemeConfig& cfg) {
  require_finite(u, "lax_wendroff_step(u)");
  return checked(lax_wendroff_apply(u, cfg), "lax_wendroff_step");
}

CellField ftcs_bare_step(const CellField& u, const SchemeConfig& cfg) {
  return ftcs_step(u, FaceViscosity::Zero(cfg.n_cells()), cfg);
}

std::complex<double> amplification_factor(double theta, double cfl, double diffusion_number) {
  const double s = std::sin(theta / 2.0);
  return {1.0 - 4.0 * diffusion_number * s * s, -cfl * std::sin(theta)};
}

double max_amplification(double cfl, double diffusion_number, int samples) {
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / samples;
    worst = std::max(worst, std::abs(amplification_factor(theta, cfl, diffusion_number)));
  }
  return worst;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::ftcs_mu: return "ftcs_mu";
    case Scheme::upwind: return "upwind";
    case Scheme::lax_wendroff: return "lax_wendroff";
    case Scheme::ftcs_bare: return "ftcs_bare";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "ftcs_mu") return Scheme::ftcs_mu;
  if (name == "upwind") return Scheme::upwind;
  if (name == "lax_wendroff") return Scheme::lax_wendroff;
  if (name == "ftcs_bare") return Scheme::ftcs_bare;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

MuProvider constant_mu(const SchemeConfig& cfg, double value) {
  FaceViscosity mu = FaceViscosity::Constant(cfg.n_cells(), value);
  return [mu](Index, const CellField&) { return mu; };
}

MuProvider space_time_mu(const SpaceTimeViscosity& mu_st) {
  return [mu_st](Index step, const CellField&) -> FaceViscosity {
    if (step < 0 || step >= mu_st.rows()) throw std::out_of_range("space_time_mu: step beyond horizon");
    return mu_st.row(step).transpose();
  };
}

Trajectory::Trajectory(SchemeConfig config, SpaceTimeField states, std::optional<SpaceTimeViscosity> viscosity)
    : config_(config), states_(std::move(states)), viscosity_(std::move(viscosity)) {
  if (states_.rows() < 1) throw std::invalid_argument("Trajectory: needs at least the initial state");
  if (states_.cols() != config_.n_cells()) throw std::invalid_argument("Trajectory: state width != n_cells");
  if (viscosity_) {
    if (viscosity_->rows() != n_steps() || viscosity_->cols() != config_.n_cells())
      throw std::invalid_argument("Trajectory: viscosity history shape mismatch");
  }
}

Trajectory simulate(const CellField& u0, const Stepper& stepper, Index n_steps, const SchemeConfig& cfg,
                    const SimulateOptions& options) {
  if (n_steps < 0) throw std::invalid_argument("simulate: n_steps must be >= 0");
  detail::require_size(u0, cfg.n_cells(), "simulate(u0)");
  require_finite(u0, "simulate(u0)");
  const bool needs_mu = stepper.scheme == Scheme::ftcs_mu;
  if (needs_mu && !stepper.mu) throw std::invalid_argument("simulate: ftcs_mu requires a viscosity provider");

  const Index n = cfg.n_cells();
  SpaceTimeField states(n_steps + 1, n);
  states.row(0) = u0.transpose();
  std::optional<SpaceTimeViscosity> history;
  if (needs_mu) history.emplace(n_steps, n);

  const double limit = options.guard_factor * u0.cwiseAbs().maxCoeff();
  CellField u = u0;
  for (Index step = 0; step < n_steps; ++step) {
    CellField next;
    switch (stepper.scheme) {
      case Scheme::ftcs_mu: {
        FaceViscosity mu = stepper.mu(step, u);
        detail::require_size(mu, n, "simulate(mu)");
        require_finite(mu, "simulate(mu)");
        history->row(step) = mu.transpose();
        next = ftcs_apply(u, mu, cfg);
        break;
      }
      case Scheme::upwind: next = upwind_apply(u, cfg); break;
      case Scheme::lax_wendroff: next = lax_wendroff_apply(u, cfg); break;
      case Scheme::ftcs_bare: next = ftcs_apply(u, FaceViscosity::Zero(n), cfg); break;
    }
    const bool finite = next.allFinite();
    if (!finite || next.cwiseAbs().maxCoeff() > limit) {
      SpaceTimeField done = states.topRows(step + 1);
      std::optional<SpaceTimeViscosity> mu_done;
      if (history) mu_done = history->topRows(step);
      auto partial = std::make_shared<const Trajectory>(cfg, std::move(done), std::move(mu_done));
      throw DivergenceError(std::string("simulate: ") + (finite ? "magnitude guard tripped" : "non-finite state") +
                                " at step " + std::to_string(step),
                            step, std::move(partial));
    }
    states.row(step + 1) = next.transpose();
    u = std::move(next);
  }
  return Trajectory(cfg, std::move(states), std::move(history));
}

}  // namespace visc
