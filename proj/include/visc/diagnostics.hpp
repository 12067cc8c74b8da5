#pragma once

#include "visc/adjoint.hpp"

#include <utility>
#include <vector>

namespace visc {

/// (1/N) sum (u - e)^2.
double mse(const CellField& field, const CellField& exact);

/// Pointwise u_i^n - u_exact(x_i, t^n) for every recorded level.
SpaceTimeField error_field(const Trajectory& traj, const ExactProvider& exact);

/// Quadratic-entropy bookkeeping for a trajectory.
struct EntropyReport {
  /// S^n = 1/2 sum_i (u_i^n)^2 dx, n = 0..M.
  std::vector<double> total_entropy;
  /// S^{n+1} - S^n, n = 0..M-1.
  std::vector<double> per_step_delta;
  /// D^n = sum_f mu_f^n ((u_{f+1}^n - u_f^n)/dx)^2 dx, n = 0..M-1. Empty when not requested.
  std::vector<double> spatial_dissipation;

  double initial() const { return total_entropy.front(); }
  double final() const { return total_entropy.back(); }
  bool non_increasing_globally() const { return final() <= initial(); }
  /// Steps whose entropy rose by more than tolerance.
  std::vector<Index> increases_above(double tolerance) const;
};

double discrete_entropy(const CellField& u, double dx);

/// Spatial channel of the entropy budget. Requires a viscosity history when with_dissipation is set.
EntropyReport entropy_report(const Trajectory& traj, bool with_dissipation = true);

/// Periodic total variation sum_i |u_{i+1} - u_i|.
double total_variation(const CellField& field);

struct MuStats {
  double min = 0.0;
  double max = 0.0;
  double fraction_negative = 0.0;
  /// Share of the negative-|mu| mass that sits within the radius of a moving
  /// hat edge, averaged over the steps that carry any negative mass.
  double negative_mass_near_discontinuity = 0.0;
  Index steps_with_negative = 0;
};

/// Edge positions at time t of a hat translated with speed c, on [0, length).
std::pair<double, double> hat_edges(const HatProfile& hat, double c, double t, double length);

/// Statistics of a space-time viscosity. Row n of mu_st is matched to the hat edges at t^n.
MuStats mu_stats(const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg, const HatProfile& hat, double radius);

/// Statistics without localisation (non-hat initial data).
MuStats mu_stats(const SpaceTimeViscosity& mu_st);

/// Entropy-conservative / entropy-stable parts of the FTCS face flux:
/// ec = c (u_i + u_{i+1})/2, es = (mu/dx)(u_{i+1} - u_i), so that ec - es = ftcs_flux.
struct FluxSplit {
  VectorX<double> ec;
  VectorX<double> es;
};

FluxSplit ec_es_split(const CellField& u, const FaceViscosity& mu, const SchemeConfig& cfg);

/// sum_i u_i (F_{i+1/2} - F_{i-1/2}) for a face flux F: the semi-discrete entropy production of the flux form.
double flux_entropy_production(const CellField& u, const VectorX<double>& flux);

}  // namespace visc
