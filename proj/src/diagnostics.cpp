#include "visc/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace visc {

double mse(const CellField& field, const CellField& exact) {
  if (field.size() != exact.size() || field.size() == 0) throw std::invalid_argument("mse: shape mismatch");
  return (field - exact).squaredNorm() / static_cast<double>(field.size());
}

SpaceTimeField error_field(const Trajectory& traj, const ExactProvider& exact) {
  SpaceTimeField err(traj.states().rows(), traj.states().cols());
  for (Index n = 0; n <= traj.n_steps(); ++n) {
    const CellField e = exact(n);
    if (e.size() != err.cols()) throw std::invalid_argument("error_field: exact solution shape mismatch");
    err.row(n) = traj.states().row(n) - e.transpose();
  }
  return err;
}

double discrete_entropy(const CellField& u, double dx) { return 0.5 * u.squaredNorm() * dx; }

std::vector<Index> EntropyReport::increases_above(double tolerance) const {
  std::vector<Index> steps;
  for (std::size_t n = 0; n < per_step_delta.size(); ++n)
    if (per_step_delta[n] > tolerance) steps.push_back(static_cast<Index>(n));
  return steps;
}

EntropyReport entropy_report(const Trajectory& traj, bool with_dissipation) {
  const double dx = traj.config().dx();
  const Index n = traj.config().n_cells();
  EntropyReport report;
  report.total_entropy.reserve(traj.n_steps() + 1);
  for (Index s = 0; s <= traj.n_steps(); ++s) report.total_entropy.push_back(discrete_entropy(traj.state(s), dx));
  for (Index s = 0; s < traj.n_steps(); ++s)
    report.per_step_delta.push_back(report.total_entropy[s + 1] - report.total_entropy[s]);

  if (with_dissipation) {
    const auto& history = traj.viscosity_history();
    if (!history) throw std::invalid_argument("entropy_report: trajectory has no viscosity history");
    for (Index s = 0; s < traj.n_steps(); ++s) {
      double d = 0.0;
      for (Index f = 0; f < n; ++f) {
        const Index r = f + 1 == n ? 0 : f + 1;
        const double grad = (traj.states()(s, r) - traj.states()(s, f)) / dx;
        d += (*history)(s, f) * grad * grad * dx;
      }
      report.spatial_dissipation.push_back(d);
    }
  }
  for (double v : report.total_entropy)
    if (!std::isfinite(v)) throw std::domain_error("entropy_report: non-finite entropy");
  return report;
}

double total_variation(const CellField& field) {
  const Index n = field.size();
  double tv = 0.0;
  for (Index i = 0; i < n; ++i) tv += std::abs(field[(i + 1) % n] - field[i]);
  return tv;
}

std::pair<double, double> hat_edges(const HatProfile& hat, double c, double t, double length) {
  return {periodic_wrap(hat.lo + c * t, length), periodic_wrap(hat.hi + c * t, length)};
}

namespace {

double periodic_distance(double a, double b, double length) {
  const double d = std::abs(periodic_wrap(a - b, length));
  return std::min(d, length - d);
}

MuStats basic_stats(const SpaceTimeViscosity& mu_st) {
  MuStats stats;
  if (mu_st.size() == 0) return stats;
  stats.min = mu_st.minCoeff();
  stats.max = mu_st.maxCoeff();
  stats.fraction_negative =
      static_cast<double>((mu_st.array() < 0.0).count()) / static_cast<double>(mu_st.size());
  return stats;
}

}  // namespace

MuStats mu_stats(const SpaceTimeViscosity& mu_st) { return basic_stats(mu_st); }

MuStats mu_stats(const SpaceTimeViscosity& mu_st, const SchemeConfig& cfg, const HatProfile& hat, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("mu_stats: radius must be > 0");
  if (mu_st.rows() > 0 && mu_st.cols() != cfg.n_cells()) throw std::invalid_argument("mu_stats: width != n_cells");
  MuStats stats = basic_stats(mu_st);
  const double length = cfg.grid.length();
  double share_sum = 0.0;
  for (Index s = 0; s < mu_st.rows(); ++s) {
    const auto [left, right] = hat_edges(hat, cfg.c, static_cast<double>(s) * cfg.dt, length);
    double near = 0.0;
    double total = 0.0;
    for (Index f = 0; f < mu_st.cols(); ++f) {
      const double m = mu_st(s, f);
      if (!(m < 0.0)) continue;
      total += -m;
      const double x = cfg.grid.face_position(f);
      if (std::min(periodic_distance(x, left, length), periodic_distance(x, right, length)) <= radius) near += -m;
    }
    if (total > 0.0) {
      share_sum += near / total;
      ++stats.steps_with_negative;
    }
  }
  stats.negative_mass_near_discontinuity =
      stats.steps_with_negative > 0 ? share_sum / static_cast<double>(stats.steps_with_negative) : 0.0;
  return stats;
}

FluxSplit ec_es_split(const CellField& u, const FaceViscosity& mu, const SchemeConfig& cfg) {
  const Index n = cfg.n_cells();
  if (u.size() != n || mu.size() != n) throw std::invalid_argument("ec_es_split: length does not match grid");
  FluxSplit split{VectorX<double>(n), VectorX<double>(n)};
  for (Index f = 0; f < n; ++f) {
    const Index r = f + 1 == n ? 0 : f + 1;
    split.ec[f] = cfg.c * (u[r] + u[f]) / 2.0;
    split.es[f] = mu[f] / cfg.dx() * (u[r] - u[f]);
  }
  return split;
}

double flux_entropy_production(const CellField& u, const VectorX<double>& flux) {
  const Index n = u.size();
  if (flux.size() != n) throw std::invalid_argument("flux_entropy_production: shape mismatch");
  double s = 0.0;
  for (Index i = 0; i < n; ++i) s += u[i] * (flux[i] - flux[i == 0 ? n - 1 : i - 1]);
  return s;
}

}  // namespace visc
