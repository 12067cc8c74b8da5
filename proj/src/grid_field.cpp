#include "visc/grid_field.hpp"

#include <numbers>

namespace visc {

void validate(const HatProfile& hat) {
  if (!std::isfinite(hat.lo) || !std::isfinite(hat.hi) || !std::isfinite(hat.amplitude))
    throw std::invalid_argument("HatProfile: non-finite parameter");
  if (!(hat.lo >= 0.0 && hat.lo < hat.hi))
    throw std::invalid_argument("HatProfile: need 0 <= lo < hi");
}

CellField exact_solution(const HatProfile& profile, const Grid1D& grid, double c, double t) {
  validate(profile);
  if (!(t >= 0.0)) throw std::invalid_argument("exact_solution: t must be >= 0");
  if (profile.hi > grid.length())
    throw std::invalid_argument("exact_solution: hat extends beyond the domain");
  CellField u(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i) {
    const double xi = periodic_wrap(grid.cell_center(i) - c * t, grid.length());
    u[i] = (profile.lo < xi && xi < profile.hi) ? profile.amplitude : 0.0;
  }
  return u;
}

CellField exact_solution(const SineProfile& profile, const Grid1D& grid, double c, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("exact_solution: t must be >= 0");
  const double k = 2.0 * std::numbers::pi * profile.wavenumber / grid.length();
  CellField u(grid.n_cells());
  for (Index i = 0; i < grid.n_cells(); ++i) {
    const double xi = periodic_wrap(grid.cell_center(i) - c * t, grid.length());
    u[i] = profile.amplitude * std::sin(k * xi);
  }
  return u;
}

CellField exact_solution(const InitialProfile& profile, const Grid1D& grid, double c, double t) {
  return std::visit([&](const auto& p) { return exact_solution(p, grid, c, t); }, profile);
}

}  // namespace visc
