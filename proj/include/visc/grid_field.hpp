#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace visc {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row n holds one time level, column i one cell (or face).
template <typename Scalar>
using SpaceTimeX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Cell averages u_i at one time level.
using CellField = VectorX<double>;
/// Face coefficients; entry i is mu at the face between cells i and i+1 (mod n).
using FaceViscosity = VectorX<double>;
/// One FaceViscosity per time step, stacked as rows.
using SpaceTimeViscosity = SpaceTimeX<double>;
using SpaceTimeField = SpaceTimeX<double>;

/// Periodic uniform grid. Cell i is centred at (i + 1/2) dx.
class Grid1D {
 public:
  Grid1D(Index n_cells, double length) : n_cells_(n_cells), length_(length) {
    if (n_cells < 3) throw std::invalid_argument("Grid1D: n_cells must be >= 3");
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("Grid1D: length must be positive and finite");
    dx_ = length / static_cast<double>(n_cells);
  }

  Index n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double length() const { return length_; }

  double cell_center(Index i) const { return (static_cast<double>(i) + 0.5) * dx_; }
  double face_position(Index f) const { return static_cast<double>(f + 1) * dx_; }

  Index wrap(Index i) const {
    const Index r = i % n_cells_;
    return r < 0 ? r + n_cells_ : r;
  }

  CellField centers() const {
    CellField x(n_cells_);
    for (Index i = 0; i < n_cells_; ++i) x[i] = cell_center(i);
    return x;
  }

  CellField faces() const {
    CellField x(n_cells_);
    for (Index f = 0; f < n_cells_; ++f) x[f] = face_position(f);
    return x;
  }

  bool operator==(const Grid1D&) const = default;

 private:
  Index n_cells_;
  double length_;
  double dx_;
};

inline Grid1D make_grid(Index n_cells, double length) { return Grid1D(n_cells, length); }

/// Indicator of (lo, hi) scaled by amplitude, on a unit-periodic coordinate.
struct HatProfile {
  double lo = 0.4;
  double hi = 0.6;
  double amplitude = 1.0;
};

/// amplitude * sin(2 pi k x / length).
struct SineProfile {
  int wavenumber = 1;
  double amplitude = 1.0;
};

using InitialProfile = std::variant<HatProfile, SineProfile>;

void validate(const HatProfile& hat);

/// Maps x into [0, length).
inline double periodic_wrap(double x, double length) {
  double r = std::fmod(x, length);
  if (r < 0.0) r += length;
  if (r >= length) r -= length;
  return r;
}

/// Analytic solution u0(x - c t) sampled at cell centres.
CellField exact_solution(const HatProfile& profile, const Grid1D& grid, double c, double t);
CellField exact_solution(const SineProfile& profile, const Grid1D& grid, double c, double t);
CellField exact_solution(const InitialProfile& profile, const Grid1D& grid, double c, double t);

/// out[i] = in[(i - k) mod n].
template <typename Derived>
VectorX<typename Derived::Scalar> periodic_shift(const Eigen::MatrixBase<Derived>& field, Index k) {
  const Index n = field.size();
  VectorX<typename Derived::Scalar> out(n);
  if (n == 0) return out;
  Index s = k % n;
  if (s < 0) s += n;
  for (Index i = 0; i < n; ++i) out[(i + s) % n] = field[i];
  return out;
}

/// Throws std::domain_error naming `what` if any entry is NaN or infinite.
template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  if (!v.allFinite()) throw std::domain_error(std::string(what) + ": non-finite entry");
}

}  // namespace visc
