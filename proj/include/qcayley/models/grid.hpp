#pragma once

#include <cmath>
#include <string>

#include "qcayley/errors.hpp"
#include "qcayley/linalg/types.hpp"

namespace qcayley {

/// Uniform 1-D grid including both endpoints.
template <typename Real>
class Grid1D {
 public:
  Grid1D(Index n_points, Real x_min, Real x_max)
      : n_points_(n_points), x_min_(x_min), x_max_(x_max) {
    if (n_points < 8) throw ParameterError("grid needs at least 8 points");
    if (!(x_min < x_max)) throw ParameterError("grid needs x_min < x_max");
  }

  Index size() const { return n_points_; }
  Real x_min() const { return x_min_; }
  Real x_max() const { return x_max_; }
  Real dx() const { return (x_max_ - x_min_) / Real(n_points_ - 1); }
  Real x(Index i) const { return x_min_ + Real(i) * dx(); }

  RealVector<Real> points() const {
    return RealVector<Real>::LinSpaced(n_points_, x_min_, x_max_);
  }

  /// Index of the grid point closest to `x` (clamped to the grid).
  Index nearest(Real x) const {
    const Real s = std::round((x - x_min_) / dx());
    if (s < 0) return 0;
    if (s > Real(n_points_ - 1)) return n_points_ - 1;
    return static_cast<Index>(s);
  }

  bool operator==(const Grid1D&) const = default;

 private:
  Index n_points_;
  Real x_min_;
  Real x_max_;
};

/// Optical lattice plus harmonic trap, dimensionless (energies in recoil
/// units, lengths in lattice spacings).
template <typename Real>
struct LatticeParams {
  Real v0 = 10;
  Real lattice_spacing = 1;
  Real trap_strength = Real(0.00032);
  // Coefficient of the control operator W(x) = control_scale * (x/d)^2.
  Real control_scale = Real(0.00032);

  void validate() const {
    if (!(v0 >= 0)) throw ParameterError("lattice depth v0 must be >= 0");
    if (!(lattice_spacing > 0)) throw ParameterError("lattice spacing must be > 0");
    if (!(trap_strength >= 0)) throw ParameterError("trap strength must be >= 0");
    if (!std::isfinite(control_scale)) throw ParameterError("control scale must be finite");
  }
};

}  // namespace qcayley
