#pragma once

#include <cmath>

#include "qcayley/errors.hpp"
#include "qcayley/models/grid.hpp"

namespace qcayley {

/// <a, b> = weight * sum conj(a_i) b_i.
template <typename Real>
Complex<Real> inner(const Vector<Real>& a, const Vector<Real>& b, Real weight = 1) {
  if (a.size() != b.size()) throw ShapeError("inner product: dimension mismatch");
  return weight * a.dot(b);
}

template <typename Real>
Real norm(const Vector<Real>& v, Real weight = 1) {
  return std::sqrt(weight * v.squaredNorm());
}

template <typename Real>
Vector<Real> normalized(const Vector<Real>& v, Real weight = 1) {
  const Real n = norm(v, weight);
  if (!(n > 0) || !std::isfinite(n)) throw NumericError("cannot normalize a zero or non-finite state");
  return v / n;
}

/// psi_i proportional to exp(-(x_i - center)^2 / (2 width^2)), unit norm in the
/// dx-weighted inner product.
template <typename Real>
Vector<Real> gaussian_state(const Grid1D<Real>& grid, Real center, Real width) {
  if (!(width > 0)) throw ParameterError("gaussian width must be > 0");
  if (center < grid.x_min() || center > grid.x_max()) {
    throw ParameterError("gaussian center must lie inside the grid");
  }
  Vector<Real> psi(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Real s = (grid.x(i) - center) / width;
    psi(i) = Complex<Real>(std::exp(-s * s / 2), 0);
  }
  return normalized(psi, grid.dx());
}

}  // namespace qcayley
