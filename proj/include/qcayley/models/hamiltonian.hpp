#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "qcayley/linalg/complex_matrix.hpp"
#include "qcayley/models/grid.hpp"

namespace qcayley {

/// H(u, psi) = H0 + sum_j u_j H_j + g diag(|psi|^2).
///
/// `weight` is the quadrature weight of the discrete inner product: dx for
/// grid models, 1 for finite-level systems.
template <typename Real>
struct ControlledHamiltonian {
  ComplexMatrix<Real> drift;
  std::vector<ComplexMatrix<Real>> controls;
  Real nonlinearity = 0;
  Real weight = 1;

  Index dimension() const { return drift.rows(); }
  Index control_count() const { return static_cast<Index>(controls.size()); }
  bool is_linear() const { return nonlinearity == Real(0); }

  void validate(Real tolerance = Real(1e-13)) const {
    if (!(nonlinearity >= 0)) throw ParameterError("nonlinearity g must be >= 0");
    if (!(weight > 0)) throw ParameterError("inner-product weight must be > 0");
    if (hermitian_defect(drift) > tolerance) throw ParameterError("drift is not Hermitian");
    for (const auto& h : controls) {
      if (h.rows() != drift.rows()) throw ShapeError("control operator dimension mismatch");
      if (hermitian_defect(h) > tolerance) {
        throw ParameterError("control operator is not Hermitian");
      }
    }
  }
};

/// Second-order central differences for -d^2/dx^2 with homogeneous Dirichlet
/// boundaries: 2/dx^2 on the diagonal, -1/dx^2 off it.
template <typename Real>
ComplexMatrix<Real> laplacian_1d(Index n, Real dx) {
  if (n < 2) throw ParameterError("laplacian needs at least 2 points");
  if (!(dx > 0)) throw ParameterError("laplacian needs dx > 0");
  BandedMatrix<Real> m(n, 1, 1);
  const Real inv = Real(1) / (dx * dx);
  for (Index i = 0; i < n; ++i) {
    m.ref(i, i) = 2 * inv;
    if (i + 1 < n) {
      m.ref(i + 1, i) = -inv;
      m.ref(i, i + 1) = -inv;
    }
  }
  return ComplexMatrix<Real>::normalized(std::move(m));
}

template <typename Real>
ComplexMatrix<Real> laplacian_1d(const Grid1D<Real>& grid) {
  return laplacian_1d<Real>(grid.size(), grid.dx());
}

/// V(x) = v0 sin^2(pi x/d) + trap_strength (x/d)^2.
template <typename Real>
RealVector<Real> lattice_potential(const Grid1D<Real>& grid, const LatticeParams<Real>& p) {
  p.validate();
  RealVector<Real> v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const Real s = grid.x(i) / p.lattice_spacing;
    const Real lattice = std::sin(std::numbers::pi_v<Real> * s);
    v(i) = p.v0 * lattice * lattice + p.trap_strength * s * s;
  }
  return v;
}

/// W(x) = control_scale (x/d)^2.
template <typename Real>
RealVector<Real> lattice_control(const Grid1D<Real>& grid, const LatticeParams<Real>& p) {
  p.validate();
  const RealVector<Real> s = grid.points() / p.lattice_spacing;
  return p.control_scale * s.array().square().matrix();
}

template <typename Real>
ControlledHamiltonian<Real> lattice_model(const Grid1D<Real>& grid,
                                          const LatticeParams<Real>& p) {
  ControlledHamiltonian<Real> h;
  const RealVector<Real> v = lattice_potential(grid, p);
  h.drift = laplacian_1d(grid) + ComplexMatrix<Real>::diagonal(v);
  h.controls.push_back(ComplexMatrix<Real>::diagonal(lattice_control(grid, p)));
  h.weight = grid.dx();
  return h;
}

template <typename Real>
Real gpe_potential(Real x) {
  return x * x * x * x - 10 * x * x;
}

template <typename Real>
Real gpe_control_profile(Real x) {
  return 5 * x * x;
}

/// Quartic double well x^4 - 10 x^2, control operator 5 x^2, cubic coupling g.
template <typename Real>
ControlledHamiltonian<Real> gpe_model(const Grid1D<Real>& grid, Real g) {
  if (!(g >= 0)) throw ParameterError("GPE coupling g must be >= 0");
  RealVector<Real> v(grid.size());
  RealVector<Real> w(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    v(i) = gpe_potential(grid.x(i));
    w(i) = gpe_control_profile(grid.x(i));
  }
  ControlledHamiltonian<Real> h;
  h.drift = laplacian_1d(grid) + ComplexMatrix<Real>::diagonal(v);
  h.controls.push_back(ComplexMatrix<Real>::diagonal(w));
  h.nonlinearity = g;
  h.weight = grid.dx();
  return h;
}

/// A = -i (H0 + sum_j u_j H_j + g diag(|psi|^2)), skew-Hermitian by
/// construction.
template <typename Real>
ComplexMatrix<Real> assemble_A(const ControlledHamiltonian<Real>& h,
                               const RealVector<Real>& u,
                               const Vector<Real>* psi = nullptr) {
  if (u.size() != h.control_count()) {
    throw ShapeError("control vector length does not match the number of control operators");
  }
  if (!h.is_linear() && psi == nullptr) {
    throw UsageError("a state is required to assemble a nonlinear generator");
  }
  ++operation_counters.assemblies;
  ComplexMatrix<Real> total = h.drift;
  for (Index j = 0; j < u.size(); ++j) {
    if (u(j) != Real(0)) total = total + u(j) * h.controls[static_cast<std::size_t>(j)];
  }
  if (!h.is_linear()) {
    if (psi->size() != h.dimension()) throw ShapeError("state dimension mismatch");
    const RealVector<Real> density = h.nonlinearity * psi->cwiseAbs2();
    total = total + ComplexMatrix<Real>::diagonal(density);
  }
  return Complex<Real>(0, -1) * total;
}

template <typename Real>
ComplexMatrix<Real> assemble_A(const ControlledHamiltonian<Real>& h,
                               const RealVector<Real>& u,
                               const Vector<Real>& psi) {
  return assemble_A(h, u, &psi);
}

}  // namespace qcayley
