#pragma once

#include <random>

#include "qcayley/models/hamiltonian.hpp"
#include "qcayley/models/states.hpp"

namespace qcayley {

/// Dense Hermitian matrix (G + G^dagger)/2 with standard normal complex G.
template <typename Real, typename Rng>
DenseMatrix<Real> random_hermitian(Index n, Rng& rng, Real scale = 1) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix<Real> g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = Complex<Real>(Real(normal(rng)), Real(normal(rng)));
  }
  return Real(0.5) * scale * (g + g.adjoint());
}

template <typename Real, typename Rng>
DenseMatrix<Real> random_skew_hermitian(Index n, Rng& rng, Real scale = 1) {
  return Complex<Real>(0, 1) * random_hermitian<Real>(n, rng, scale);
}

template <typename Real, typename Rng>
Vector<Real> random_unit_state(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Real> v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex<Real>(Real(normal(rng)), Real(normal(rng)));
  return normalized(v);
}

/// Finite-level model with a diagonal drift (levels 0, 1, ..., n-1 scaled by
/// `spacing`) and `channels` random dense Hermitian couplings.
template <typename Real>
ControlledHamiltonian<Real> synthetic_model(Index levels, Index channels, std::uint64_t seed,
                                            Real spacing = Real(0.5)) {
  if (levels < 2) throw ParameterError("synthetic model needs at least 2 levels");
  if (channels < 1) throw ParameterError("synthetic model needs at least 1 channel");
  std::mt19937_64 rng(seed);
  RealVector<Real> energies(levels);
  for (Index i = 0; i < levels; ++i) energies(i) = spacing * Real(i);
  ControlledHamiltonian<Real> h;
  h.drift = ComplexMatrix<Real>::diagonal(energies);
  for (Index j = 0; j < channels; ++j) {
    h.controls.emplace_back(random_hermitian<Real>(levels, rng, Real(1) / std::sqrt(Real(levels))));
  }
  return h;
}

/// Two-level Rabi problem H(t) = sigma_z + u(t) sigma_x.
template <typename Real>
ControlledHamiltonian<Real> rabi_model() {
  DenseMatrix<Real> z = DenseMatrix<Real>::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  DenseMatrix<Real> x = DenseMatrix<Real>::Zero(2, 2);
  x(0, 1) = 1;
  x(1, 0) = 1;
  ControlledHamiltonian<Real> h;
  h.drift = ComplexMatrix<Real>(z);
  h.controls.emplace_back(x);
  return h;
}

}  // namespace qcayley
