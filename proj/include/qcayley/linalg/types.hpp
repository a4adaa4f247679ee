#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

namespace qcayley {

using Index = Eigen::Index;

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using DenseMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

/// Complex amplitudes of a wavefunction or adjoint state.
template <typename Real>
using Vector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-thread tallies of the expensive kernels. Integrator tests use these to
/// assert the cost structure of a step (solves vs. exponentials).
struct OperationCounters {
  std::size_t factorizations = 0;
  std::size_t solves = 0;
  std::size_t exponentials = 0;
  std::size_t commutators = 0;
  std::size_t assemblies = 0;
};

inline thread_local OperationCounters operation_counters;

inline void reset_operation_counters() { operation_counters = {}; }

}  // namespace qcayley
