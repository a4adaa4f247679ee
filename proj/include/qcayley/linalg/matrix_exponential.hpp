#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "qcayley/linalg/complex_matrix.hpp"

namespace qcayley {

/// exp(A) as a dense matrix, by scaling and squaring with a degree-13 Pade
/// approximant (lower degrees when the 1-norm is small).
template <typename Real>
DenseMatrix<Real> matrix_exponential(const DenseMatrix<Real>& a) {
  if (a.rows() != a.cols()) throw ShapeError("matrix exponential needs a square matrix");
  ++operation_counters.exponentials;
  return a.exp();
}

template <typename Real>
DenseMatrix<Real> matrix_exponential(const ComplexMatrix<Real>& a) {
  return matrix_exponential<Real>(a.to_dense());
}

}  // namespace qcayley
