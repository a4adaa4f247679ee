#pragma once

#include <random>

#include "qcayley/linalg.hpp"
#include "qcayley/models/synthetic.hpp"

namespace qcayley::test {

using R = double;
using Mat = DenseMatrix<R>;
using Vec = Vector<R>;
using CM = ComplexMatrix<R>;

inline Complex<R> I() { return {0, 1}; }

template <typename Derived>
R max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

/// Random banded matrix with a dominant diagonal.
inline BandedMatrix<R> random_banded(Index n, Index lower, Index upper, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  BandedMatrix<R> b(n, lower, upper);
  for (Index j = 0; j < n; ++j) {
    for (Index i = b.first_row(j); i <= b.last_row(j); ++i) {
      b.ref(i, j) = Complex<R>(unit(rng), unit(rng));
    }
    b.ref(j, j) += Complex<R>(R(lower + upper + 2), 0);
  }
  return b;
}

}  // namespace qcayley::test
