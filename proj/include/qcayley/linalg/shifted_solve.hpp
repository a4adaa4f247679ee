#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/LU>

#include "qcayley/linalg/complex_matrix.hpp"

namespace qcayley {

/// Pivots smaller than this fraction of the largest pivot flag the matrix as
/// singular.
inline constexpr double kRelativePivotThreshold = 1e-14;

/// Handle to a factorization held by a ShiftedSolveWorkspace. It stays valid
/// only until the workspace factorizes another matrix.
struct FactorizationToken {
  std::uint64_t generation = 0;
};

/// Reusable LU buffers for I - Omega/2 solves.
///
/// Banded input is factored in place with partial pivoting (fill-in widens the
/// upper band by `lower`), dense input goes through Eigen's PartialPivLU.
template <typename Real>
class ShiftedSolveWorkspace {
 public:
  using Scalar = Complex<Real>;

  FactorizationToken factorize(const ComplexMatrix<Real>& m,
                               std::optional<double> time = std::nullopt) {
    ++generation_;
    ++operation_counters.factorizations;
    if (m.is_banded()) {
      factorize_banded(m.banded(), time);
    } else {
      banded_ = false;
      size_ = m.rows();
      dense_lu_.compute(m.dense());
      const auto diag = dense_lu_.matrixLU().diagonal().cwiseAbs();
      check_pivots(diag.minCoeff(), diag.maxCoeff(), time);
    }
    return FactorizationToken{generation_};
  }

  Vector<Real> solve(FactorizationToken token, const Vector<Real>& rhs) const {
    check_token(token, rhs.rows());
    ++operation_counters.solves;
    if (!banded_) return dense_lu_.solve(rhs);
    Vector<Real> x = rhs;
    solve_banded_in_place(x);
    return x;
  }

  DenseMatrix<Real> solve(FactorizationToken token, const DenseMatrix<Real>& rhs) const {
    check_token(token, rhs.rows());
    ++operation_counters.solves;
    if (!banded_) return dense_lu_.solve(rhs);
    DenseMatrix<Real> x = rhs;
    for (Index c = 0; c < x.cols(); ++c) {
      Vector<Real> col = x.col(c);
      solve_banded_in_place(col);
      x.col(c) = col;
    }
    return x;
  }

  std::uint64_t generation() const { return generation_; }

 private:
  // Row offset of the main diagonal in the LU band storage.
  Scalar& lu(Index i, Index j) { return band_(lower_ + upper_ + i - j, j); }
  const Scalar& lu(Index i, Index j) const { return band_(lower_ + upper_ + i - j, j); }

  void factorize_banded(const BandedMatrix<Real>& m, std::optional<double> time) {
    banded_ = true;
    size_ = m.size();
    lower_ = m.lower();
    upper_ = m.upper();
    const Index n = size_;
    const Index kl = lower_;
    const Index ku_fill = std::min<Index>(kl + upper_, n - 1);
    band_.setZero(2 * kl + upper_ + 1, n);
    // Original band occupies rows kl .. 2kl+ku; the top kl rows receive fill-in.
    band_.middleRows(kl, kl + upper_ + 1) = m.storage();
    pivots_.assign(static_cast<std::size_t>(n), 0);

    Real largest = 0;
    Real smallest = std::numeric_limits<Real>::infinity();
    for (Index j = 0; j < n; ++j) {
      const Index below = std::min<Index>(kl, n - 1 - j);
      Index p = j;
      Real best = std::abs(lu(j, j));
      for (Index i = j + 1; i <= j + below; ++i) {
        if (std::abs(lu(i, j)) > best) {
          best = std::abs(lu(i, j));
          p = i;
        }
      }
      pivots_[static_cast<std::size_t>(j)] = p;
      largest = std::max(largest, best);
      smallest = std::min(smallest, best);
      if (best == Real(0)) check_pivots(0, largest, time);
      const Index last_col = std::min<Index>(j + ku_fill, n - 1);
      if (p != j) {
        for (Index c = j; c <= last_col; ++c) std::swap(lu(p, c), lu(j, c));
      }
      const Scalar inv = Scalar(1) / lu(j, j);
      for (Index i = j + 1; i <= j + below; ++i) lu(i, j) *= inv;
      for (Index c = j + 1; c <= last_col; ++c) {
        const Scalar u = lu(j, c);
        if (u == Scalar(0)) continue;
        for (Index i = j + 1; i <= j + below; ++i) lu(i, c) -= lu(i, j) * u;
      }
    }
    check_pivots(smallest, largest, time);
  }

  void solve_banded_in_place(Vector<Real>& x) const {
    const Index n = size_;
    const Index kl = lower_;
    const Index ku_fill = std::min<Index>(kl + upper_, n - 1);
    for (Index j = 0; j < n; ++j) {
      const Index p = pivots_[static_cast<std::size_t>(j)];
      if (p != j) std::swap(x(p), x(j));
      const Index below = std::min<Index>(kl, n - 1 - j);
      const Scalar xj = x(j);
      for (Index i = j + 1; i <= j + below; ++i) x(i) -= lu(i, j) * xj;
    }
    for (Index j = n - 1; j >= 0; --j) {
      x(j) /= lu(j, j);
      const Scalar xj = x(j);
      for (Index i = std::max<Index>(0, j - ku_fill); i < j; ++i) x(i) -= lu(i, j) * xj;
    }
  }

  static void check_pivots(Real smallest, Real largest, std::optional<double> time) {
    if (!(smallest > Real(kRelativePivotThreshold) * largest)) {
      throw SingularityError("shifted matrix I - Omega/2 is singular to working precision",
                             time);
    }
  }

  void check_token(FactorizationToken token, Index rows) const {
    if (token.generation != generation_ || generation_ == 0) {
      throw StateError("stale factorization: workspace has been refactored");
    }
    if (rows != size_) throw ShapeError("shifted solve: right-hand side dimension mismatch");
  }

  std::uint64_t generation_ = 0;
  bool banded_ = false;
  Index size_ = 0;
  Index lower_ = 0;
  Index upper_ = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> band_;
  std::vector<Index> pivots_;
  Eigen::PartialPivLU<DenseMatrix<Real>> dense_lu_;
};

template <typename Real>
ShiftedSolveWorkspace<Real>& thread_workspace() {
  static thread_local ShiftedSolveWorkspace<Real> workspace;
  return workspace;
}

/// M^{-1} rhs using the calling thread's workspace.
template <typename Real, typename Rhs>
Rhs solve_shifted(const ComplexMatrix<Real>& m, const Rhs& rhs,
                  std::optional<double> time = std::nullopt) {
  auto& ws = thread_workspace<Real>();
  const auto token = ws.factorize(m, time);
  return ws.solve(token, rhs);
}

}  // namespace qcayley
