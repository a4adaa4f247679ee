#pragma once

#include <algorithm>
#include <cassert>

#include "qcayley/errors.hpp"
#include "qcayley/linalg/types.hpp"

namespace qcayley {

/// Square complex matrix stored by diagonals.
///
/// Entry (i, j) with -lower <= j - i <= upper lives at storage(upper + i - j, j),
/// the same column-major band layout LAPACK uses. Entries outside the band are
/// structurally zero.
template <typename Real>
class BandedMatrix {
 public:
  using Scalar = Complex<Real>;
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BandedMatrix() = default;

  BandedMatrix(Index size, Index lower, Index upper)
      : size_(size),
        lower_(lower),
        upper_(upper),
        storage_(Storage::Zero(lower + upper + 1, size)) {
    if (size <= 0) throw ShapeError("banded matrix needs a positive size");
    if (lower < 0 || upper < 0 || lower >= size || upper >= size) {
      throw ShapeError("bandwidths must lie in [0, size)");
    }
  }

  static BandedMatrix identity(Index size) {
    BandedMatrix m(size, 0, 0);
    m.storage_.setOnes();
    return m;
  }

  template <typename Derived>
  static BandedMatrix diagonal(const Eigen::MatrixBase<Derived>& d) {
    BandedMatrix m(d.size(), 0, 0);
    for (Index j = 0; j < d.size(); ++j) m.storage_(0, j) = Scalar(d(j));
    return m;
  }

  /// Copies the band of `dense`; entries outside [-lower, upper] are dropped.
  static BandedMatrix from_dense(const DenseMatrix<Real>& dense, Index lower,
                                 Index upper) {
    if (dense.rows() != dense.cols()) throw ShapeError("banded matrix must be square");
    BandedMatrix m(dense.rows(), lower, upper);
    for (Index j = 0; j < m.size_; ++j) {
      for (Index i = m.first_row(j); i <= m.last_row(j); ++i) m.ref(i, j) = dense(i, j);
    }
    return m;
  }

  Index size() const { return size_; }
  Index lower() const { return lower_; }
  Index upper() const { return upper_; }
  Index bandwidth() const { return std::max(lower_, upper_); }

  bool in_band(Index i, Index j) const { return j - i <= upper_ && i - j <= lower_; }
  Index first_row(Index j) const { return std::max<Index>(0, j - upper_); }
  Index last_row(Index j) const { return std::min<Index>(size_ - 1, j + lower_); }

  Scalar coeff(Index i, Index j) const {
    return in_band(i, j) ? storage_(upper_ + i - j, j) : Scalar(0);
  }

  Scalar& ref(Index i, Index j) {
    assert(in_band(i, j));
    return storage_(upper_ + i - j, j);
  }

  const Storage& storage() const { return storage_; }

  DenseMatrix<Real> to_dense() const {
    DenseMatrix<Real> out = DenseMatrix<Real>::Zero(size_, size_);
    for (Index j = 0; j < size_; ++j) {
      for (Index i = first_row(j); i <= last_row(j); ++i) out(i, j) = coeff(i, j);
    }
    return out;
  }

  Vector<Real> apply(const Vector<Real>& v) const {
    if (v.size() != size_) throw ShapeError("banded matvec: dimension mismatch");
    Vector<Real> out = Vector<Real>::Zero(size_);
    for (Index j = 0; j < size_; ++j) {
      const Scalar vj = v(j);
      for (Index i = first_row(j); i <= last_row(j); ++i) {
        out(i) += storage_(upper_ + i - j, j) * vj;
      }
    }
    return out;
  }

  BandedMatrix adjoint() const {
    BandedMatrix out(size_, upper_, lower_);
    for (Index j = 0; j < size_; ++j) {
      for (Index i = first_row(j); i <= last_row(j); ++i) {
        out.ref(j, i) = std::conj(coeff(i, j));
      }
    }
    return out;
  }

  /// Copy with bandwidths enlarged to at least (lower, upper).
  BandedMatrix widened(Index lower, Index upper) const {
    lower = std::max(lower, lower_);
    upper = std::max(upper, upper_);
    if (lower == lower_ && upper == upper_) return *this;
    BandedMatrix out(size_, lower, upper);
    out.storage_.middleRows(upper - upper_, lower_ + upper_ + 1) = storage_;
    return out;
  }

  BandedMatrix& operator*=(const Scalar& s) {
    storage_ *= s;
    return *this;
  }

  friend BandedMatrix operator*(const Scalar& s, BandedMatrix m) { return m *= s; }

  friend BandedMatrix operator+(const BandedMatrix& a, const BandedMatrix& b) {
    check_same_size(a, b);
    BandedMatrix out = a.widened(b.lower_, b.upper_);
    out.storage_.middleRows(out.upper_ - b.upper_, b.lower_ + b.upper_ + 1) += b.storage_;
    return out;
  }

  friend BandedMatrix operator-(const BandedMatrix& a, const BandedMatrix& b) {
    check_same_size(a, b);
    BandedMatrix out = a.widened(b.lower_, b.upper_);
    out.storage_.middleRows(out.upper_ - b.upper_, b.lower_ + b.upper_ + 1) -= b.storage_;
    return out;
  }

  /// Product; bandwidths add (clamped to size - 1).
  friend BandedMatrix operator*(const BandedMatrix& a, const BandedMatrix& b) {
    check_same_size(a, b);
    const Index n = a.size_;
    BandedMatrix out(n, std::min(a.lower_ + b.lower_, n - 1),
                     std::min(a.upper_ + b.upper_, n - 1));
    for (Index j = 0; j < n; ++j) {
      for (Index k = b.first_row(j); k <= b.last_row(j); ++k) {
        const Scalar bkj = b.coeff(k, j);
        if (bkj == Scalar(0)) continue;
        for (Index i = a.first_row(k); i <= a.last_row(k); ++i) {
          out.ref(i, j) += a.coeff(i, k) * bkj;
        }
      }
    }
    return out;
  }

  friend bool operator==(const BandedMatrix& a, const BandedMatrix& b) {
    return a.size_ == b.size_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
           a.storage_ == b.storage_;
  }

 private:
  static void check_same_size(const BandedMatrix& a, const BandedMatrix& b) {
    if (a.size_ != b.size_) throw ShapeError("banded operands differ in dimension");
  }

  Index size_ = 0;
  Index lower_ = 0;
  Index upper_ = 0;
  Storage storage_;
};

}  // namespace qcayley
