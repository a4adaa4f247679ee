#pragma once

#include <variant>

#include "qcayley/linalg/banded_matrix.hpp"

namespace qcayley {

enum class Layout { Dense, Banded };

/// Square complex operator held either densely or as a band.
///
/// Arithmetic keeps the banded layout while the resulting bandwidth stays at
/// or below size/4 and falls back to dense storage beyond that.
template <typename Real>
class ComplexMatrix {
 public:
  using Scalar = Complex<Real>;
  using Dense = DenseMatrix<Real>;
  using Banded = BandedMatrix<Real>;

  ComplexMatrix() = default;

  ComplexMatrix(Dense dense) : data_(std::move(dense)) {
    if (std::get<Dense>(data_).rows() != std::get<Dense>(data_).cols()) {
      throw ShapeError("operator matrix must be square");
    }
  }

  ComplexMatrix(Banded banded) : data_(std::move(banded)) {}

  static ComplexMatrix identity(Index n) { return normalized(Banded::identity(n)); }

  static ComplexMatrix zero(Index n) { return normalized(Banded(n, 0, 0)); }

  template <typename Derived>
  static ComplexMatrix diagonal(const Eigen::MatrixBase<Derived>& d) {
    return normalized(Banded::diagonal(d));
  }

  /// Stores `b` banded if its bandwidth is at most size/4, densely otherwise.
  static ComplexMatrix normalized(Banded b) {
    if (b.bandwidth() > b.size() / 4 && b.bandwidth() > 0) return ComplexMatrix(b.to_dense());
    return ComplexMatrix(std::move(b));
  }

  Layout layout() const {
    return std::holds_alternative<Banded>(data_) ? Layout::Banded : Layout::Dense;
  }
  bool is_banded() const { return layout() == Layout::Banded; }

  Index rows() const {
    return is_banded() ? std::get<Banded>(data_).size() : std::get<Dense>(data_).rows();
  }
  Index cols() const { return rows(); }

  Index lower_bandwidth() const {
    return is_banded() ? std::get<Banded>(data_).lower() : rows() - 1;
  }
  Index upper_bandwidth() const {
    return is_banded() ? std::get<Banded>(data_).upper() : rows() - 1;
  }

  const Banded& banded() const { return std::get<Banded>(data_); }
  const Dense& dense() const { return std::get<Dense>(data_); }

  Dense to_dense() const { return is_banded() ? banded().to_dense() : dense(); }

  Scalar coeff(Index i, Index j) const {
    return is_banded() ? banded().coeff(i, j) : dense()(i, j);
  }

  Vector<Real> apply(const Vector<Real>& v) const {
    if (v.size() != rows()) throw ShapeError("matvec: dimension mismatch");
    if (is_banded()) return banded().apply(v);
    return dense() * v;
  }

  ComplexMatrix adjoint() const {
    if (is_banded()) return ComplexMatrix(banded().adjoint());
    return ComplexMatrix(Dense(dense().adjoint()));
  }

  /// Frobenius norm.
  Real norm() const {
    return is_banded() ? banded().storage().norm() : dense().norm();
  }

  friend ComplexMatrix operator*(const Scalar& s, const ComplexMatrix& m) {
    if (m.is_banded()) return ComplexMatrix(s * m.banded());
    return ComplexMatrix(Dense(s * m.dense()));
  }
  friend ComplexMatrix operator*(Real s, const ComplexMatrix& m) { return Scalar(s) * m; }

  friend ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_size(a, b);
    if (a.is_banded() && b.is_banded()) return normalized(a.banded() + b.banded());
    return ComplexMatrix(Dense(a.to_dense() + b.to_dense()));
  }

  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_size(a, b);
    if (a.is_banded() && b.is_banded()) return normalized(a.banded() - b.banded());
    return ComplexMatrix(Dense(a.to_dense() - b.to_dense()));
  }

  friend ComplexMatrix operator-(const ComplexMatrix& a) { return Scalar(-1) * a; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_size(a, b);
    if (a.is_banded() && b.is_banded()) {
      const Index n = a.rows();
      const Index bw = std::max(a.banded().lower() + b.banded().lower(),
                                a.banded().upper() + b.banded().upper());
      if (bw <= n / 4) return ComplexMatrix(a.banded() * b.banded());
    }
    return ComplexMatrix(Dense(a.to_dense() * b.to_dense()));
  }

  /// Exact entrywise equality with identical layout.
  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.layout() != b.layout()) return false;
    if (a.is_banded()) return a.banded() == b.banded();
    return a.dense().rows() == b.dense().rows() && a.dense() == b.dense();
  }

 private:
  static void check_same_size(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("operands differ in dimension");
  }

  std::variant<Dense, Banded> data_;
};

/// AB - BA.
template <typename Real>
ComplexMatrix<Real> commutator(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b) {
  if (a.rows() != b.rows()) throw ShapeError("commutator: dimension mismatch");
  ++operation_counters.commutators;
  return a * b - b * a;
}

/// Largest deviation from skew-Hermiticity, max |A + A^H|.
template <typename Real>
Real skew_hermitian_defect(const ComplexMatrix<Real>& a) {
  if (a.is_banded()) {
    const auto& b = a.banded();
    Real worst = 0;
    for (Index j = 0; j < b.size(); ++j) {
      for (Index i = b.first_row(j); i <= b.last_row(j); ++i) {
        worst = std::max(worst, std::abs(b.coeff(i, j) + std::conj(b.coeff(j, i))));
      }
    }
    return worst;
  }
  const auto& d = a.dense();
  return (d + d.adjoint()).cwiseAbs().maxCoeff();
}

/// Largest deviation from Hermiticity, max |A - A^H|.
template <typename Real>
Real hermitian_defect(const ComplexMatrix<Real>& a) {
  return skew_hermitian_defect(Complex<Real>(0, 1) * a);
}

}  // namespace qcayley
