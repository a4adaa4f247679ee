#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "qcayley/integrators/coefficients.hpp"
#include "qcayley/linalg.hpp"

namespace qcayley {

/// A(t) for a linear problem psi' = A(t) psi.
template <typename Real>
using OperatorSampler = std::function<ComplexMatrix<Real>(Real)>;

enum class Scheme { CrankNicolson, Cfc4, CayleyMagnus4, CfExp4 };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::CrankNicolson: return "cn";
    case Scheme::Cfc4: return "cfc4";
    case Scheme::CayleyMagnus4: return "cayley_magnus4";
    case Scheme::CfExp4: return "cf_exp4";
  }
  return "unknown";
}

inline Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::CrankNicolson, Scheme::Cfc4, Scheme::CayleyMagnus4, Scheme::CfExp4}) {
    if (name == to_string(s)) return s;
  }
  throw ParameterError("unknown scheme '" + std::string(name) +
                       "' (expected cn, cfc4, cayley_magnus4 or cf_exp4)");
}

/// (I - omega/2)^{-1} (I + omega/2) v.
template <typename Real>
Vector<Real> cayley_apply(const ComplexMatrix<Real>& omega, const Vector<Real>& v,
                          std::optional<double> time = std::nullopt) {
  if (omega.rows() != v.size()) throw ShapeError("cayley_apply: dimension mismatch");
#ifndef NDEBUG
  if (skew_hermitian_defect(omega) > Real(1e-10) * std::max<Real>(1, omega.norm())) {
    throw UsageError("cayley_apply: generator is not skew-Hermitian");
  }
#endif
  const ComplexMatrix<Real> half = Real(0.5) * omega;
  const Vector<Real> rhs = v + half.apply(v);
  return solve_shifted(ComplexMatrix<Real>::identity(v.size()) - half, rhs, time);
}

template <typename Real>
Vector<Real> crank_nicolson_step(const OperatorSampler<Real>& a, Real t, Real dt,
                                 const Vector<Real>& v) {
  return cayley_apply(dt * a(t + dt / 2), v, double(t));
}

/// The three stage generators (A~_1, A~_2, A~_3) built from the samples at
/// the two Gauss nodes.
template <typename Real>
std::array<ComplexMatrix<Real>, 3> cfc4_stage_generators(const ComplexMatrix<Real>& first,
                                                        const ComplexMatrix<Real>& second,
                                                        const CfcCoefficients<Real>& c) {
  const ComplexMatrix<Real> mean = Real(0.5) * (first + second);
  const ComplexMatrix<Real> diff = (std::sqrt(Real(3)) / 2) * (second - first);
  std::array<ComplexMatrix<Real>, 3> out;
  const auto weights = c.stages();
  for (std::size_t l = 0; l < 3; ++l) {
    out[l] = weights[l][1] == Real(0) ? weights[l][0] * mean
                                      : weights[l][0] * mean + weights[l][1] * diff;
  }
  return out;
}

/// Cay(dt A~_1) Cay(dt A~_2) Cay(dt A~_3) v, the rightmost factor acting first.
template <typename Real>
Vector<Real> cfc4_apply_stages(const std::array<ComplexMatrix<Real>, 3>& stages, Real dt,
                               const Vector<Real>& v, std::optional<double> time = std::nullopt) {
  Vector<Real> out = cayley_apply(dt * stages[2], v, time);
  out = cayley_apply(dt * stages[1], out, time);
  return cayley_apply(dt * stages[0], out, time);
}

template <typename Real>
Vector<Real> cfc4_step(const OperatorSampler<Real>& a, Real t, Real dt, const Vector<Real>& v,
                       const CfcCoefficients<Real>& c = CfcCoefficients<Real>::standard()) {
  const auto stages = cfc4_stage_generators(a(t + c.c1 * dt), a(t + c.c2 * dt), c);
  return cfc4_apply_stages(stages, dt, v, double(t));
}

/// Cay(A_1 - [A_1, A_2]/6 - A_1^3/12) v with A_1 = dt (A^1 + A^2)/2 and
/// A_2 = dt sqrt(3)/2 (A^2 - A^1).
template <typename Real>
Vector<Real> cayley_magnus4_step(const OperatorSampler<Real>& a, Real t, Real dt,
                                 const Vector<Real>& v) {
  const ComplexMatrix<Real> first = a(t + GaussNodes<Real>::first() * dt);
  const ComplexMatrix<Real> second = a(t + GaussNodes<Real>::second() * dt);
  const ComplexMatrix<Real> a1 = (dt / 2) * (first + second);
  const ComplexMatrix<Real> a2 = (dt * std::sqrt(Real(3)) / 2) * (second - first);
  const ComplexMatrix<Real> a1_cubed = a1 * (a1 * a1);
  const ComplexMatrix<Real> omega =
      a1 - Real(1) / 6 * commutator(a1, a2) - Real(1) / 12 * a1_cubed;
  return cayley_apply(omega, v, double(t));
}

/// exp(dt (x2 A^1 + x1 A^2)) exp(dt (x1 A^1 + x2 A^2)) v with dense
/// exponentials. Identical samples share one exponential.
template <typename Real>
Vector<Real> cf_exp4_step(const OperatorSampler<Real>& a, Real t, Real dt,
                          const Vector<Real>& v) {
  const ComplexMatrix<Real> first = a(t + GaussNodes<Real>::first() * dt);
  const ComplexMatrix<Real> second = a(t + GaussNodes<Real>::second() * dt);
  const Real x1 = CfExpCoefficients<Real>::x1();
  const Real x2 = CfExpCoefficients<Real>::x2();
  if (first == second) {
    const DenseMatrix<Real> half = matrix_exponential<Real>((dt / 2) * first);
    return half * (half * v);
  }
  const DenseMatrix<Real> right = matrix_exponential<Real>(dt * (x1 * first + x2 * second));
  const DenseMatrix<Real> left = matrix_exponential<Real>(dt * (x2 * first + x1 * second));
  return left * (right * v);
}

template <typename Real>
Vector<Real> step(Scheme scheme, const OperatorSampler<Real>& a, Real t, Real dt,
                  const Vector<Real>& v) {
  switch (scheme) {
    case Scheme::CrankNicolson: return crank_nicolson_step(a, t, dt, v);
    case Scheme::Cfc4: return cfc4_step(a, t, dt, v);
    case Scheme::CayleyMagnus4: return cayley_magnus4_step(a, t, dt, v);
    case Scheme::CfExp4: return cf_exp4_step(a, t, dt, v);
  }
  throw UsageError("unknown scheme");
}

}  // namespace qcayley
