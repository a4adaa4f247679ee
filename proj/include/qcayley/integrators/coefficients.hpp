#pragma once

#include <array>
#include <cmath>

namespace qcayley {

/// Gauss-Legendre nodes of the two-point rule on [0, 1].
template <typename Real>
struct GaussNodes {
  static Real offset() { return std::sqrt(Real(3)) / 6; }
  static Real first() { return Real(0.5) - offset(); }
  static Real second() { return Real(0.5) + offset(); }
};

/// Nodes and stage weights of the symmetric three-stage fourth-order
/// commutator-free Cayley scheme.
///
/// Stage l uses alpha_l1 * M + alpha_l2 * D, where M = (A1 + A2)/2 and
/// D = (sqrt(3)/2)(A2 - A1) are the Gauss-Legendre mean and difference of the
/// two operator samples. The weights are the Yoshida triple-jump factor
/// alpha_11 = 1/(2 - 2^{1/3}) for the mean and alpha_11(1 - alpha_11) for the
/// difference, which reproduces the -[M, D]/6 Magnus correction.
template <typename Real>
struct CfcCoefficients {
  Real c1, c2;
  Real a11, a12;
  Real a21, a22;
  Real a31, a32;

  static CfcCoefficients standard() {
    const Real cbrt2 = std::cbrt(Real(2));
    const Real a11 = cbrt2 / 3 + cbrt2 * cbrt2 / 6 + Real(2) / 3;
    const Real a12 = a11 - a11 * a11;
    return {GaussNodes<Real>::first(), GaussNodes<Real>::second(),
            a11, a12,
            1 - 2 * a11, 0,
            a11, -a12};
  }

  std::array<std::array<Real, 2>, 3> stages() const {
    return {{{a11, a12}, {a21, a22}, {a31, a32}}};
  }
};

/// Weights of the two-exponential fourth-order commutator-free Magnus scheme:
/// exp(dt (x2 A1 + x1 A2)) exp(dt (x1 A1 + x2 A2)).
template <typename Real>
struct CfExpCoefficients {
  static Real x1() { return Real(0.25) + std::sqrt(Real(3)) / 6; }
  static Real x2() { return Real(0.25) - std::sqrt(Real(3)) / 6; }
};

}  // namespace qcayley
