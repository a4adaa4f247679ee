#pragma once

#include <cmath>
#include <functional>

#include "qcayley/errors.hpp"
#include "qcayley/linalg/types.hpp"

namespace qcayley {

/// Piecewise-constant control samples: channel j holds u_j[n] on
/// [t_n, t_{n+1}), t_n = t0 + n dt.
template <typename Real>
class ControlField {
 public:
  ControlField(Index channels, Real t0, Real t_final, Index n_steps)
      : ControlField(RealMatrix<Real>::Zero(channels, n_steps), t0, t_final) {}

  ControlField(RealMatrix<Real> samples, Real t0, Real t_final)
      : samples_(std::move(samples)), t0_(t0), t_final_(t_final) {
    if (samples_.cols() < 1) throw ParameterError("control field needs at least one time step");
    if (!(t_final > t0)) throw ParameterError("control field needs t_final > t0");
    if (!samples_.allFinite()) throw ParameterError("control samples must be finite");
  }

  /// Samples f(t_n + dt/2) on every step, for every channel.
  static ControlField sampled(Index channels, Real t0, Real t_final, Index n_steps,
                              const std::function<Real(Real)>& f) {
    ControlField field(channels, t0, t_final, n_steps);
    for (Index n = 0; n < n_steps; ++n) {
      field.samples_.col(n).setConstant(f(field.time(n) + field.dt() / 2));
    }
    return field;
  }

  Index channels() const { return samples_.rows(); }
  Index steps() const { return samples_.cols(); }
  Real t0() const { return t0_; }
  Real t_final() const { return t_final_; }
  Real dt() const { return (t_final_ - t0_) / Real(steps()); }
  Real time(Index n) const { return t0_ + Real(n) * dt(); }

  auto at(Index n) const { return samples_.col(n); }
  Real& operator()(Index j, Index n) { return samples_(j, n); }
  Real operator()(Index j, Index n) const { return samples_(j, n); }

  const RealMatrix<Real>& samples() const { return samples_; }
  RealMatrix<Real>& samples() { return samples_; }

 private:
  RealMatrix<Real> samples_;
  Real t0_;
  Real t_final_;
};

}  // namespace qcayley
