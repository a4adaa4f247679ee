#pragma once

#include <cmath>
#include <functional>
#include <string_view>
#include <utility>

#include "qcayley/caylpol/window.hpp"
#include "qcayley/control.hpp"
#include "qcayley/integrators/propagate.hpp"
#include "qcayley/models/hamiltonian.hpp"

namespace qcayley {

/// A(t, psi) for psi' = A(t, psi) psi.
template <typename Real>
using StateGenerator = std::function<ComplexMatrix<Real>(Real, const Vector<Real>&)>;

/// Control values u(t), one per channel.
template <typename Real>
using ControlSignal = std::function<RealVector<Real>(Real)>;

template <typename Real>
StateGenerator<Real> make_generator(const ControlledHamiltonian<Real>& h, ControlSignal<Real> u) {
  h.validate();
  return [h, u = std::move(u)](Real t, const Vector<Real>& psi) {
    return assemble_A(h, u(t), &psi);
  };
}

/// u_j(t) = u_c sin(t) on every channel.
template <typename Real>
ControlSignal<Real> sinusoidal_signal(Index channels, Real amplitude) {
  return [channels, amplitude](Real t) {
    return RealVector<Real>::Constant(channels, amplitude * std::sin(t));
  };
}

/// u(t) = u[n] on [t_n, t_{n+1}); times past either end use the nearest sample.
template <typename Real>
ControlSignal<Real> piecewise_signal(const ControlField<Real>& field) {
  return [field](Real t) {
    const Real pos = std::floor((t - field.t0()) / field.dt());
    Index n = pos < 0 ? 0 : static_cast<Index>(pos);
    if (n >= field.steps()) n = field.steps() - 1;
    return RealVector<Real>(field.at(n));
  };
}

/// One Runge-Kutta-Munthe-Kaas step of order four. Uses the single-commutator
/// dexp-inverse truncation:
///   k1 = h A(t, y)
///   k2 = h A(t + h/2, exp(k1/2) y)
///   k3 = h A(t + h/2, exp(k2/2 - [k1, k2]/8) y)
///   k4 = h A(t + h, exp(k3) y)
///   y' = exp((k1 + 2 k2 + 2 k3 + k4)/6 - [k1, k4]/12) y
template <typename Real>
Vector<Real> rkmk4_step(const StateGenerator<Real>& a, Real t, const Vector<Real>& v, Real h) {
  if (!(h > 0)) throw ParameterError("step size must be positive");
  const auto flow = [](const ComplexMatrix<Real>& omega, const Vector<Real>& y) {
    return Vector<Real>(matrix_exponential<Real>(omega) * y);
  };
  const ComplexMatrix<Real> k1 = h * a(t, v);
  const ComplexMatrix<Real> k2 = h * a(t + h / 2, flow(Real(0.5) * k1, v));
  const ComplexMatrix<Real> k3 =
      h * a(t + h / 2, flow(Real(0.5) * k2 - Real(0.125) * commutator(k1, k2), v));
  const ComplexMatrix<Real> k4 = h * a(t + h, flow(k3, v));
  const ComplexMatrix<Real> omega =
      Real(1) / 6 * (k1 + Real(2) * k2 + Real(2) * k3 + k4) - Real(1) / 12 * commutator(k1, k4);
  return flow(omega, v);
}

template <typename Real>
Trajectory<Real> rkmk4_integrate(const StateGenerator<Real>& a, const Vector<Real>& v0, Real t0,
                                 Index n_steps, Real h) {
  if (n_steps < 1) throw ParameterError("n_steps must be >= 1");
  Trajectory<Real> out;
  out.times.push_back(t0);
  out.states.push_back(v0);
  for (Index n = 0; n < n_steps; ++n) {
    const Real t = t0 + Real(n) * h;
    out.states.push_back(
        detail::guarded_step<Real>(n, [&] { return rkmk4_step(a, t, out.states.back(), h); }));
    out.times.push_back(t0 + Real(n + 1) * h);
  }
  return out;
}

/// One CaylPol step from the newest window entry (time t, state v): the state
/// is predicted at the two Gauss nodes by extrapolating the window, A is
/// evaluated there, and the three-factor Cayley composition of the linear
/// scheme is applied to v.
template <typename Real>
Vector<Real> caylpol_step(const StateGenerator<Real>& a, const InterpolationWindow<Real>& window,
                          const CfcCoefficients<Real>& coeffs, const Vector<Real>& v, Real h) {
  if (!(h > 0)) throw ParameterError("step size must be positive");
  if (!window.full()) throw StateError("interpolation window is not full");
  const Real t = window.last_time();
  const Real t1 = t + coeffs.c1 * h;
  const Real t2 = t + coeffs.c2 * h;
  const Vector<Real> p1 = lagrange_interpolate(window, t1);
  const Vector<Real> p2 = lagrange_interpolate(window, t2);
  if (!p1.allFinite() || !p2.allFinite()) {
    throw NumericError("non-finite predicted state at t = " + std::to_string(double(t)));
  }
  const auto stages = cfc4_stage_generators(a(t1, p1), a(t2, p2), coeffs);
  return cfc4_apply_stages(stages, h, v, double(t));
}

enum class StartupScheme { Rkmk4, Cfc4 };

inline std::string_view to_string(StartupScheme s) {
  return s == StartupScheme::Rkmk4 ? "rkmk4" : "cfc4";
}

inline StartupScheme parse_startup_scheme(std::string_view name) {
  if (name == "rkmk4") return StartupScheme::Rkmk4;
  if (name == "cfc4") return StartupScheme::Cfc4;
  throw ParameterError("unknown startup scheme '" + std::string(name) +
                       "' (expected rkmk4 or cfc4)");
}

/// Fills a window of capacity k with the states at t0, t0 + h, ..., t0 + (k-1)h.
/// The CFC4 option freezes the state dependence of A over each step, which is
/// exact when A does not depend on the state.
template <typename Real>
InterpolationWindow<Real> startup(const StateGenerator<Real>& a, const Vector<Real>& v0, Real t0,
                                  Index k, Real h,
                                  StartupScheme scheme = StartupScheme::Rkmk4) {
  if (k < 2) throw ParameterError("startup size k must be >= 2");
  if (!(h > 0)) throw ParameterError("step size must be positive");
  InterpolationWindow<Real> window(k);
  window.push(t0, v0);
  Vector<Real> v = v0;
  for (Index n = 0; n + 1 < k; ++n) {
    const Real t = t0 + Real(n) * h;
    v = detail::guarded_step<Real>(n, [&] {
      if (scheme == StartupScheme::Rkmk4) return rkmk4_step(a, t, v, h);
      const OperatorSampler<Real> frozen = [&](Real s) { return a(s, v); };
      return cfc4_step(frozen, t, h, v);
    });
    window.push(t0 + Real(n + 1) * h, v);
  }
  return window;
}

/// Startup followed by CaylPol steps; returns the states at t0, t0 + h, ...,
/// t0 + n_steps h.
template <typename Real>
Trajectory<Real> caylpol_integrate(const StateGenerator<Real>& a, const Vector<Real>& v0, Real t0,
                                   Index k, Index n_steps, Real h,
                                   StartupScheme scheme = StartupScheme::Rkmk4) {
  if (n_steps < k) throw ParameterError("caylpol_integrate needs n_steps >= k");
  InterpolationWindow<Real> window = startup(a, v0, t0, k, h, scheme);
  Trajectory<Real> out;
  out.times.reserve(static_cast<std::size_t>(n_steps + 1));
  out.states.reserve(static_cast<std::size_t>(n_steps + 1));
  for (Index i = 0; i < k; ++i) {
    out.times.push_back(window.time(i));
    out.states.push_back(window.state(i));
  }
  const auto coeffs = CfcCoefficients<Real>::standard();
  for (Index n = k - 1; n < n_steps; ++n) {
    Vector<Real> next = detail::guarded_step<Real>(
        n, [&] { return caylpol_step(a, window, coeffs, window.last_state(), h); });
    const Real t = t0 + Real(n + 1) * h;
    out.times.push_back(t);
    out.states.push_back(next);
    window.push(t, std::move(next));
  }
  return out;
}

}  // namespace qcayley
