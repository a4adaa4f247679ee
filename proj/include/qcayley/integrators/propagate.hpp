#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qcayley/control.hpp"
#include "qcayley/integrators/steps.hpp"
#include "qcayley/models/hamiltonian.hpp"

namespace qcayley {

/// States at successive grid times. When only the endpoint was requested the
/// trajectory holds just (t_final, psi_final).
template <typename Real>
struct Trajectory {
  std::vector<Real> times;
  std::vector<Vector<Real>> states;

  const Vector<Real>& final_state() const { return states.back(); }
  std::size_t size() const { return states.size(); }
};

namespace detail {

template <typename Real, typename Fn>
Vector<Real> guarded_step(Index n, Fn&& fn) {
  try {
    return fn();
  } catch (const SingularityError& e) {
    throw SingularityError(std::string(e.what()) + " at step " + std::to_string(n), e.time());
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " at step " + std::to_string(n));
  }
}

}  // namespace detail

/// Composes `n_steps` steps of `scheme` for psi' = A(t) psi from t0.
template <typename Real>
Trajectory<Real> propagate(Scheme scheme, const OperatorSampler<Real>& a, Real t0, Real dt,
                           Index n_steps, const Vector<Real>& v0, bool store_trajectory) {
  Trajectory<Real> out;
  Vector<Real> v = v0;
  if (store_trajectory) {
    out.times.reserve(static_cast<std::size_t>(n_steps + 1));
    out.states.reserve(static_cast<std::size_t>(n_steps + 1));
    out.times.push_back(t0);
    out.states.push_back(v);
  }
  for (Index n = 0; n < n_steps; ++n) {
    const Real t = t0 + Real(n) * dt;
    v = detail::guarded_step<Real>(n, [&] { return step(scheme, a, t, dt, v); });
    if (store_trajectory) {
      out.times.push_back(t + dt);
      out.states.push_back(v);
    }
  }
  if (!store_trajectory) {
    out.times.push_back(t0 + Real(n_steps) * dt);
    out.states.push_back(std::move(v));
  }
  return out;
}

/// Sampler for step n of a piecewise-constant control: both Gauss nodes see
/// the same control value u[n].
template <typename Real>
OperatorSampler<Real> step_sampler(const ControlledHamiltonian<Real>& h,
                                   const ControlField<Real>& u, Index n) {
  auto a = std::make_shared<const ComplexMatrix<Real>>(assemble_A(h, RealVector<Real>(u.at(n))));
  return [a](Real) { return *a; };
}

template <typename Real>
void check_linear_problem(const ControlledHamiltonian<Real>& h, const ControlField<Real>& u) {
  if (!h.is_linear()) {
    throw UsageError("nonlinear model: use the CaylPol integrator (caylpol_integrate) instead");
  }
  if (u.channels() != h.control_count()) {
    throw ShapeError("control field channel count does not match the model");
  }
}

/// Linear propagation on the control field's time grid.
template <typename Real>
Trajectory<Real> propagate(Scheme scheme, const ControlledHamiltonian<Real>& h,
                           const ControlField<Real>& u, const Vector<Real>& v0,
                           bool store_trajectory) {
  check_linear_problem(h, u);
  if (v0.size() != h.dimension()) throw ShapeError("initial state dimension mismatch");
  Trajectory<Real> out;
  Vector<Real> v = v0;
  const Real dt = u.dt();
  if (store_trajectory) {
    out.times.push_back(u.t0());
    out.states.push_back(v);
  }
  for (Index n = 0; n < u.steps(); ++n) {
    const auto sampler = step_sampler(h, u, n);
    v = detail::guarded_step<Real>(n, [&] { return step(scheme, sampler, u.time(n), dt, v); });
    if (store_trajectory) {
      out.times.push_back(u.time(n + 1));
      out.states.push_back(v);
    }
  }
  if (!store_trajectory) {
    out.times.push_back(u.t_final());
    out.states.push_back(std::move(v));
  }
  return out;
}

}  // namespace qcayley
