#pragma once

#include <cstdint>
#include <random>

#include "qcayley/krotov.hpp"
#include "qcayley/models/synthetic.hpp"

namespace qcayley {

/// Small finite-level transfer problem for property sweeps.
template <typename Real>
struct ControlProblem {
  ControlledHamiltonian<Real> h;
  ControlField<Real> u0;
  Vector<Real> psi0;
  Vector<Real> target;
  CostWeights<Real> w;
};

struct SyntheticProblemSpec {
  Index levels = 8;
  Index channels = 1;
  std::uint64_t model_seed = 1234;
  double t_final = 5;
  Index n_steps = 200;
  double alpha = 0.1;
  Scheme scheme = Scheme::Cfc4;
};

/// Fixed synthetic model, psi0 = e_0, target from the sin^2 recipe with
/// `spec.scheme`, and u0 with i.i.d. standard normal samples drawn from
/// `control_seed`.
template <typename Real>
ControlProblem<Real> synthetic_control_problem(const SyntheticProblemSpec& spec,
                                               std::uint64_t control_seed) {
  auto h = synthetic_model<Real>(spec.levels, spec.channels, spec.model_seed);
  Vector<Real> psi0 = Vector<Real>::Zero(spec.levels);
  psi0(0) = 1;
  const Real t_final = Real(spec.t_final);
  Vector<Real> target = make_reference_target(h, spec.scheme, psi0, spec.n_steps, t_final);
  ControlField<Real> u0(spec.channels, 0, t_final, spec.n_steps);
  std::mt19937_64 rng(control_seed);
  std::normal_distribution<double> normal;
  for (Index n = 0; n < spec.n_steps; ++n) {
    for (Index j = 0; j < spec.channels; ++j) u0(j, n) = Real(normal(rng));
  }
  return {std::move(h), std::move(u0), std::move(psi0), std::move(target),
          CostWeights<Real>::uniform(spec.channels, Real(spec.alpha))};
}

}  // namespace qcayley
