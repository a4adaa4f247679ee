#pragma once

#include <chrono>
#include <functional>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "qcayley/control.hpp"
#include "qcayley/integrators/propagate.hpp"
#include "qcayley/models/states.hpp"

namespace qcayley {

/// Penalty weights alpha_j > 0, one per control channel.
template <typename Real>
struct CostWeights {
  RealVector<Real> alpha;

  static CostWeights uniform(Index channels, Real value) {
    return {RealVector<Real>::Constant(channels, value)};
  }

  void validate(Index channels) const {
    if (alpha.size() != channels) throw ShapeError("one penalty weight per control channel");
    if (!(alpha.array() > 0).all() || !alpha.allFinite()) {
      throw ParameterError("penalty weights must be finite and > 0");
    }
  }
};

/// How the new control is formed from g_j[n] = Im<lambda(t_n), H_j psi'(t_n)> / alpha_j.
///   Absolute:    u'_j[n] = g_j[n]            (maximizes the pointwise PMP Hamiltonian)
///   Incremental: u'_j[n] = u_j[n] + g_j[n]
enum class UpdateRule { Absolute, Incremental };

inline std::string_view to_string(UpdateRule r) {
  return r == UpdateRule::Absolute ? "absolute" : "incremental";
}

inline UpdateRule parse_update_rule(std::string_view name) {
  if (name == "absolute") return UpdateRule::Absolute;
  if (name == "incremental") return UpdateRule::Incremental;
  throw ParameterError("unknown update rule '" + std::string(name) +
                       "' (expected absolute or incremental)");
}

/// Where lambda and psi' are sampled when forming g_j[n].
///   GridTime:    lambda(t_n) and psi'(t_n).
///   StepAverage: (lambda_n + lambda_{n+1})/2 and (psi'_n + psi'_{n+1})/2, where
///                psi'_{n+1} depends on u'[n]; the implicit equation is solved
///                with Broyden iterations. For Crank-Nicolson this makes every
///                update decrease J exactly.
enum class UpdateSampling { GridTime, StepAverage };

inline std::string_view to_string(UpdateSampling s) {
  return s == UpdateSampling::GridTime ? "grid_time" : "step_average";
}

inline UpdateSampling parse_update_sampling(std::string_view name) {
  if (name == "grid_time") return UpdateSampling::GridTime;
  if (name == "step_average") return UpdateSampling::StepAverage;
  throw ParameterError("unknown update sampling '" + std::string(name) +
                       "' (expected grid_time or step_average)");
}

struct KrotovSettings {
  double epsilon = 1e-5;
  Index max_iterations = 50;
  Scheme scheme = Scheme::Cfc4;
  UpdateRule rule = UpdateRule::Absolute;
  UpdateSampling sampling = UpdateSampling::StepAverage;
  /// Throw instead of recording a diagnostic when J increases by more than 1e-10.
  bool strict_monotonicity = false;

  void validate() const {
    if (!(epsilon > 0)) throw ParameterError("epsilon must be > 0");
    if (max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
  }
};

enum class StopReason { CostStalled, FidelityReached, MaxIterations };

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::CostStalled: return "cost_stalled";
    case StopReason::FidelityReached: return "fidelity_reached";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

template <typename Real>
struct IterationRecord {
  Index iteration;
  Real cost;
  Real fidelity;
  ControlField<Real> control;
};

/// records[0] is the evaluation of the initial guess; records[k] follows the
/// k-th control update.
template <typename Real>
struct KrotovRun {
  std::vector<IterationRecord<Real>> records;
  bool converged = false;
  Index iterations = 0;
  StopReason stop_reason = StopReason::MaxIterations;
  double wall_seconds = 0;
  Vector<Real> final_state;
  std::vector<std::string> diagnostics;

  const ControlField<Real>& final_control() const { return records.back().control; }
  Real final_fidelity() const { return records.back().fidelity; }
  Real final_cost() const { return records.back().cost; }
};

/// |<target, psi>|^2 under the weighted inner product.
template <typename Real>
Real fidelity(const Vector<Real>& psi, const Vector<Real>& target, Real weight = 1) {
  if (psi.size() != target.size()) throw ShapeError("fidelity: state dimensions differ");
  return std::norm(inner(target, psi, weight));
}

/// (1 - F)/2 + sum_j alpha_j/2 sum_n u_j[n]^2 dt.
template <typename Real>
Real cost(const ControlField<Real>& u, const CostWeights<Real>& w, Real fid) {
  if (w.alpha.size() != u.channels()) throw ShapeError("one penalty weight per control channel");
  Real penalty = 0;
  for (Index j = 0; j < u.channels(); ++j) {
    penalty += w.alpha(j) / 2 * u.samples().row(j).squaredNorm() * u.dt();
  }
  return (1 - fid) / 2 + penalty;
}

/// lambda(T) = <target, psi(T)> target.
template <typename Real>
Vector<Real> terminal_adjoint(const Vector<Real>& psi_final, const Vector<Real>& target,
                              Real weight = 1) {
  if (psi_final.size() != target.size()) throw ShapeError("terminal_adjoint: dimensions differ");
  return inner(target, psi_final, weight) * target;
}

/// Adjoint states at every grid time, obtained by stepping the same scheme
/// with negative step from T back to t0. times/states are in increasing time.
template <typename Real>
Trajectory<Real> backward_propagate(Scheme scheme, const ControlledHamiltonian<Real>& h,
                                    const ControlField<Real>& u, const Vector<Real>& lambda_t) {
  if (!h.is_linear()) {
    throw UsageError("adjoint propagation is only supported for linear models (g = 0)");
  }
  check_linear_problem(h, u);
  if (lambda_t.size() != h.dimension()) throw ShapeError("adjoint dimension mismatch");
  const Index n_steps = u.steps();
  Trajectory<Real> out;
  out.times.resize(static_cast<std::size_t>(n_steps + 1));
  out.states.resize(static_cast<std::size_t>(n_steps + 1));
  out.times.back() = u.t_final();
  out.states.back() = lambda_t;
  for (Index n = n_steps - 1; n >= 0; --n) {
    const auto sampler = step_sampler(h, u, n);
    const auto& next = out.states[static_cast<std::size_t>(n + 1)];
    out.states[static_cast<std::size_t>(n)] = detail::guarded_step<Real>(
        n, [&] { return step(scheme, sampler, u.time(n + 1), -u.dt(), next); });
    out.times[static_cast<std::size_t>(n)] = u.time(n);
  }
  return out;
}

/// Im<lambda, H_j psi> under the model's weighted inner product.
template <typename Real>
Real control_overlap(const ControlledHamiltonian<Real>& h, Index j, const Vector<Real>& lambda,
                     const Vector<Real>& psi) {
  return inner(lambda, h.controls[static_cast<std::size_t>(j)].apply(psi), h.weight).imag();
}

template <typename Real>
struct CostEvaluation {
  Real cost;
  Real fidelity;
  Vector<Real> final_state;
};

template <typename Real>
CostEvaluation<Real> evaluate_cost(Scheme scheme, const ControlledHamiltonian<Real>& h,
                                   const ControlField<Real>& u, const Vector<Real>& psi0,
                                   const Vector<Real>& target, const CostWeights<Real>& w) {
  Vector<Real> psi_t = propagate(scheme, h, u, psi0, false).final_state();
  const Real fid = fidelity(psi_t, target, h.weight);
  return {cost(u, w, fid), fid, std::move(psi_t)};
}

namespace detail {

/// Forms next[:, n] from the old control, the stored adjoint and the new state
/// psi at t_n, and returns psi advanced over step n under next[:, n].
template <typename Real>
Vector<Real> sequential_update(const ControlledHamiltonian<Real>& h, const ControlField<Real>& u,
                               ControlField<Real>& next, Index n, const Trajectory<Real>& adjoint,
                               const Vector<Real>& psi, const CostWeights<Real>& w,
                               const KrotovSettings& settings) {
  const auto apply_rule = [&](Index j, const Vector<Real>& lambda, const Vector<Real>& state) {
    const Real g = control_overlap(h, j, lambda, state) / w.alpha(j);
    next(j, n) = settings.rule == UpdateRule::Absolute ? g : u(j, n) + g;
  };
  const auto advance = [&] {
    return step(settings.scheme, step_sampler(h, next, n), u.time(n), u.dt(), psi);
  };
  const auto i = static_cast<std::size_t>(n);
  for (Index j = 0; j < u.channels(); ++j) apply_rule(j, adjoint.states[i], psi);
  if (settings.sampling == UpdateSampling::GridTime) return advance();

  // Solve x = rule(g(x)) for x = u'[:, n] with Broyden's method, starting
  // from the grid-time value and an identity-like Jacobian.
  const Vector<Real> lambda = (adjoint.states[i] + adjoint.states[i + 1]) / 2;
  const Index m = u.channels();
  Vector<Real> psi_next;
  const auto residual = [&](const RealVector<Real>& x) {
    next.samples().col(n) = x;
    psi_next = advance();
    const Vector<Real> mid = (psi + psi_next) / 2;
    for (Index j = 0; j < m; ++j) apply_rule(j, lambda, mid);
    RealVector<Real> r = RealVector<Real>(next.at(n)) - x;
    next.samples().col(n) = x;
    return r;
  };
  RealVector<Real> x = next.at(n);
  RealVector<Real> r = residual(x);
  RealMatrix<Real> jac = -RealMatrix<Real>::Identity(m, m);
  for (int iter = 0; iter < 50; ++iter) {
    const Real scale = std::max<Real>(1, x.template lpNorm<Eigen::Infinity>());
    if (r.template lpNorm<Eigen::Infinity>() <= Real(1e-13) * scale) break;
    Eigen::FullPivLU<RealMatrix<Real>> lu(jac);
    const RealVector<Real> s = lu.isInvertible() ? RealVector<Real>(-lu.solve(r)) : r;
    if (!s.allFinite()) break;
    const RealVector<Real> r_new = residual(x + s);
    x += s;
    const Real ss = s.squaredNorm();
    if (ss > 0) jac += ((r_new - r) - jac * s) * s.transpose() / ss;
    r = r_new;
  }
  return psi_next;
}

}  // namespace detail

/// Sequential Krotov iteration. Each update takes lambda from the backward pass
/// under the previous control and psi from the forward sweep under the new
/// control, so u'[n] is formed before psi' is advanced over step n.
template <typename Real>
KrotovRun<Real> krotov_optimize(const ControlledHamiltonian<Real>& h, const ControlField<Real>& u0,
                                const Vector<Real>& psi0, const Vector<Real>& target,
                                const CostWeights<Real>& w, const KrotovSettings& settings) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  settings.validate();
  h.validate();
  check_linear_problem(h, u0);
  w.validate(h.control_count());
  if (psi0.size() != h.dimension() || target.size() != h.dimension()) {
    throw ShapeError("initial and target states must match the model dimension");
  }

  KrotovRun<Real> run;
  ControlField<Real> u = u0;
  CostEvaluation<Real> current = evaluate_cost(settings.scheme, h, u, psi0, target, w);
  run.records.push_back({0, current.cost, current.fidelity, u});

  for (Index k = 1; k <= settings.max_iterations; ++k) {
    ControlField<Real> next = u;
    Vector<Real> psi = psi0;
    try {
      const Trajectory<Real> adjoint = backward_propagate(
          settings.scheme, h, u, terminal_adjoint(current.final_state, target, h.weight));
      for (Index n = 0; n < u.steps(); ++n) {
        psi = detail::guarded_step<Real>(n, [&] {
          return detail::sequential_update(h, u, next, n, adjoint, psi, w, settings);
        });
      }
    } catch (const SingularityError& e) {
      throw SingularityError("krotov iteration " + std::to_string(k) + ": " + e.what(), e.time());
    } catch (const NumericError& e) {
      throw NumericError("krotov iteration " + std::to_string(k) + ": " + e.what());
    }
    if (!next.samples().allFinite()) {
      throw NumericError("krotov iteration " + std::to_string(k) + ": control became non-finite");
    }

    const Real fid = fidelity(psi, target, h.weight);
    const Real j_new = cost(next, w, fid);
    run.records.push_back({k, j_new, fid, next});
    run.iterations = k;
    if (j_new > current.cost + Real(1e-10)) {
      const std::string msg = "cost increased at iteration " + std::to_string(k) + " by " +
                              std::to_string(double(j_new - current.cost));
      if (settings.strict_monotonicity) throw NumericError(msg);
      run.diagnostics.push_back(msg);
    }
    const Real change = std::abs(current.cost - j_new);
    u = std::move(next);
    current = {j_new, fid, std::move(psi)};
    if (change < Real(settings.epsilon)) {
      run.converged = true;
      run.stop_reason = StopReason::CostStalled;
      break;
    }
    if (1 - fid < Real(settings.epsilon)) {
      run.converged = true;
      run.stop_reason = StopReason::FidelityReached;
      break;
    }
  }
  run.final_state = std::move(current.final_state);
  run.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
  return run;
}

/// Endpoint of psi0 under u_j(t) = sin^2(t), sampled at step midpoints on
/// [0, T], with the given scheme.
template <typename Real>
Vector<Real> make_reference_target(const ControlledHamiltonian<Real>& h, Scheme scheme,
                                   const Vector<Real>& psi0, Index n_steps, Real t_final) {
  const auto u = ControlField<Real>::sampled(h.control_count(), 0, t_final, n_steps, [](Real t) {
    const Real s = std::sin(t);
    return s * s;
  });
  return propagate(scheme, h, u, psi0, false).final_state();
}

/// max_{j,n} |alpha_j u_j[n] - Im<lambda-bar_n, H_j psi-bar_n>|, with psi and
/// lambda averaged over step n, the same sampling the default update uses.
template <typename Real>
Real pmp_residual(const ControlledHamiltonian<Real>& h, const ControlField<Real>& u,
                  const Trajectory<Real>& states, const Trajectory<Real>& adjoint,
                  const CostWeights<Real>& w) {
  const auto needed = static_cast<std::size_t>(u.steps() + 1);
  if (states.size() != needed || adjoint.size() != needed) {
    throw ShapeError("pmp_residual: trajectories must cover every grid time");
  }
  Real worst = 0;
  for (Index n = 0; n < u.steps(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    const Vector<Real> psi = (states.states[i] + states.states[i + 1]) / 2;
    const Vector<Real> lambda = (adjoint.states[i] + adjoint.states[i + 1]) / 2;
    for (Index j = 0; j < u.channels(); ++j) {
      worst = std::max(worst, std::abs(w.alpha(j) * u(j, n) - control_overlap(h, j, lambda, psi)));
    }
  }
  return worst;
}

namespace detail {

/// <lambda, (dU/du_j) psi> for one step whose generator a is frozen over the
/// step, with da = dA/du_j. U is the scheme's step map; for the Cayley family
/// it is a product of factors Cay(Omega_l), and
///   d Cay(Omega) = (I - Omega/2)^{-1} dOmega (I - Omega/2)^{-1}.
template <typename Real>
Complex<Real> step_sensitivity(Scheme scheme, const ComplexMatrix<Real>& a,
                               const ComplexMatrix<Real>& da, Real dt, const Vector<Real>& psi,
                               const Vector<Real>& lambda, Real weight) {
  using Apply = std::function<Vector<Real>(const Vector<Real>&)>;
  std::vector<std::pair<ComplexMatrix<Real>, Apply>> factors;  // applied first to last
  const auto scaled = [&](Real theta) {
    return std::pair<ComplexMatrix<Real>, Apply>(
        theta * a, [&da, theta](const Vector<Real>& v) { return Vector<Real>(theta * da.apply(v)); });
  };
  switch (scheme) {
    case Scheme::CrankNicolson: factors.push_back(scaled(dt)); break;
    case Scheme::Cfc4: {
      // Equal samples within a step leave only the mean weights.
      const auto c = CfcCoefficients<Real>::standard();
      for (Real w : {c.a31, c.a21, c.a11}) factors.push_back(scaled(w * dt));
      break;
    }
    case Scheme::CayleyMagnus4: {
      // Omega = dt A - dt^3 A^3 / 12 once the commutator term vanishes.
      const ComplexMatrix<Real> a1 = dt * a;
      const ComplexMatrix<Real> a1_sq = a1 * a1;
      factors.emplace_back(a1 - Real(1) / 12 * (a1 * a1_sq), [&da, a1, a1_sq, dt](const Vector<Real>& v) {
        const Vector<Real> d1 = dt * da.apply(v);
        const Vector<Real> cubic =
            a1_sq.apply(Vector<Real>(dt * da.apply(v))) +
            a1.apply(Vector<Real>(dt * da.apply(a1.apply(v)))) +
            Vector<Real>(dt * da.apply(a1_sq.apply(v)));
        return Vector<Real>(d1 - cubic / Real(12));
      });
      break;
    }
    case Scheme::CfExp4: {
      // U = E E with E = exp(X), X = dt A / 2; the Frechet derivative of exp
      // is the upper-right block of exp([[X, dX], [0, X]]).
      const Index n = a.rows();
      DenseMatrix<Real> block = DenseMatrix<Real>::Zero(2 * n, 2 * n);
      block.topLeftCorner(n, n) = (dt / 2) * a.to_dense();
      block.bottomRightCorner(n, n) = block.topLeftCorner(n, n);
      block.topRightCorner(n, n) = (dt / 2) * da.to_dense();
      const DenseMatrix<Real> big = matrix_exponential<Real>(block);
      const DenseMatrix<Real> e = big.topLeftCorner(n, n);
      const DenseMatrix<Real> de = big.topRightCorner(n, n);
      const Vector<Real> half = e * psi;
      return inner(lambda, Vector<Real>(de * half + e * (de * psi)), weight);
    }
  }
  std::vector<Vector<Real>> before{psi};
  for (std::size_t l = 0; l + 1 < factors.size(); ++l) {
    before.push_back(cayley_apply(factors[l].first, before.back()));
  }
  Complex<Real> total = 0;
  Vector<Real> mu = lambda;
  for (std::size_t l = factors.size(); l-- > 0;) {
    const auto& [omega, domega] = factors[l];
    const ComplexMatrix<Real> left = ComplexMatrix<Real>::identity(a.rows()) - Real(0.5) * omega;
    const Vector<Real> inside = solve_shifted(left, before[l]);
    total += inner(mu, solve_shifted(left, domega(inside)), weight);
    mu = cayley_apply(Real(-1) * omega, mu);  // Cay(Omega)^dagger = Cay(-Omega)
  }
  return total;
}

}  // namespace detail

/// dJ/du_j[n] of the discrete cost for the given scheme:
///   dt alpha_j u_j[n] - Re<lambda_{n+1}, (dU_n/du_j[n]) psi_n>,
/// where U_n is the step map and lambda comes from backward_propagate. For
/// Crank-Nicolson this equals dt (alpha_j u_j[n] - Im<lambda-bar, H_j psi-bar>)
/// with step-averaged states.
template <typename Real>
RealMatrix<Real> control_gradient(Scheme scheme, const ControlledHamiltonian<Real>& h,
                                  const ControlField<Real>& u, const Trajectory<Real>& states,
                                  const Trajectory<Real>& adjoint, const CostWeights<Real>& w) {
  const auto needed = static_cast<std::size_t>(u.steps() + 1);
  if (states.size() != needed || adjoint.size() != needed) {
    throw ShapeError("control_gradient: trajectories must cover every grid time");
  }
  std::vector<ComplexMatrix<Real>> derivatives;
  for (const auto& op : h.controls) derivatives.push_back(Complex<Real>(0, -1) * op);
  RealMatrix<Real> grad(u.channels(), u.steps());
  for (Index n = 0; n < u.steps(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    const ComplexMatrix<Real> a = assemble_A(h, RealVector<Real>(u.at(n)));
    for (Index j = 0; j < u.channels(); ++j) {
      const Complex<Real> s =
          detail::step_sensitivity(scheme, a, derivatives[static_cast<std::size_t>(j)], u.dt(),
                                   states.states[i], adjoint.states[i + 1], h.weight);
      grad(j, n) = u.dt() * w.alpha(j) * u(j, n) - s.real();
    }
  }
  return grad;
}

}  // namespace qcayley
