#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "qcayley/experiments/synthetic_problem.hpp"
#include "qcayley/krotov.hpp"

using namespace qcayley;
using namespace qcayley::test;

namespace {

Vec basis(Index n, Index k) {
  Vec v = Vec::Zero(n);
  v(k) = 1;
  return v;
}

// Central difference of J along d against the adjoint gradient, as a relative error.
R gradient_mismatch(Scheme scheme, const ControlProblem<R>& p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  RealMatrix<R> d(p.u0.channels(), p.u0.steps());
  for (Index n = 0; n < d.cols(); ++n) d(0, n) = normal(rng);
  const R eps = 1e-5 * p.u0.samples().norm() / d.norm();
  const auto shifted = [&](R s) {
    ControlField<R> u = p.u0;
    u.samples() += s * d;
    return evaluate_cost(scheme, p.h, u, p.psi0, p.target, p.w).cost;
  };
  const R fd = (shifted(eps) - shifted(-eps)) / (2 * eps);

  const auto forward = propagate(scheme, p.h, p.u0, p.psi0, true);
  const auto adjoint = backward_propagate(
      scheme, p.h, p.u0, terminal_adjoint(forward.final_state(), p.target, p.h.weight));
  const R analytic = (control_gradient(scheme, p.h, p.u0, forward, adjoint, p.w).array() * d.array()).sum();
  return std::abs(fd - analytic) / std::abs(fd);
}

}  // namespace

TEST_SUITE("krotov") {

TEST_CASE("fidelity examples") {
  std::mt19937_64 rng(31);
  const Vec t = random_unit_state<R>(6, rng);
  CHECK(std::abs(fidelity(t, t) - 1) <= 1e-12);
  CHECK(fidelity(basis(4, 0), basis(4, 2)) <= 1e-12);
  CHECK(std::abs(fidelity(Vec(std::polar(R(1), R(0.7)) * t), t) - 1) <= 1e-12);
  CHECK_THROWS_AS(fidelity(t, basis(5, 0)), ShapeError);
}

TEST_CASE("cost examples") {
  const auto w = CostWeights<R>::uniform(1, 2);
  ControlField<R> zero(1, 0, 1, 10);
  CHECK(cost(zero, w, R(1)) == 0);
  CHECK(cost(zero, w, R(0)) == 0.5);
  ControlField<R> ones(RealMatrix<R>::Ones(1, 10), 0, 1);
  CHECK(cost(ones, w, R(1)) == doctest::Approx(1).epsilon(1e-14));
  CHECK(cost(ones, w, R(0.4)) == doctest::Approx(1.3).epsilon(1e-14));
  CHECK_THROWS_AS(cost(ones, CostWeights<R>::uniform(2, 1), R(1)), ShapeError);
}

TEST_CASE("weights and settings validation") {
  CHECK_THROWS_AS(CostWeights<R>::uniform(1, 0).validate(1), ParameterError);
  CHECK_THROWS_AS(CostWeights<R>::uniform(2, 1).validate(1), ShapeError);
  KrotovSettings s;
  s.epsilon = 0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = {};
  s.max_iterations = 0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  CHECK(parse_update_rule("incremental") == UpdateRule::Incremental);
  CHECK(parse_update_sampling(to_string(UpdateSampling::GridTime)) == UpdateSampling::GridTime);
  CHECK_THROWS_AS(parse_update_rule("sideways"), ParameterError);
}

TEST_CASE("terminal adjoint examples") {
  CHECK(terminal_adjoint(basis(3, 0), basis(3, 1)).norm() == 0);
  std::mt19937_64 rng(32);
  const Vec t = random_unit_state<R>(5, rng);
  CHECK(max_abs(terminal_adjoint(t, t) - t) <= 1e-15);
  for (int i = 0; i < 10; ++i) {
    const Vec psi = random_unit_state<R>(5, rng);
    const Vec lambda = terminal_adjoint(psi, t);
    CHECK(std::abs(lambda.norm() - std::abs(inner(t, psi))) <= 1e-14);
    CHECK(lambda.norm() <= 1 + 1e-14);
  }
}

TEST_CASE("backward propagation") {
  const auto p = synthetic_control_problem<R>({}, 1);
  std::mt19937_64 rng(33);
  const Vec lambda_t = random_unit_state<R>(8, rng);
  for (Scheme s : {Scheme::CrankNicolson, Scheme::Cfc4}) {
    const auto adj = backward_propagate(s, p.h, p.u0, lambda_t);
    REQUIRE(adj.size() == 201);
    CHECK(adj.times.front() == 0);
    const auto again = propagate(s, p.h, p.u0, adj.states.front(), false);
    CHECK(max_abs(again.final_state() - lambda_t) <= 1e-10);
    R drift = 0;
    for (const Vec& v : adj.states) drift = std::max(drift, std::abs(v.norm() - 1));
    CHECK(drift <= 1e-11);
  }

  ControlledHamiltonian<R> zero;
  zero.drift = CM(Mat(Mat::Zero(8, 8)));
  zero.controls.push_back(zero.drift);
  const auto still = backward_propagate(Scheme::Cfc4, zero, p.u0, lambda_t);
  for (const Vec& v : still.states) CHECK(max_abs(v - lambda_t) == 0);

  auto nonlinear = p.h;
  nonlinear.nonlinearity = 1;
  CHECK_THROWS_AS(backward_propagate(Scheme::Cfc4, nonlinear, p.u0, lambda_t), UsageError);
}

TEST_CASE("reference target") {
  const auto h = synthetic_model<R>(8, 1, 1234);
  const Vec psi0 = basis(8, 0);
  const Vec a = make_reference_target(h, Scheme::Cfc4, psi0, 200, R(5));
  const Vec b = make_reference_target(h, Scheme::Cfc4, psi0, 200, R(5));
  CHECK(std::abs(a.norm() - 1) <= 1e-10);
  CHECK(a == b);
  // Equal-order schemes: 1.1e-5 apart at 200 steps, below 1e-6 from 400 on.
  const auto gap = [&](Index n) {
    return (make_reference_target(h, Scheme::Cfc4, psi0, n, R(5)) -
            make_reference_target(h, Scheme::CayleyMagnus4, psi0, n, R(5)))
        .norm();
  };
  CHECK(gap(400) <= 1e-6);
  CHECK(gap(200) / gap(400) >= 12);
}

TEST_CASE("optimal initial guess stops after one update") {
  const SyntheticProblemSpec spec;
  auto p = synthetic_control_problem<R>(spec, 2);
  KrotovSettings s;
  s.max_iterations = 5;

  // sin^2 reaches the target exactly; the incremental rule leaves it in place
  // and the run stops on its first update.
  p.u0 = ControlField<R>::sampled(1, 0, R(spec.t_final), spec.n_steps,
                                  [](R t) { return std::sin(t) * std::sin(t); });
  s.rule = UpdateRule::Incremental;
  const auto exact = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  CHECK(exact.records[0].fidelity >= 1 - 1e-12);
  CHECK(exact.converged);
  CHECK(exact.iterations == 1);

  // A converged optimum of the penalized cost is a fixed point of the update.
  s.rule = UpdateRule::Absolute;
  s.epsilon = 1e-12;
  s.max_iterations = 200;
  const auto tight = krotov_optimize(p.h, synthetic_control_problem<R>(spec, 2).u0, p.psi0,
                                     p.target, p.w, s);
  s.epsilon = 1e-5;
  const auto again = krotov_optimize(p.h, tight.final_control(), p.psi0, p.target, p.w, s);
  CHECK(again.converged);
  CHECK(again.iterations == 1);
  CHECK(again.stop_reason == StopReason::CostStalled);
}

TEST_CASE("stopping rule and bookkeeping") {
  auto p = synthetic_control_problem<R>({}, 3);
  KrotovSettings s;
  s.max_iterations = 2;
  s.epsilon = 1e-14;
  const auto capped = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  CHECK_FALSE(capped.converged);
  CHECK(capped.stop_reason == StopReason::MaxIterations);
  CHECK(capped.iterations == 2);
  CHECK(capped.records.size() == 3);
  CHECK(capped.wall_seconds > 0);
  CHECK(std::abs(fidelity(capped.final_state, p.target) - capped.final_fidelity()) <= 1e-14);

  s.max_iterations = 50;
  s.epsilon = 1e-5;
  const auto run = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  CHECK(run.converged);
  const R last_change = std::abs(run.records[run.records.size() - 2].cost - run.final_cost());
  CHECK((last_change < 1e-5 || 1 - run.final_fidelity() < 1e-5));
  // Every update before the last one moved J by at least epsilon.
  for (std::size_t k = 1; k + 1 < run.records.size(); ++k) {
    CHECK(std::abs(run.records[k].cost - run.records[k - 1].cost) >= 1e-5);
  }
}

TEST_CASE("cost is non-increasing over 20 random initial guesses") {
  for (Scheme scheme : {Scheme::Cfc4, Scheme::CrankNicolson}) {
    SyntheticProblemSpec spec;
    spec.scheme = scheme;
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = synthetic_control_problem<R>(spec, seed);
      KrotovSettings s;
      s.scheme = scheme;
      const auto run = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
      for (std::size_t k = 1; k < run.records.size(); ++k) {
        if (run.records[k].cost > run.records[k - 1].cost + 1e-10) ++violations;
      }
      CHECK(run.diagnostics.empty());
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("strict monotonicity turns a cost increase into an error") {
  // The printed incremental rule with grid-time sampling overshoots here.
  auto p = synthetic_control_problem<R>({}, 0);
  KrotovSettings s;
  s.rule = UpdateRule::Incremental;
  s.sampling = UpdateSampling::GridTime;
  s.max_iterations = 10;
  const auto run = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  REQUIRE_FALSE(run.diagnostics.empty());
  s.strict_monotonicity = true;
  CHECK_THROWS_AS(krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s), NumericError);
}

TEST_CASE("adjoint gradient matches finite differences") {
  std::mt19937_64 rng(34);
  for (Scheme scheme : {Scheme::CrankNicolson, Scheme::Cfc4, Scheme::CayleyMagnus4, Scheme::CfExp4}) {
    SyntheticProblemSpec spec;
    spec.scheme = scheme;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = synthetic_control_problem<R>(spec, 100 + seed);
      const R mismatch = gradient_mismatch(scheme, p, rng);
      CHECK(mismatch <= 1e-4);
    }
  }
}

TEST_CASE("global phase of the target is irrelevant") {
  const auto p = synthetic_control_problem<R>({}, 4);
  KrotovSettings s;
  const auto a = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  const Vec rotated = std::polar(R(1), R(1.1)) * p.target;
  const auto b = krotov_optimize(p.h, p.u0, p.psi0, rotated, p.w, s);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(std::abs(a.records[k].cost - b.records[k].cost) <= 1e-10);
    CHECK(std::abs(a.records[k].fidelity - b.records[k].fidelity) <= 1e-10);
  }
  CHECK(max_abs(a.final_control().samples() - b.final_control().samples()) <= 1e-10);
}

TEST_CASE("pmp residual") {
  const auto p = synthetic_control_problem<R>({}, 5);
  // lambda orthogonal to H psi at every time: psi and lambda on disjoint diagonal blocks.
  ControlledHamiltonian<R> diag;
  diag.drift = CM::diagonal(RealVector<R>::LinSpaced(4, 1, 4));
  diag.controls.push_back(CM::diagonal(RealVector<R>::Ones(4)));
  ControlField<R> zero(1, 0, 1, 20);
  const auto states = propagate(Scheme::Cfc4, diag, zero, basis(4, 0), true);
  const auto adjoint = backward_propagate(Scheme::Cfc4, diag, zero, basis(4, 2));
  CHECK(pmp_residual(diag, zero, states, adjoint, CostWeights<R>::uniform(1, 1)) == 0);

  // Shrinks as Krotov converges.
  KrotovSettings s;
  s.epsilon = 1e-8;
  s.max_iterations = 100;
  const auto run = krotov_optimize(p.h, p.u0, p.psi0, p.target, p.w, s);
  REQUIRE(run.converged);
  std::vector<R> residuals;
  for (std::size_t k = run.records.size() - 4; k < run.records.size(); ++k) {
    const auto& u = run.records[k].control;
    const auto fwd = propagate(s.scheme, p.h, u, p.psi0, true);
    const auto adj = backward_propagate(
        s.scheme, p.h, u, terminal_adjoint(fwd.final_state(), p.target, p.h.weight));
    residuals.push_back(pmp_residual(p.h, u, fwd, adj, p.w));
  }
  for (std::size_t i = 1; i < residuals.size(); ++i) CHECK(residuals[i] < residuals[i - 1]);
  CHECK(residuals.back() <= 1e-3);
}

TEST_CASE("optimizer rejects inconsistent inputs") {
  const auto p = synthetic_control_problem<R>({}, 6);
  KrotovSettings s;
  CHECK_THROWS_AS(krotov_optimize(p.h, p.u0, basis(5, 0), p.target, p.w, s), ShapeError);
  auto nonlinear = p.h;
  nonlinear.nonlinearity = 2;
  CHECK_THROWS_AS(krotov_optimize(nonlinear, p.u0, p.psi0, p.target, p.w, s), UsageError);
  CHECK_THROWS_AS(krotov_optimize(p.h, p.u0, p.psi0, p.target, CostWeights<R>::uniform(1, -1), s),
                  ParameterError);
}

}  // TEST_SUITE
