#include "doctest.h"
#include "helpers.hpp"
#include "qcayley/experiments/order_study.hpp"
#include "qcayley/integrators.hpp"
#include "qcayley/models.hpp"

using namespace qcayley;
using namespace qcayley::test;

namespace {

OperatorSampler<R> constant_sampler(const CM& a) {
  return [a](R) { return a; };
}

/// A(t) = S0 + sin(3t) S1 + t^2 S2 with random skew-Hermitian S_k.
OperatorSampler<R> random_sampler(Index n, std::mt19937_64& rng) {
  const CM s0(random_skew_hermitian<R>(n, rng));
  const CM s1(random_skew_hermitian<R>(n, rng));
  const CM s2(random_skew_hermitian<R>(n, rng));
  return [=](R t) { return s0 + std::sin(3 * t) * s1 + (t * t) * s2; };
}

constexpr Scheme kAllSchemes[] = {Scheme::CrankNicolson, Scheme::Cfc4, Scheme::CayleyMagnus4,
                                  Scheme::CfExp4};
constexpr Scheme kFourthOrder[] = {Scheme::Cfc4, Scheme::CayleyMagnus4, Scheme::CfExp4};

}  // namespace

TEST_SUITE("integrators") {

TEST_CASE("cfc coefficients") {
  const auto c = CfcCoefficients<R>::standard();
  CHECK(c.a11 == doctest::Approx(1.3512071919596578).epsilon(1e-15));
  CHECK(std::abs(c.c1 - (0.5 - std::sqrt(3.0) / 6)) <= 1e-15);
  CHECK(std::abs(c.c2 - (0.5 + std::sqrt(3.0) / 6)) <= 1e-15);
  CHECK(c.c1 + c.c2 == 1);
  CHECK(c.a22 == 0);
  CHECK(c.a21 == 1 - 2 * c.a11);
  CHECK(c.a12 == c.a11 - c.a11 * c.a11);
  CHECK(c.a31 == c.a11);
  CHECK(c.a32 == -c.a12);
  // Triple-jump weights sum to one and cancel the third-order term.
  CHECK(2 * c.a11 + c.a21 == doctest::Approx(1).epsilon(1e-15));
  CHECK(2 * std::pow(c.a11, 3) + std::pow(c.a21, 3) == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : kAllSchemes) CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheme("rk4"), ParameterError);
}

TEST_CASE("cayley_apply examples") {
  const Vec v = Vec::Random(3);
  CHECK(max_abs(cayley_apply(CM::zero(3), v) - v) == 0);

  Mat omega(2, 2);
  omega << 0, 1, -1, 0;
  Vec e0 = Vec::Zero(2);
  e0(0) = 1;
  const Vec out = cayley_apply(CM(omega), e0);
  CHECK(std::abs(out(0) - Complex<R>(0.6, 0)) < 1e-15);
  CHECK(std::abs(out(1) - Complex<R>(-0.8, 0)) < 1e-15);

  std::mt19937_64 rng(20);
  for (Index n : {2, 5, 31}) {
    const CM a(random_skew_hermitian<R>(n, rng, R(4)));
    CHECK(std::abs(cayley_apply(a, random_unit_state<R>(n, rng)).norm() - 1) <= 1e-12);
  }
}

TEST_CASE("every scheme leaves v unchanged when A vanishes") {
  const Vec v = Vec::Random(4);
  for (Scheme s : kAllSchemes) {
    CHECK(max_abs(step(s, constant_sampler(CM::zero(4)), R(0.3), R(0.1), v) - v) <= 1e-15);
  }
}

TEST_CASE("crank-nicolson against the exponential") {
  RealVector<R> d(2);
  d << 1, -1;
  const CM a = Complex<R>(0, -1) * CM::diagonal(d);
  Vec v(2);
  v << Complex<R>(0.6, 0), Complex<R>(0, 0.8);
  const Vec exact = matrix_exponential<R>(R(0.1) * a) * v;
  CHECK((crank_nicolson_step(constant_sampler(a), R(0), R(0.1), v) - exact).norm() <= 5e-4);
}

TEST_CASE("crank-nicolson norm drift over many steps") {
  std::mt19937_64 rng(21);
  const auto sampler = random_sampler(16, rng);
  const Vec v0 = random_unit_state<R>(16, rng);
  const auto out = propagate(Scheme::CrankNicolson, sampler, R(0), R(1e-3), 10000, v0, false);
  CHECK(std::abs(out.final_state().norm() - 1) <= 1e-13);
}

TEST_CASE("fourth-order schemes on constant generators") {
  std::mt19937_64 rng(22);
  const CM a(random_skew_hermitian<R>(6, rng));
  const Vec v = random_unit_state<R>(6, rng);
  for (Scheme s : kFourthOrder) {
    CAPTURE(to_string(s));
    double previous = 0;
    for (R dt : {0.2, 0.1}) {
      const Vec exact = matrix_exponential<R>(dt * a) * v;
      const double err = (step(s, constant_sampler(a), R(0), dt, v) - exact).norm();
      if (s == Scheme::CfExp4) CHECK(err <= 1e-13);
      if (previous > 0 && s != Scheme::CfExp4) {
        CHECK(std::log2(previous / err) == doctest::Approx(5).epsilon(0.1));
      }
      previous = err;
    }
  }
}

TEST_CASE("cf_exp4 reuses one exponential for identical samples") {
  std::mt19937_64 rng(23);
  const CM a(random_skew_hermitian<R>(4, rng));
  reset_operation_counters();
  cf_exp4_step(constant_sampler(a), R(0), R(0.1), random_unit_state<R>(4, rng));
  CHECK(operation_counters.exponentials == 1);
  reset_operation_counters();
  cf_exp4_step(random_sampler(4, rng), R(0), R(0.1), random_unit_state<R>(4, rng));
  CHECK(operation_counters.exponentials == 2);
}

TEST_CASE("cayley schemes need no exponentials") {
  std::mt19937_64 rng(24);
  const auto sampler = random_sampler(5, rng);
  const Vec v = random_unit_state<R>(5, rng);
  reset_operation_counters();
  cfc4_step(sampler, R(0), R(0.1), v);
  CHECK(operation_counters.exponentials == 0);
  CHECK(operation_counters.commutators == 0);
  CHECK(operation_counters.solves == 3);
  reset_operation_counters();
  cayley_magnus4_step(sampler, R(0), R(0.1), v);
  CHECK(operation_counters.exponentials == 0);
  CHECK(operation_counters.commutators == 1);
  CHECK(operation_counters.solves == 1);
}

TEST_CASE("cayley-family steps are unitary") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial * 3;
    const auto sampler = random_sampler(n, rng);
    const Vec v = random_unit_state<R>(n, rng);
    for (Scheme s : {Scheme::CrankNicolson, Scheme::Cfc4, Scheme::CayleyMagnus4}) {
      CHECK(std::abs(step(s, sampler, R(0.2), R(0.3), v).norm() - 1) <= 1e-12);
    }
  }
}

TEST_CASE("crank-nicolson and cfc4 steps are reversible") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> uniform(0.01, 0.2);
  const auto sampler = random_sampler(7, rng);
  for (Scheme s : {Scheme::CrankNicolson, Scheme::Cfc4}) {
    const Vec v0 = random_unit_state<R>(7, rng);
    Vec v = v0;
    R t = 0;
    std::vector<R> steps;
    for (int k = 0; k < 100; ++k) {
      steps.push_back(uniform(rng));
      v = step(s, sampler, t, steps.back(), v);
      t += steps.back();
    }
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      v = step(s, sampler, t, -*it, v);
      t -= *it;
    }
    CHECK((v - v0).norm() <= 1e-11);
  }
}

TEST_CASE("rabi order study") {
  const auto study = rabi_order_study({kAllSchemes, kAllSchemes + 4}, {50, 100, 200});
  for (const auto& [scheme, slope] : study.slopes) {
    CAPTURE(to_string(scheme));
    if (scheme == Scheme::CrankNicolson) {
      CHECK(slope >= 1.8);
      CHECK(slope <= 2.2);
    } else {
      CHECK(slope >= 3.7);
      CHECK(slope <= 4.3);
    }
  }
  // Per-halving error ratio of CFC4 is 16 within 20%.
  std::vector<double> cfc;
  for (const auto& row : study.rows) {
    if (row.scheme == Scheme::Cfc4) cfc.push_back(row.error);
  }
  REQUIRE(cfc.size() == 3);
  for (std::size_t i = 1; i < cfc.size(); ++i) {
    CHECK(cfc[i - 1] / cfc[i] >= 16 * 0.8);
    CHECK(cfc[i - 1] / cfc[i] <= 16 * 1.2);
  }
}

TEST_CASE("fitted order of synthetic data") {
  CHECK(fitted_order<R>({0.1, 0.05, 0.025}, {1e-4, 1e-4 / 16, 1e-4 / 256}) ==
        doctest::Approx(4));
  CHECK_THROWS_AS(fitted_order<R>({0.1}, {1.0}), ParameterError);
}

TEST_CASE("propagate with a control field") {
  const Grid1D<R> grid(64, -10, 10);
  const auto h = lattice_model(grid, LatticeParams<R>{});
  const Vec psi0 = gaussian_state(grid, R(0), R(2));
  const auto u = ControlField<R>::sampled(1, 0, 2, 200, [](R t) { return std::sin(t); });

  const auto traj = propagate(Scheme::Cfc4, h, u, psi0, true);
  CHECK(traj.size() == 201);
  CHECK(traj.times.back() == doctest::Approx(2));
  for (const auto& psi : traj.states) CHECK(std::abs(norm(psi, grid.dx()) - 1) <= 1e-10);

  const auto end = propagate(Scheme::Cfc4, h, u, psi0, false);
  CHECK(end.size() == 1);
  CHECK(max_abs(end.final_state() - traj.final_state()) == 0);

  auto nonlinear = h;
  nonlinear.nonlinearity = 1;
  CHECK_THROWS_AS(propagate(Scheme::Cfc4, nonlinear, u, psi0, false), UsageError);
  CHECK_THROWS_AS(propagate(Scheme::Cfc4, h, ControlField<R>(2, 0, 1, 10), psi0, false),
                  ShapeError);
}

TEST_CASE("propagate with no controls and no drift") {
  ControlledHamiltonian<R> h;
  h.drift = CM::zero(3);
  const Vec v0 = Vec::Random(3);
  for (Scheme s : kAllSchemes) {
    const auto traj = propagate(s, h, ControlField<R>(0, 0, 1, 10), v0, true);
    for (const auto& v : traj.states) CHECK(max_abs(v - v0) == 0);
  }
}

#ifdef NDEBUG
// Debug builds reject the non-skew generator before the solve.
TEST_CASE("step failures name the step") {
  // I - Omega/2 is singular for Omega = 2I at the third step only.
  const OperatorSampler<R> a = [](R t) {
    return t > 0.2 ? Complex<R>(2 / 0.1, 0) * CM::identity(2) : CM::zero(2);
  };
  try {
    propagate(Scheme::CrankNicolson, a, R(0), R(0.1), 5, Vec(Vec::Ones(2)), false);
    FAIL("expected a singularity");
  } catch (const SingularityError& e) {
    CHECK(std::string(e.what()).find("at step 2") != std::string::npos);
  }
}
#endif

TEST_CASE("example 1 norm drift and cross-scheme agreement") {
  const Grid1D<R> grid(512, -40, 40);
  const auto h = lattice_model(grid, LatticeParams<R>{});
  const Vec psi0 = gaussian_state(grid, R(0), R(2));
  const auto run = [&](Scheme s, Index n) {
    const auto u = ControlField<R>::sampled(1, 0, 10, n, [](R t) { return std::sin(t) * std::sin(t); });
    return propagate(s, h, u, psi0, false).final_state();
  };
  std::vector<Vec> finals;
  for (Scheme s : {Scheme::CrankNicolson, Scheme::Cfc4, Scheme::CayleyMagnus4}) {
    finals.push_back(run(s, 2000));
    CHECK(std::abs(norm(finals.back(), grid.dx()) - 1) <= 1e-10);
  }
  // At 2000 steps dt |A| is about 0.8, so the two fourth-order schemes still
  // differ at the 5e-3 level; the gap contracts at fourth order.
  const R coarse = norm(Vec(finals[1] - finals[2]), grid.dx());
  const R fine = norm(Vec(run(Scheme::Cfc4, 4000) - run(Scheme::CayleyMagnus4, 4000)), grid.dx());
  CHECK(coarse <= 1e-2);
  CHECK(coarse / fine >= 8);
}

}  // TEST_SUITE
