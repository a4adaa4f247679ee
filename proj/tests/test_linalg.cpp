#include "doctest.h"
#include "helpers.hpp"

using namespace qcayley;
using namespace qcayley::test;

TEST_SUITE("linalg") {

TEST_CASE("banded storage round-trips to dense") {
  std::mt19937_64 rng(1);
  const auto b = random_banded(9, 2, 1, rng);
  const Mat d = b.to_dense();
  for (Index i = 0; i < 9; ++i) {
    for (Index j = 0; j < 9; ++j) {
      if (!b.in_band(i, j)) CHECK(d(i, j) == Complex<R>(0, 0));
      else CHECK(d(i, j) == b.coeff(i, j));
    }
  }
  CHECK(BandedMatrix<R>::from_dense(d, 2, 1) == b);
}

TEST_CASE("banded arithmetic matches dense") {
  std::mt19937_64 rng(2);
  const auto a = random_banded(12, 1, 2, rng);
  const auto b = random_banded(12, 3, 0, rng);
  CHECK(max_abs((a + b).to_dense() - (a.to_dense() + b.to_dense())) < 1e-13);
  CHECK(max_abs((a - b).to_dense() - (a.to_dense() - b.to_dense())) < 1e-13);
  const auto p = a * b;
  CHECK(p.lower() == 4);
  CHECK(p.upper() == 2);
  CHECK(max_abs(p.to_dense() - a.to_dense() * b.to_dense()) < 1e-13);
  CHECK(max_abs(a.adjoint().to_dense() - a.to_dense().adjoint()) == 0);
  Vec v = Vec::Random(12);
  CHECK(max_abs(a.apply(v) - a.to_dense() * v) < 1e-13);
}

TEST_CASE("banded and dense paths agree") {
  std::mt19937_64 rng(3);
  const CM banded(random_banded(40, 1, 1, rng));
  const CM other(random_banded(40, 2, 2, rng));
  const CM dense(banded.to_dense());
  const CM dense_other(other.to_dense());
  REQUIRE(banded.is_banded());
  REQUIRE_FALSE(dense.is_banded());
  CHECK(max_abs((banded * other).to_dense() - (dense * dense_other).to_dense()) < 1e-13);
  CHECK(max_abs(commutator(banded, other).to_dense() -
                commutator(dense, dense_other).to_dense()) < 1e-13);
  const Vec rhs = Vec::Random(40);
  CHECK(max_abs(solve_shifted(banded, rhs) - solve_shifted(dense, rhs)) < 1e-13);
}

TEST_CASE("wide bands fall back to dense storage") {
  std::mt19937_64 rng(4);
  const CM a(random_banded(16, 2, 2, rng));
  CHECK(a.is_banded());
  const CM cube = a * (a * a);
  CHECK_FALSE(cube.is_banded());
  CHECK(max_abs(cube.to_dense() - a.to_dense() * a.to_dense() * a.to_dense()) < 1e-11);
}

TEST_CASE("commutator examples") {
  Mat sx = Mat::Zero(2, 2);
  sx << 0, 1, 1, 0;
  Mat sy = Mat::Zero(2, 2);
  sy << Complex<R>(0, 0), Complex<R>(0, -1), Complex<R>(0, 1), Complex<R>(0, 0);
  Mat expected = Mat::Zero(2, 2);
  expected << Complex<R>(0, 2), Complex<R>(0, 0), Complex<R>(0, 0), Complex<R>(0, -2);
  CHECK(max_abs(commutator(CM(sx), CM(sy)).to_dense() - expected) < 1e-15);

  std::mt19937_64 rng(5);
  const CM a(random_hermitian<R>(6, rng));
  const CM b(random_hermitian<R>(6, rng));
  CHECK(max_abs(commutator(a, a).to_dense()) == 0);
  CHECK(commutator(a, b) == -commutator(b, a));

  const CM d1 = CM::diagonal(RealVector<R>::LinSpaced(6, 1, 6));
  const CM d2 = CM::diagonal(RealVector<R>::LinSpaced(6, -3, 2));
  CHECK(max_abs(commutator(d1, d2).to_dense()) == 0);

  CHECK_THROWS_AS(commutator(CM::identity(3), CM::identity(4)), ShapeError);
}

TEST_CASE("commutator is bilinear") {
  std::mt19937_64 rng(6);
  const CM a(random_hermitian<R>(5, rng));
  const CM b(random_hermitian<R>(5, rng));
  const CM c(random_hermitian<R>(5, rng));
  const Complex<R> s(0.3, -1.2);
  const Mat lhs = commutator(a + s * b, c).to_dense();
  const Mat rhs = commutator(a, c).to_dense() + s * commutator(b, c).to_dense();
  CHECK(max_abs(lhs - rhs) < 1e-13);
}

TEST_CASE("solve_shifted examples") {
  const Vec v = Vec::Random(5);
  CHECK(max_abs(solve_shifted(CM::identity(5), v) - v) == 0);

  const CM diag = CM::diagonal(RealVector<R>((RealVector<R>(2) << 2, 4).finished()));
  Vec rhs(2);
  rhs << 2, 4;
  const Vec x = solve_shifted(diag, rhs);
  CHECK(std::abs(x(0) - Complex<R>(1, 0)) < 1e-15);
  CHECK(std::abs(x(1) - Complex<R>(1, 0)) < 1e-15);

  std::mt19937_64 rng(7);
  const Mat m = Mat::Identity(8, 8) * R(4) + Mat(random_hermitian<R>(8, rng)) * I();
  const Vec b = Vec::Random(8);
  const Vec y = solve_shifted(CM(m), b);
  CHECK((m * y - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("solve_shifted residual with banded pivoting") {
  std::mt19937_64 rng(8);
  // Zero diagonal forces row exchanges inside the band.
  auto b = random_banded(30, 2, 1, rng);
  for (Index j = 0; j < 30; j += 3) b.ref(j, j) = 0;
  const CM m(b);
  const Vec rhs = Vec::Random(30);
  const Vec x = solve_shifted(m, rhs);
  CHECK((b.to_dense() * x - rhs).norm() <= 1e-11 * rhs.norm());

  const Mat many = Mat::Random(30, 3);
  const Mat xs = solve_shifted(m, many);
  CHECK((b.to_dense() * xs - many).norm() <= 1e-11 * many.norm());
}

TEST_CASE("singular systems are reported") {
  RealVector<R> d(3);
  d << 1, 0, 2;
  CHECK_THROWS_AS(solve_shifted(CM::diagonal(d), Vec(Vec::Ones(3)), 0.5), SingularityError);
  try {
    solve_shifted(CM::diagonal(d), Vec(Vec::Ones(3)), 0.5);
  } catch (const SingularityError& e) {
    REQUIRE(e.time().has_value());
    CHECK(*e.time() == 0.5);
  }
  Mat dense = Mat::Ones(20, 20);
  CHECK_THROWS_AS(solve_shifted(CM(dense), Vec(Vec::Ones(20))), SingularityError);
}

TEST_CASE("factorization tokens go stale") {
  ShiftedSolveWorkspace<R> ws;
  const auto first = ws.factorize(CM::identity(4));
  const auto second = ws.factorize(Complex<R>(2, 0) * CM::identity(4));
  const Vec v = Vec::Ones(4);
  CHECK_THROWS_AS(ws.solve(first, v), StateError);
  CHECK(max_abs(ws.solve(second, v) - v / R(2)) < 1e-15);
  CHECK_THROWS_AS(ws.solve(second, Vec(Vec::Ones(5))), ShapeError);
}

TEST_CASE("matrix exponential examples") {
  CHECK(max_abs(matrix_exponential<R>(Mat(Mat::Zero(4, 4))) - Mat::Identity(4, 4)) == 0);

  Mat phase(1, 1);
  phase(0, 0) = Complex<R>(0, std::acos(R(-1)));
  CHECK(std::abs(matrix_exponential<R>(phase)(0, 0) - Complex<R>(-1, 0)) < 1e-15);

  CHECK_THROWS_AS(matrix_exponential<R>(Mat(Mat::Zero(2, 3))), ShapeError);

  // exp(i theta sigma_x) = cos(theta) I + i sin(theta) sigma_x.
  const R theta = 0.83;
  Mat sx = Mat::Zero(2, 2);
  sx << 0, 1, 1, 0;
  const Mat expected = std::cos(theta) * Mat::Identity(2, 2) + I() * std::sin(theta) * sx;
  CHECK(max_abs(matrix_exponential<R>(Mat(I() * theta * sx)) - expected) < 1e-15);
}

TEST_CASE("matrix exponential of skew-Hermitian matrices is unitary") {
  std::mt19937_64 rng(9);
  for (Index n : {2, 6, 17, 40}) {
    const Mat a = random_skew_hermitian<R>(n, rng, R(3));
    const Mat u = matrix_exponential<R>(a);
    CHECK((u.adjoint() * u - Mat::Identity(n, n)).norm() <= 1e-12);
  }
}

TEST_CASE("matrix exponential accuracy against eigendecomposition") {
  std::mt19937_64 rng(10);
  const Mat h = random_hermitian<R>(12, rng);
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const R scale = R(10) / eig.eigenvalues().cwiseAbs().maxCoeff();
  const Vec phases = (Complex<R>(0, -scale) * eig.eigenvalues().cast<Complex<R>>()).array().exp();
  const Mat expected = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  const Mat got = matrix_exponential<R>(Mat(Complex<R>(0, -scale) * h));
  CHECK((got - expected).norm() / expected.norm() <= 1e-12);
}

TEST_CASE("operation counters") {
  reset_operation_counters();
  std::mt19937_64 rng(11);
  const CM a(random_hermitian<R>(3, rng));
  commutator(a, a);
  matrix_exponential<R>(a);
  solve_shifted(CM::identity(3), Vec(Vec::Ones(3)));
  CHECK(operation_counters.commutators == 1);
  CHECK(operation_counters.exponentials == 1);
  CHECK(operation_counters.factorizations == 1);
  CHECK(operation_counters.solves == 1);
}

}  // TEST_SUITE
