#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spherebranch/error.hpp"
#include "spherebranch/operators.hpp"

using namespace spherebranch;

namespace {
Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}
}  // namespace

TEST_CASE("example builders") {
  const Matrix t = build_Tk(3, 6);
  Vector d(6);
  d << 0, 0, 0, 1, 1, 1;
  CHECK((t - Matrix(d.asDiagonal())).norm() == 0.0);
  const Matrix c = build_C(4);
  CHECK(c(3, 3) == doctest::Approx(0.25));
  CHECK(c(0, 1) == 0.0);
  const Perturbation n = build_paper_N(6);
  const Matrix& m = *n.linear_matrix();
  CHECK(m(1, 0) == 1.0);
  CHECK(m(0, 1) == -1.0);
  CHECK(m(3, 2) == 1.0);
  CHECK(m(2, 3) == -1.0);
  CHECK(m.bottomRightCorner(2, 2).norm() == 0.0);
}

TEST_CASE("builders reject bad truncations") {
  CHECK_THROWS_AS(build_Tk(0, 5), Error);
  CHECK_THROWS_AS(build_Tk(5, 5), Error);
  CHECK_THROWS_AS(build_paper_N(3), Error);
  try {
    build_Tk(6, 5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidTruncation);
    CHECK(e.exit_code() == 3);
  }
}

TEST_CASE("pencil construction") {
  const Pencil p = example_pencil(3, 8);
  CHECK(p.dim() == 8);
  CHECK(p.compact());
  const double r = p.regular_point();
  CHECK(std::abs(Eigen::PartialPivLU<Matrix>(p.at(r)).determinant()) > 0);
  CHECK_THROWS_AS(Pencil(Matrix::Zero(3, 3), Matrix::Zero(3, 3)), Error);
  CHECK_THROWS_AS(Pencil(Matrix::Zero(3, 2), Matrix::Zero(3, 2)), Error);
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(Pencil(bad, Matrix::Identity(3, 3)), Error);
}

TEST_CASE("psi_plus at s = 0 is psi") {
  const auto prob = example_problem(2, 10);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_unit_vector(10, rng);
    CHECK((psi_plus(prob, 0.0, 1.7, x) - psi(prob.pencil, 1.7, x)).norm() == 0.0);
  }
}

TEST_CASE("unit-norm precondition") {
  const auto prob = example_problem(3, 6);
  Vector x = unit(6, 0) * 1.001;
  CHECK_THROWS_AS(psi(prob.pencil, 0.0, x), Error);
  CHECK_THROWS_AS(prob.perturbation.evaluate(x), Error);
  CHECK_NOTHROW(prob.perturbation.evaluate(unit(6, 0)));
}

TEST_CASE("linear perturbations: odd symmetry and consistency") {
  const auto prob = example_problem(1, 8);
  std::mt19937_64 rng(11);
  CHECK(linear_consistency_error(prob.perturbation, rng) == 0.0);
  for (int i = 0; i < 20; ++i) {
    const Vector x = random_unit_vector(8, rng);
    CHECK(psi_plus(prob, 0.3, 0.7, x).norm() == doctest::Approx(psi_plus(prob, 0.3, 0.7, -x).norm()));
  }
}

TEST_CASE("derivative matches finite differences") {
  std::mt19937_64 rng(5);
  CHECK(derivative_fd_error(build_paper_N(8), rng) <= 1e-6);
  // Cubic map N(x) = (x_1^3, x_2 x_1, 0, ...), extended by homogeneity.
  const int n = 5;
  auto map = [](const Vector& x) {
    Vector y = Vector::Zero(x.size());
    y(0) = x(0) * x(0) * x(0);
    y(1) = x(1) * x(0);
    return y;
  };
  auto jac = [](const Vector& x) {
    Matrix j = Matrix::Zero(x.size(), x.size());
    j(0, 0) = 3 * x(0) * x(0);
    j(1, 0) = x(1);
    j(1, 1) = x(0);
    return j;
  };
  CHECK(derivative_fd_error(Perturbation::nonlinear(n, map, jac), rng) <= 1e-6);
  // A deliberately wrong Jacobian is caught.
  auto wrong = [](const Vector& x) { return Matrix(Matrix::Identity(x.size(), x.size())); };
  CHECK(derivative_fd_error(Perturbation::nonlinear(n, map, wrong), rng) > 1e-2);
}

TEST_CASE("homogeneous extension") {
  const Perturbation n = build_paper_N(4);
  const Vector x = Vector::LinSpaced(4, 1, 4);
  const auto h = homogeneous_extension(n, x);
  CHECK(!h.at_origin);
  CHECK((h.value - *n.linear_matrix() * x).norm() < 1e-14);
  const auto z = homogeneous_extension(n, Vector::Zero(4));
  CHECK(z.at_origin);
  CHECK(z.value.norm() == 0.0);
}

TEST_CASE("problem dimensions must agree") {
  CHECK_THROWS_AS(PerturbedProblem(example_pencil(2, 6), build_paper_N(8)), Error);
}
