#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spherebranch/continuation.hpp"
#include "spherebranch/error.hpp"

using namespace spherebranch;

namespace {
Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

double dist_pm(const Vector& a, const Vector& b) { return std::min((a - b).norm(), (a + b).norm()); }
}  // namespace

TEST_CASE("trivial solutions: eigensphere grid plus twin pairs") {
  const auto prob = example_problem(3, 16);
  const auto anchors = find_trivial_solutions(prob, {-1, 6});
  int at0 = 0, others = 0;
  for (const auto& a : anchors) {
    CHECK(a.s == 0.0);
    CHECK(std::abs(a.x.norm() - 1) < 1e-12);
    CHECK(a.residual < 1e-12);
    if (std::abs(a.lambda) < 1e-9) {
      ++at0;
      CHECK(a.x.tail(13).norm() < 1e-12);
    } else {
      ++others;
    }
  }
  CHECK(at0 == 18);
  CHECK(others == 6);
}

TEST_CASE("k = 3 branch from e3 follows the closed-form ellipse") {
  const int n = 16;
  const auto prob = example_problem(3, n);
  const Branch br = trace_branch(prob, {0.0, 0.0, unit(n, 2), 0.0}, 1);
  CHECK(br.termination == Termination::TrivialReturn);
  CHECK(br.lambda_second == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(dist_pm(br.x_second, unit(n, 3)) < 1e-6);
  CHECK(br.points.size() > 10);
  double max_s = 0;
  for (const auto& p : br.points) {
    CHECK(std::abs(3 * p.s * p.s + (p.lambda - 2) * (p.lambda - 2) / 4 - 1) < 1e-8);
    // Compare with the parametrization at the matching angle.
    const double t = std::atan2(std::sqrt(3.0) * p.s, 1.0 - p.lambda / 2);
    const auto o = oracle::k3_branch(t, n);
    CHECK(std::abs(o.s - p.s) < 1e-8);
    CHECK(std::abs(o.lambda - p.lambda) < 1e-8);
    CHECK(dist_pm(o.x, p.x) < 1e-7);
    CHECK(p.residual < 1e-9);
    max_s = std::max(max_s, p.s);
  }
  CHECK(max_s == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-3));
  // Consecutive points never jump by more than the step cap.
  for (std::size_t i = 1; i < br.points.size(); ++i) {
    const auto& a = br.points[i - 1];
    const auto& b = br.points[i];
    const double d = std::sqrt((a.s - b.s) * (a.s - b.s) + (a.lambda - b.lambda) * (a.lambda - b.lambda) +
                               (a.x - b.x).squaredNorm());
    CHECK(d <= 0.1 * 1.01);
  }
}

TEST_CASE("horizontal lines are unbounded and keep x fixed") {
  const int n = 12;
  const auto prob = example_problem(3, n);
  for (int lam : {5, 6}) {
    for (int dir : {1, -1}) {
      const Branch br = trace_branch(prob, {0.0, double(lam), unit(n, lam - 1), 0.0}, dir);
      CHECK(br.termination == Termination::Unbounded);
      for (const auto& p : br.points) {
        CHECK(std::abs(p.lambda - lam) < 1e-9);
        CHECK(dist_pm(p.x, unit(n, lam - 1)) < 1e-8);
      }
      CHECK(std::abs(br.points.back().s) >= 10.0);
    }
  }
}

TEST_CASE("k = 2 eigensphere circles close up") {
  const int n = 10;
  const auto prob = example_problem(2, n);
  const Branch br = trace_branch(prob, {0.0, 0.0, unit(n, 0), 0.0}, 1);
  CHECK(br.termination == Termination::ClosedLoop);
  CHECK(br.max_abs_s < 1e-12);
  CHECK(br.arclength == doctest::Approx(2 * M_PI).epsilon(1e-3));
}

TEST_CASE("component verdicts") {
  const int n = 12;
  ContinuationSettings st;
  SUBCASE("k = 2 zero is isolated") {
    const auto prob = example_problem(2, n);
    const auto v = classify_component(prob, {0.0, 0.0, unit(n, 0), 0.0}, 10.0, st);
    CHECK(v.verdict == Verdict::IsolatedCompact);
  }
  SUBCASE("k = 1 zero returns at two") {
    const auto prob = example_problem(1, n);
    const auto v = classify_component(prob, {0.0, 0.0, unit(n, 0), 0.0}, 10.0, st);
    CHECK(v.verdict == Verdict::TrivialReturn);
    CHECK(v.lambda_second == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(dist_pm(v.x_second, unit(n, 1)) < 1e-6);
  }
  SUBCASE("k = 3 zero returns at four") {
    const auto prob = example_problem(3, n);
    const auto v = classify_component(prob, {0.0, 0.0, unit(n, 2), 0.0}, 10.0, st);
    CHECK(v.verdict == Verdict::TrivialReturn);
    CHECK(v.lambda_second == doctest::Approx(4.0).epsilon(1e-9));
  }
}

TEST_CASE("classification does not depend on the thread count") {
  const int n = 12;
  const auto prob = example_problem(3, n);
  ContinuationSettings one, many;
  many.threads = 4;
  const auto a = classify_component(prob, {0.0, 0.0, unit(n, 2), 0.0}, 10.0, one);
  const auto b = classify_component(prob, {0.0, 0.0, unit(n, 2), 0.0}, 10.0, many);
  CHECK(a.verdict == b.verdict);
  REQUIRE(a.branches.size() == b.branches.size());
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    REQUIRE(a.branches[i].points.size() == b.branches[i].points.size());
    CHECK((a.branches[i].points.back().x - b.branches[i].points.back().x).norm() == 0.0);
  }
}

TEST_CASE("bifurcation points on the eigensphere") {
  const int n = 12;
  const auto k3 = detect_bifurcation_points(example_problem(3, n), 0.0);
  REQUIRE(k3.size() == 2);
  CHECK((k3[0] - unit(n, 2)).norm() < 1e-4);
  CHECK((k3[1] + unit(n, 2)).norm() < 1e-4);
  CHECK(detect_bifurcation_points(example_problem(2, n), 0.0).empty());
  CHECK_THROWS_AS(detect_bifurcation_points(example_problem(1, n), 0.0), Error);
}

TEST_CASE("reduced candidates for k = 3") {
  const int n = 10;
  const auto c = reduced_bifurcation_candidates(example_problem(3, n), 0.0);
  REQUIRE(c.size() == 2);
  for (const auto& x : c) CHECK(dist_pm(x, unit(n, 2)) < 1e-10);
}

TEST_CASE("dedupe keeps one representative per sign") {
  Vector a = Vector::Zero(3);
  a(0) = 1;
  Vector b = a;
  b(1) = 1e-9;
  const auto out = dedupe_bifurcation_points({a, b, -a});
  REQUIRE(out.size() == 2);
  CHECK(out[0](0) == 1.0);
  CHECK(out[1](0) == -1.0);
  CHECK(dedupe_bifurcation_points({a, b}).size() == 1);
}

TEST_CASE("anchors must be solutions") {
  const auto prob = example_problem(3, 8);
  CHECK_THROWS_AS(trace_branch(prob, {0.0, 1.0, unit(8, 0), 0.0}, 1), Error);
  CHECK_THROWS_AS(trace_branch(prob, {0.0, 0.0, unit(8, 0), 0.0}, 0), Error);
}

TEST_CASE("nonlinear perturbation from a simple eigenvalue") {
  const int n = 6;
  auto map = [](const Vector& x) {
    Vector y = Vector::Zero(x.size());
    y(0) = x(1) * x(1) * x(1);
    y(1) = -x(0) * x(0) * x(0);
    return y;
  };
  auto jac = [](const Vector& x) {
    Matrix j = Matrix::Zero(x.size(), x.size());
    j(0, 1) = 3 * x(1) * x(1);
    j(1, 0) = -3 * x(0) * x(0);
    return j;
  };
  const PerturbedProblem prob(example_pencil(1, n), Perturbation::nonlinear(n, map, jac));
  const Branch br = trace_branch(prob, {0.0, 0.0, unit(n, 0), 0.0}, 1);
  CHECK(br.termination != Termination::StepFailure);
  for (const auto& p : br.points) CHECK(p.residual < 1e-8);
}
