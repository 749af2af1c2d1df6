#include "spherebranch/operators.hpp"

#include <cmath>
#include <string>

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

// Lambda grid for the regular-point scan: symmetric, offset away from integers
// and simple fractions so that diagonal eigenvalues are not hit exactly.
std::vector<double> scan_grid(double reach) {
  std::vector<double> grid;
  constexpr int kHalf = 128;
  constexpr double kOffset = 0.1234567891;
  grid.reserve(2 * kHalf + 1);
  grid.push_back(kOffset);
  for (int i = 1; i <= kHalf; ++i) {
    const double t = reach * i / kHalf;
    grid.push_back(kOffset + t);
    grid.push_back(kOffset - t);
  }
  return grid;
}

}  // namespace

Pencil::Pencil(Matrix l, Matrix c, bool compact)
    : l_(std::move(l)), c_(std::move(c)), compact_(compact) {
  if (l_.rows() != l_.cols() || c_.rows() != c_.cols() || l_.rows() != c_.rows())
    throw Error(ErrorKind::InvalidInput, "pencil: L and C must be square of equal size");
  if (l_.rows() < 2) throw Error(ErrorKind::InvalidTruncation, "pencil: dimension must be at least 2");
  if (!l_.allFinite() || !c_.allFinite()) throw Error(ErrorKind::InvalidInput, "pencil: non-finite entries");

  norm_l_ = linalg::spectral_norm(l_);
  norm_c_ = linalg::spectral_norm(c_);

  const double reach = 2.0 + dim() + (norm_c_ > 0 ? norm_l_ / norm_c_ : 0.0);
  for (double lambda : scan_grid(reach)) {
    Eigen::JacobiSVD<Matrix> svd(at(lambda));
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    if (smallest > 0 && sv(0) / smallest < kConditionCeiling) {
      regular_point_ = lambda;
      return;
    }
  }
  throw Error(ErrorKind::PencilDegenerate, "pencil: L - lambda C is singular on the whole scan grid");
}

Perturbation::Perturbation(int dim, Map map, Jacobian jacobian, std::optional<Matrix> linear)
    : dim_(dim), map_(std::move(map)), jacobian_(std::move(jacobian)), linear_(std::move(linear)) {}

Perturbation Perturbation::linear(Matrix m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::InvalidInput, "perturbation: linear matrix not square");
  const int n = static_cast<int>(m.rows());
  Map map = [m](const Vector& x) -> Vector { return m * x; };
  Jacobian jac = [m](const Vector&) -> Matrix { return m; };
  return Perturbation(n, std::move(map), std::move(jac), m);
}

Perturbation Perturbation::nonlinear(int dim, Map map, Jacobian jacobian) {
  if (!map || !jacobian) throw Error(ErrorKind::InvalidInput, "perturbation: empty callable");
  return Perturbation(dim, std::move(map), std::move(jacobian), std::nullopt);
}

Perturbation Perturbation::zero(int dim) { return linear(Matrix::Zero(dim, dim)); }

Vector Perturbation::evaluate(const Vector& x) const {
  require_unit(x, "perturbation");
  return map_(x);
}

Matrix Perturbation::derivative(const Vector& x) const {
  require_unit(x, "perturbation derivative");
  return jacobian_(x);
}

PerturbedProblem::PerturbedProblem(Pencil p, Perturbation n)
    : pencil(std::move(p)), perturbation(std::move(n)) {
  if (pencil.dim() != perturbation.dim())
    throw Error(ErrorKind::InvalidInput, "problem: pencil and perturbation dimensions differ");
}

Matrix build_Tk(int k, int n) {
  if (k < 1 || k >= n)
    throw Error(ErrorKind::InvalidTruncation,
                "build_Tk: need 1 <= k < n, got k=" + std::to_string(k) + " n=" + std::to_string(n));
  Vector d = Vector::Ones(n);
  d.head(k).setZero();
  return d.asDiagonal();
}

Matrix build_C(int n) {
  if (n < 2) throw Error(ErrorKind::InvalidTruncation, "build_C: need n >= 2");
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = 1.0 / (i + 1);
  return d.asDiagonal();
}

Perturbation build_paper_N(int n) {
  if (n < 4) throw Error(ErrorKind::InvalidTruncation, "build_paper_N: need n >= 4");
  Matrix m = Matrix::Zero(n, n);
  m(0, 1) = -1.0;
  m(1, 0) = 1.0;
  m(2, 3) = -1.0;
  m(3, 2) = 1.0;
  return Perturbation::linear(std::move(m));
}

Pencil example_pencil(int k, int n) { return Pencil(build_Tk(k, n), build_C(n), true); }

PerturbedProblem example_problem(int k, int n) {
  return PerturbedProblem(example_pencil(k, n), build_paper_N(n));
}

void require_unit(const Vector& x, const char* where) {
  if (!x.allFinite() || std::abs(x.norm() - 1.0) > kUnitTol)
    throw Error(ErrorKind::ConstraintViolation,
                std::string(where) + ": expected a unit vector, got norm " + std::to_string(x.norm()));
}

Vector psi(const Pencil& pencil, double lambda, const Vector& x) {
  if (x.size() != pencil.dim()) throw Error(ErrorKind::InvalidInput, "psi: dimension mismatch");
  require_unit(x, "psi");
  return pencil.L() * x - lambda * (pencil.C() * x);
}

Vector psi_plus(const PerturbedProblem& problem, double s, double lambda, const Vector& x) {
  Vector out = psi(problem.pencil, lambda, x);
  if (s != 0.0) out += s * problem.perturbation.evaluate_unchecked(x);
  return out;
}

HomogeneousValue homogeneous_extension(const Perturbation& p, const Vector& x) {
  const double r = x.norm();
  if (r == 0.0) return {Vector::Zero(x.size()), true};
  return {r * p.evaluate_unchecked(x / r), false};
}

Vector random_unit_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

double linear_consistency_error(const Perturbation& p, std::mt19937_64& rng, int samples) {
  if (!p.linear_matrix()) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = random_unit_vector(p.dim(), rng);
    worst = std::max(worst, (p.evaluate(x) - *p.linear_matrix() * x).norm());
  }
  return worst;
}

double derivative_fd_error(const Perturbation& p, std::mt19937_64& rng, int samples) {
  constexpr double kStep = 1e-6;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = random_unit_vector(p.dim(), rng);
    Vector v = random_unit_vector(p.dim(), rng);
    v -= x.dot(v) * x;
    v.normalize();
    // Finite differences along the great circle through x in direction v keep
    // every evaluation point on the sphere.
    const Vector plus = std::cos(kStep) * x + std::sin(kStep) * v;
    const Vector minus = std::cos(kStep) * x - std::sin(kStep) * v;
    const Vector fd = (p.evaluate(plus) - p.evaluate(minus)) / (2.0 * std::sin(kStep));
    const Vector exact = p.derivative(x) * v;
    const double denom = std::max(1.0, exact.norm());
    worst = std::max(worst, (fd - exact).norm() / denom);
  }
  return worst;
}

}  // namespace spherebranch
