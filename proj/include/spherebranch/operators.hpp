#pragma once

#include <functional>
#include <optional>
#include <random>

#include "spherebranch/linalg.hpp"

namespace spherebranch {

/// Inputs on the unit sphere must satisfy | ||x|| - 1 | <= kUnitTol.
inline constexpr double kUnitTol = 1e-10;

/// Condition-number ceiling used when searching for a regular point of L - lambda C.
inline constexpr double kConditionCeiling = 1e12;

/// A square pencil L - lambda C on an n-dimensional truncation.
///
/// Construction scans a deterministic lambda grid and rejects pencils for which
/// L - lambda C is ill-conditioned (cond > kConditionCeiling) everywhere on it.
/// The first regular grid point is kept as `regular_point()`.
class Pencil {
 public:
  Pencil(Matrix l, Matrix c, bool compact = false);

  int dim() const { return static_cast<int>(l_.rows()); }
  const Matrix& L() const { return l_; }
  const Matrix& C() const { return c_; }

  /// Declares that the represented operator C is compact. Metadata only.
  bool compact() const { return compact_; }
  double regular_point() const { return regular_point_; }

  Matrix at(double lambda) const { return l_ - lambda * c_; }

  /// Magnitude scale ||L|| + |lambda| ||C|| used by residual tolerances.
  double scale(double lambda) const { return norm_l_ + std::abs(lambda) * norm_c_; }
  double norm_L() const { return norm_l_; }
  double norm_C() const { return norm_c_; }

 private:
  Matrix l_;
  Matrix c_;
  bool compact_;
  double norm_l_ = 0.0;
  double norm_c_ = 0.0;
  double regular_point_ = 0.0;
};

/// A C^1 map N defined on the unit sphere, with its derivative.
///
/// The callables accept any nonzero vector so that Newton iterates slightly
/// off the sphere can be evaluated; `evaluate` and `derivative` enforce the
/// unit-norm precondition, the `*_unchecked` variants do not.
class Perturbation {
 public:
  using Map = std::function<Vector(const Vector&)>;
  using Jacobian = std::function<Matrix(const Vector&)>;

  static Perturbation linear(Matrix m);
  static Perturbation nonlinear(int dim, Map map, Jacobian jacobian);
  static Perturbation zero(int dim);

  int dim() const { return dim_; }
  Vector evaluate(const Vector& x) const;
  Matrix derivative(const Vector& x) const;
  Vector evaluate_unchecked(const Vector& x) const { return map_(x); }
  Matrix derivative_unchecked(const Vector& x) const { return jacobian_(x); }
  const std::optional<Matrix>& linear_matrix() const { return linear_; }

 private:
  Perturbation(int dim, Map map, Jacobian jacobian, std::optional<Matrix> linear);

  int dim_;
  Map map_;
  Jacobian jacobian_;
  std::optional<Matrix> linear_;
};

/// L x + s N(x) = lambda C x on the unit sphere.
struct PerturbedProblem {
  PerturbedProblem(Pencil p, Perturbation n);

  Pencil pencil;
  Perturbation perturbation;

  int dim() const { return pencil.dim(); }
};

// Builders for the diagonal example family ---------------------------------

/// diag(0,...,0,1,...,1) with k leading zeros.
Matrix build_Tk(int k, int n);

/// diag(1, 1/2, ..., 1/n).
Matrix build_C(int n);

/// Rotation blocks [[0,-1],[1,0]] on coordinates (1,2) and (3,4), zero elsewhere.
Perturbation build_paper_N(int n);

/// The pencil (T_k, C) with the compactness tag set.
Pencil example_pencil(int k, int n);

/// The pencil (T_k, C) perturbed by build_paper_N(n).
PerturbedProblem example_problem(int k, int n);

// Maps ---------------------------------------------------------------------

void require_unit(const Vector& x, const char* where);

/// L x - lambda C x for ||x|| = 1.
Vector psi(const Pencil& pencil, double lambda, const Vector& x);

/// L x + s N(x) - lambda C x for ||x|| = 1.
Vector psi_plus(const PerturbedProblem& problem, double s, double lambda, const Vector& x);

struct HomogeneousValue {
  Vector value;
  /// Set when x = 0: the extension is defined as 0 there but need not be
  /// differentiable (nor continuous, for nonlinear N).
  bool at_origin = false;
};

/// Positively homogeneous extension ||x|| N(x / ||x||).
HomogeneousValue homogeneous_extension(const Perturbation& p, const Vector& x);

// Invariant checks ---------------------------------------------------------

Vector random_unit_vector(int n, std::mt19937_64& rng);

/// Max | evaluate(x) - M x | over `samples` random unit vectors (0 when N is not linear).
double linear_consistency_error(const Perturbation& p, std::mt19937_64& rng, int samples = 100);

/// Max relative error between `derivative` and central finite differences of
/// `evaluate`, in random tangent directions at random sphere points.
double derivative_fd_error(const Perturbation& p, std::mt19937_64& rng, int samples = 20);

}  // namespace spherebranch
