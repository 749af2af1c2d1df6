#pragma once

#include <Eigen/Dense>

namespace spherebranch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Relative pivot threshold for determinant-sign decisions.
inline constexpr double kDetRelTol = 1e-12;

/// Sign of det(a) from an LU factorization with partial pivoting.
/// Returns 0 when some pivot is below rel_tol * ||a||_inf.
int det_sign(const Matrix& a, double rel_tol = kDetRelTol);

double spectral_norm(const Matrix& a);
double smallest_singular_value(const Matrix& a);

/// Orthonormal basis (columns) of the right null space: singular directions
/// with singular value <= abs_tol. Always square inputs or wide inputs.
Matrix null_space(const Matrix& a, double abs_tol);

/// Orthonormal basis of the column span of `cols`, rank decided relative to
/// the largest singular value.
Matrix orthonormal_span(const Matrix& cols, double rel_tol = 1e-10);

/// Smallest principal angle (radians) between span(q1) and span(q2); both
/// arguments must have orthonormal columns. Empty inputs give pi/2.
double smallest_principal_angle(const Matrix& q1, const Matrix& q2);

}  // namespace linalg
}  // namespace spherebranch
