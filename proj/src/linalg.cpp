#include "spherebranch/linalg.hpp"

#include <cmath>
#include <numbers>

#include "spherebranch/error.hpp"

namespace spherebranch {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidTruncation: return "invalid-truncation";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::PencilDegenerate: return "pencil-degenerate";
    case ErrorKind::NotAnEigenvalue: return "not-an-eigenvalue";
    case ErrorKind::SingularArgument: return "singular-argument";
    case ErrorKind::DegenerateDifferential: return "degenerate-differential";
    case ErrorKind::NonIsolatingInterval: return "non-isolating-interval";
    case ErrorKind::EndpointCollision: return "endpoint-collision";
    case ErrorKind::EpsilonExhausted: return "epsilon-exhausted";
    case ErrorKind::NotTransversal: return "not-transversal";
    case ErrorKind::UnsupportedMap: return "unsupported-map";
    case ErrorKind::FitError: return "fit-error";
    case ErrorKind::ResolutionError: return "resolution-error";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

namespace linalg {

int det_sign(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::InvalidInput, "det_sign: matrix not square");
  if (a.rows() == 0) return 1;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm == 0.0) return 0;
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& packed = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const double pivot = packed(i, i);
    if (std::abs(pivot) <= rel_tol * norm) return 0;
    if (pivot < 0) sign = -sign;
  }
  return sign;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double smallest_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (a.rows() < a.cols()) return 0.0;
  return sv(sv.size() - 1);
}

Matrix null_space(const Matrix& a, double abs_tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > abs_tol) ++rank;
  const Eigen::Index nullity = a.cols() - rank;
  return svd.matrixV().rightCols(nullity);
}

Matrix orthonormal_span(const Matrix& cols, double rel_tol) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

double smallest_principal_angle(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() == 0 || q2.cols() == 0) return std::numbers::pi / 2;
  // sin of the smallest angle is the smallest singular value of the part of
  // q2 orthogonal to span(q1), when dim q2 <= codim q1. Otherwise the spaces
  // must intersect.
  if (q1.cols() + q2.cols() > q1.rows()) return 0.0;
  const Matrix residual = q2 - q1 * (q1.transpose() * q2);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double sin_min = svd.singularValues()(svd.singularValues().size() - 1);
  return std::asin(std::min(1.0, sin_min));
}

}  // namespace linalg
}  // namespace spherebranch
