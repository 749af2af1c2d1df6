#include "spherebranch/orientation.hpp"

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

void require_same_shape(const Matrix& t, const Matrix& k) {
  if (t.rows() != t.cols() || k.rows() != t.rows() || k.cols() != t.cols())
    throw Error(ErrorKind::InvalidInput, "companion: dimension mismatch");
}

int companion_det_sign(const Matrix& t, const Matrix& k) {
  require_same_shape(t, k);
  const int sign = linalg::det_sign(t + k);
  if (sign == 0) throw Error(ErrorKind::ConstraintViolation, "companion: T + K is singular");
  return sign;
}

}  // namespace

bool is_companion(const Matrix& t, const Matrix& k) {
  require_same_shape(t, k);
  return linalg::det_sign(t + k) != 0;
}

bool companions_equivalent(const Matrix& t, const Matrix& k1, const Matrix& k2) {
  // det((T+K2)^{-1}(T+K1)) = det(T+K1) / det(T+K2); only the signs matter and
  // both are bounded away from zero by the companion check.
  return companion_det_sign(t, k1) * companion_det_sign(t, k2) > 0;
}

OrientedOperator::OrientedOperator(Matrix t, Matrix positive_companion)
    : t_(std::move(t)), k_(std::move(positive_companion)) {
  require_same_shape(t_, k_);
  if (!is_companion(t_, k_))
    throw Error(ErrorKind::ConstraintViolation, "oriented operator: representative is not a companion");
}

OrientedOperator OrientedOperator::natural(Matrix t) {
  Matrix zero = Matrix::Zero(t.rows(), t.cols());
  return OrientedOperator(std::move(t), std::move(zero));
}

OrientedOperator OrientedOperator::reversed() const {
  // Flip the sign of det(T + K) by composing T + K with a reflection.
  Matrix flipped = t_ + k_;
  flipped.col(0) = -flipped.col(0);
  return OrientedOperator(t_, flipped - t_);
}

int operator_sign(const OrientedOperator& op) {
  const int det_t = linalg::det_sign(op.op());
  if (det_t == 0) return 0;
  return det_t * companion_det_sign(op.op(), op.positive_companion()) > 0 ? 1 : -1;
}

Matrix oriented_composition_companion(const Matrix& t1, const Matrix& k1, const Matrix& t2,
                                      const Matrix& k2) {
  if (t1.rows() != t2.cols()) throw Error(ErrorKind::InvalidInput, "composition: dimension mismatch");
  if (!is_companion(t1, k1) || !is_companion(t2, k2))
    throw Error(ErrorKind::ConstraintViolation, "composition: argument is not a companion");
  return (t2 + k2) * (t1 + k1) - t2 * t1;
}

OrientedOperator compose(const OrientedOperator& first, const OrientedOperator& second) {
  Matrix k = oriented_composition_companion(first.op(), first.positive_companion(), second.op(),
                                            second.positive_companion());
  return OrientedOperator(second.op() * first.op(), std::move(k));
}

}  // namespace spherebranch
