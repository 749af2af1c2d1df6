#pragma once

#include "spherebranch/linalg.hpp"

namespace spherebranch {

// Companions and orientations of square operators. In finite dimensions any
// matrix K with T + K invertible is a companion of T, and the companions split
// into two classes by the sign of det((T + K2)^{-1} (T + K1)).

bool is_companion(const Matrix& t, const Matrix& k);

/// True iff K1 and K2 lie in the same orientation class of T.
/// Throws ConstraintViolation when either is not a companion.
bool companions_equivalent(const Matrix& t, const Matrix& k1, const Matrix& k2);

/// An operator together with a representative of its positive companion class.
class OrientedOperator {
 public:
  OrientedOperator(Matrix t, Matrix positive_companion);

  /// Orientation in which the zero operator is a positive companion; T must be invertible.
  static OrientedOperator natural(Matrix t);

  const Matrix& op() const { return t_; }
  const Matrix& positive_companion() const { return k_; }

  /// The same operator carrying the opposite orientation.
  OrientedOperator reversed() const;

 private:
  Matrix t_;
  Matrix k_;
};

/// +1 invertible and naturally oriented, -1 invertible and not, 0 singular.
int operator_sign(const OrientedOperator& op);

/// (T2 + K2)(T1 + K1) - T2 T1: a positive companion of T2 T1.
Matrix oriented_composition_companion(const Matrix& t1, const Matrix& k1, const Matrix& t2,
                                      const Matrix& k2);

/// The oriented composition second * first.
OrientedOperator compose(const OrientedOperator& first, const OrientedOperator& second);

}  // namespace spherebranch
