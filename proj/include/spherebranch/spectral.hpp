#pragma once

#include <vector>

#include "spherebranch/operators.hpp"

namespace spherebranch {

struct Window {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Relative rank tolerance for kernel decisions of L - lambda C.
inline constexpr double kRankRelTol = 1e-8;
/// Cluster radius for eigenvalues of the resolvent (L - lambda_hat C)^{-1} C.
inline constexpr double kClusterRadius = 1e-6;
/// Threshold on the smallest principal angle between Im T and C(Ker T).
inline constexpr double kTransversalityAngle = 1e-6;
/// Lower bound on the smallest singular value of C restricted to a kernel.
inline constexpr double kInjectivityTol = 1e-10;

struct EigenvalueInfo {
  double lambda = 0.0;
  int geometric_mult = 0;
  int algebraic_mult = 0;
  Matrix kernel_basis;  // n x geometric_mult, orthonormal columns
};

/// Absolute singular-value threshold used for the kernel of L - lambda C.
double rank_tolerance(const Pencil& pencil, double lambda);

bool is_eigenvalue(const Pencil& pencil, double lambda);

/// Point of `window` (sampled on a fixed grid) maximizing the smallest
/// singular value of L - lambda C. Falls back to the pencil's regular point.
double choose_resolvent_point(const Pencil& pencil, Window window);

/// Real eigenvalues of the pencil in `window`, ascending.
std::vector<EigenvalueInfo> pencil_eigenvalues(const Pencil& pencil, Window window);

/// Orthonormal basis of the numerical kernel of L - lambda C (n x 0 if trivial).
Matrix kernel_basis(const Pencil& pencil, double lambda);

/// Algebraic multiplicity of lambda read off the resolvent spectrum.
int algebraic_multiplicity(const Pencil& pencil, double lambda, double lambda_hat);

struct Splitting {
  Matrix g1;  // (Ker T)^perp
  Matrix g2;  // Ker T
  Matrix h1;  // Im T
  Matrix h2;  // C (Ker T), orthonormalized
};

struct HypothesisCertificate {
  double lambda_star = 0.0;
  bool h1_compact = false;
  bool h2_odd = false;
  double h3_residual = 0.0;  // smallest principal angle between Im T and C(Ker T)
  bool h3_holds = false;
  int geometric_mult = 0;
  int algebraic_mult = 0;
  double kernel_injectivity = 0.0;  // min singular value of C on Ker T
  bool simple = false;              // one-dimensional kernel with C x* outside Im T
  Splitting splitting;
};

/// Throws NotAnEigenvalue when L - lambda_star C has trivial kernel.
HypothesisCertificate certify(const Pencil& pencil, double lambda_star);

inline int eigensphere_dim(const EigenvalueInfo& info) { return info.geometric_mult - 1; }

}  // namespace spherebranch
