#pragma once

#include <optional>
#include <vector>

#include "spherebranch/spectral.hpp"

namespace spherebranch {

/// Orientation of psi on R x S^{n-1}.
///
/// A tangent basis (v_1..v_{n-1}) at x is positive iff det[x | v_1 | ... | v_{n-1}] > 0;
/// the cylinder basis is ordered (d/dlambda, v_1, ..., v_{n-1}). `global_sign`
/// selects one of the two orientations of psi.
struct OrientationConvention {
  int global_sign = 1;
};

/// Positively oriented orthonormal basis of the tangent space x^perp (n x (n-1)),
/// built from a Householder reflector. Deterministic in x.
Matrix tangent_frame(const Vector& x);

/// Sign of det(I - (lambda - lambda_hat) (L - lambda_hat C)^{-1} C): the
/// Leray-Schauder degree of the linear compact vector field on the unit ball.
int ls_sign(const Pencil& pencil, double lambda_hat, double lambda);

/// Local degree of psi at a simple eigenpoint (lambda, x): the sign of the
/// differential d psi (lambda_dot, x_dot) = (L - lambda C) x_dot - lambda_dot C x
/// on the positively oriented tangent basis of the cylinder.
int simple_eigenpoint_sign(const Pencil& pencil, double lambda, const Vector& x,
                           OrientationConvention conv = {});

enum class DegreeMethod { ComputationFormula, EpsilonPerturbation };

const char* to_string(DegreeMethod m);

struct EigensetContribution {
  double lambda_star = 0.0;
  int value = 0;
  DegreeMethod method = DegreeMethod::ComputationFormula;
  int geometric_mult = 0;
  /// Perturbation size actually used (0 for the computation formula route).
  double epsilon = 0.0;
  /// The same contribution recomputed at epsilon / 2 (equals `value` on the
  /// computation formula route).
  int value_half_epsilon = 0;
  std::vector<double> perturbed_eigenvalues;
};

struct ContributionOptions {
  std::optional<double> epsilon;
  /// Force the epsilon route even for simple eigenvalues (used as a cross-check).
  bool force_epsilon = false;
};

/// Degree of psi on (alpha, beta) x S when lambda_star is the only eigenvalue in
/// [alpha, beta]. Simple eigenvalues use the two twin local degrees; other
/// transversal eigenvalues are split by a diagonal perturbation of the kernel
/// block after the change of variables Z = blockdiag(T11^{-1}, C22^{-1}).
EigensetContribution eigenset_contribution(const Pencil& pencil, double lambda_star, Window interval,
                                           OrientationConvention conv = {},
                                           ContributionOptions opts = {});

struct DegreeOptions {
  std::optional<double> lambda_hat;
  std::optional<double> epsilon;
};

struct DegreeReport {
  Window interval{0.0, 0.0};
  int value = 0;
  DegreeMethod method = DegreeMethod::ComputationFormula;
  double lambda_hat = 0.0;
  int ls_sign_alpha = 0;
  int ls_sign_beta = 0;
  std::vector<EigensetContribution> eigensets;
};

DegreeReport degree_on_interval(const Pencil& pencil, double alpha, double beta,
                                OrientationConvention conv = {}, DegreeOptions opts = {});

struct ConjectureRecord {
  bool deg_nonzero = false;
  bool endpoint_signs_differ = false;
  bool agree = false;
  DegreeReport report;
};

/// Compares "degree on (alpha, beta) x S is nonzero" with "the LS signs at
/// alpha and beta differ". Records the outcome; never asserts it.
ConjectureRecord conjecture_check(const Pencil& pencil, double alpha, double beta,
                                  OrientationConvention conv = {}, DegreeOptions opts = {});

}  // namespace spherebranch
