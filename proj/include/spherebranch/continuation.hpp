#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spherebranch/spectral.hpp"

namespace spherebranch {

struct SolutionPoint {
  double s = 0.0;
  double lambda = 0.0;
  Vector x;
  double residual = 0.0;  // || psi_plus(s, lambda, x) ||
};

enum class Termination { Unbounded, TrivialReturn, ClosedLoop, StepFailure };
const char* to_string(Termination t);

struct Branch {
  SolutionPoint anchor;
  std::vector<SolutionPoint> points;  // starts with the anchor
  Termination termination = Termination::StepFailure;
  /// Trivial solution reached at a different eigenvalue (TrivialReturn only).
  double lambda_second = std::numeric_limits<double>::quiet_NaN();
  Vector x_second;
  double arclength = 0.0;
  double max_abs_s = 0.0;
  std::string diagnostics;
};

struct ContinuationSettings {
  double initial_step = 1e-2;
  double min_step = 1e-8;
  double max_step = 0.1;
  double shrink = 0.5;
  double grow = 1.3;
  int grow_after = 4;
  int max_steps = 20000;
  int max_newton = 12;
  /// Unbounded once max(|s|, |lambda|) reaches this radius.
  double bound = 10.0;
  /// Accepted points satisfy ||psi_plus|| <= residual_tol * scale.
  double residual_tol = 1e-9;
  double s_tol = 1e-7;
  double sphere_tol = 1e-6;
  double loop_tol = 1e-6;
  /// Great-circle samples per kernel-basis pair on multiple eigenspheres.
  int anchor_grid = 8;
  /// Trace from the eigensphere grid as well when classifying a multiple eigenvalue.
  bool trace_grid = true;
  int threads = 1;
};

/// The trivial solutions (0, lambda, x) for each eigenvalue in `window`: the
/// twin pair for one-dimensional kernels, a great-circle grid otherwise.
std::vector<SolutionPoint> find_trivial_solutions(const PerturbedProblem& problem, Window window,
                                                  int grid_density = 8);

/// Pseudo-arclength continuation of psi_plus = 0 on R x R x S^{n-1} from `anchor`.
Branch trace_branch(const PerturbedProblem& problem, const SolutionPoint& anchor, int direction,
                    const ContinuationSettings& settings = {});

enum class Verdict { Unbounded, TrivialReturn, IsolatedCompact, Inconclusive };
const char* to_string(Verdict v);

struct ComponentVerdict {
  Verdict verdict = Verdict::Inconclusive;
  double lambda_second = std::numeric_limits<double>::quiet_NaN();
  Vector x_second;
  std::vector<Branch> branches;
  std::string diagnostics;
};

/// Traces every branch needed to decide the Rabinowitz alternative for the
/// component of `anchor` inside the box max(|s|, |lambda|) < bound.
ComponentVerdict classify_component(const PerturbedProblem& problem, const SolutionPoint& anchor,
                                    double bound, const ContinuationSettings& settings = {});

/// Points of the lambda_star eigensphere from which nontrivial branches
/// emanate, each recovered as the limit of x(s) as s -> 0 along the branch.
std::vector<Vector> detect_bifurcation_points(const PerturbedProblem& problem, double lambda_star,
                                              const ContinuationSettings& settings = {});

/// Merges near-duplicates (distance <= tol) and reports each antipodal class
/// once per sign observed.
std::vector<Vector> dedupe_bifurcation_points(const std::vector<Vector>& points, double tol = 1e-6);

/// Candidate directions a in the kernel basis solving the reduced equation
/// P N(K a) = mu a on the unit sphere of R^m (P: projection onto C(Ker T)
/// along Im T, in the basis C K).
std::vector<Vector> reduced_bifurcation_candidates(const PerturbedProblem& problem, double lambda_star,
                                                   int grid_density = 8);

}  // namespace spherebranch
