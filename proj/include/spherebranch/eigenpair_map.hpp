#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "spherebranch/operators.hpp"

namespace spherebranch {

/// Rectangle [s_lo, s_hi] x [lambda_lo, lambda_hi] of the s-lambda plane.
struct PlaneWindow {
  double s_lo = -1.0;
  double s_hi = 1.0;
  double lambda_lo = -1.0;
  double lambda_hi = 1.0;
};

/// OpenCurve: a non-horizontal contour leaving the window.
enum class ComponentKind { Line, ClosedCurve, OpenCurve, IsolatedPoint };
const char* to_string(ComponentKind k);

struct ConicFit {
  double s0 = 0.0;
  double lambda0 = 0.0;
  double a_s = 0.0;
  double a_lambda = 0.0;
  double residual = 0.0;  // max |(s-s0)^2/a_s^2 + (lambda-lambda0)^2/a_lambda^2 - 1|
};

using PlanePoint = std::array<double, 2>;  // (s, lambda)

struct EigenpairComponent {
  ComponentKind kind = ComponentKind::ClosedCurve;
  std::vector<PlanePoint> samples;
  std::optional<ConicFit> conic_fit;
};

struct MapSettings {
  int grid = 200;  // nodes per axis
  int threads = 1;
  int max_refinements = 2;
};

/// det(D (L + s N - lambda C)) with D the fixed inverse row scales
/// 1 / (||L_i|| + ||N_i|| + ||C_i||). Throws UnsupportedMap for nonlinear N.
double eigenpair_det(const PerturbedProblem& problem, double s, double lambda);

/// Zero set of eigenpair_det in `window`, split into lines, closed curves,
/// open curves and isolated points. Closed curves carry a conic fit when one
/// exists.
std::vector<EigenpairComponent> trace_components(const PerturbedProblem& problem, PlaneWindow window,
                                                 const MapSettings& settings = {});

/// Axis-aligned least-squares ellipse through the samples of a closed curve.
ConicFit fit_conic(const EigenpairComponent& component);

}  // namespace spherebranch
