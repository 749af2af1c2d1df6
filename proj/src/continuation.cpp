#include "spherebranch/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "spherebranch/error.hpp"
#include "spherebranch/parallel.hpp"

namespace spherebranch {

namespace {

// Unknowns are packed as y = (s, lambda, x_1, ..., x_n).
Vector pack(double s, double lambda, const Vector& x) {
  Vector y(x.size() + 2);
  y << s, lambda, x;
  return y;
}

Vector pack(const SolutionPoint& p) { return pack(p.s, p.lambda, p.x); }

class System {
 public:
  explicit System(const PerturbedProblem& problem) : problem_(problem), n_(problem.dim()) {}

  int dim() const { return n_; }

  Vector psi_plus(const Vector& y) const {
    const Vector x = y.tail(n_);
    Vector r = problem_.pencil.L() * x - y(1) * (problem_.pencil.C() * x);
    if (y(0) != 0.0) r += y(0) * problem_.perturbation.evaluate_unchecked(x);
    return r;
  }

  /// psi_plus together with the sphere equation (||x||^2 - 1) / 2.
  Vector residual(const Vector& y) const {
    Vector f(n_ + 1);
    f.head(n_) = psi_plus(y);
    f(n_) = 0.5 * (y.tail(n_).squaredNorm() - 1.0);
    return f;
  }

  Matrix jacobian(const Vector& y) const {
    const Vector x = y.tail(n_);
    Matrix j = Matrix::Zero(n_ + 1, n_ + 2);
    j.block(0, 0, n_, 1) = problem_.perturbation.evaluate_unchecked(x);
    j.block(0, 1, n_, 1) = -(problem_.pencil.C() * x);
    j.block(0, 2, n_, n_) = problem_.pencil.at(y(1));
    if (y(0) != 0.0) j.block(0, 2, n_, n_) += y(0) * problem_.perturbation.derivative_unchecked(x);
    j.block(n_, 2, 1, n_) = x.transpose();
    return j;
  }

  double scale(const Vector& y) const {
    const Vector x = y.tail(n_);
    const double nx = std::abs(y(0)) * (1.0 + problem_.perturbation.evaluate_unchecked(x).norm());
    return 1.0 + problem_.pencil.scale(y(1)) + nx;
  }

  SolutionPoint point(const Vector& y) const {
    return {y(0), y(1), y.tail(n_), psi_plus(y).norm()};
  }

 private:
  const PerturbedProblem& problem_;
  int n_;
};

// Newton with minimum-norm updates on {F(y) = 0, c . y = b}. The complete
// orthogonal decomposition keeps the iteration well defined on solution sets
// of dimension > 1 (eigenspheres), where the augmented Jacobian is singular.
std::optional<Vector> correct(const System& sys, Vector y, const Vector& c, double b,
                              const ContinuationSettings& st) {
  const int n = sys.dim();
  Matrix j(n + 2, n + 2);
  Vector g(n + 2);
  bool converged = false;
  for (int it = 0; it < st.max_newton; ++it) {
    g.head(n + 1) = sys.residual(y);
    g(n + 1) = c.dot(y) - b;
    if (!g.allFinite()) return std::nullopt;
    const double scale = sys.scale(y);
    if (g.norm() <= 1e-13 * scale) {
      converged = true;
      break;
    }
    j.topRows(n + 1) = sys.jacobian(y);
    j.row(n + 1) = c.transpose();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(j);
    cod.setThreshold(1e-10);
    const Vector dy = cod.solve(-g);
    y += dy;
    if (!y.allFinite()) return std::nullopt;
    if (dy.norm() <= 1e-15 * (1.0 + y.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    g.head(n + 1) = sys.residual(y);
    g(n + 1) = c.dot(y) - b;
    if (!(g.norm() <= 1e-11 * sys.scale(y))) return std::nullopt;
  }
  y.tail(n).normalize();
  if (sys.psi_plus(y).norm() > st.residual_tol * sys.scale(y)) return std::nullopt;
  return y;
}

Matrix jacobian_null_space(const System& sys, const Vector& y) {
  const Matrix j = sys.jacobian(y);
  Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * sv(0)) ++rank;
  return svd.matrixV().rightCols(j.cols() - rank);
}

// Tangent at y continuing `prev`: the null direction of DF closest to prev.
Vector tangent(const System& sys, const Vector& y, const Vector& prev) {
  const Matrix null = jacobian_null_space(sys, y);
  Vector t;
  if (null.cols() == 1) {
    t = null.col(0);
  } else {
    t = null * (null.transpose() * prev);
    if (t.norm() < 1e-8) t = null.col(0);
  }
  t.normalize();
  if (t.dot(prev) < 0) t = -t;
  return t;
}

// Starting direction: the null direction of DF with the smallest angle to the
// s-axis; when DF has no s-component in its null space, the first coordinate
// axis (lambda, x_1, ..., x_n) with a nonzero projection.
Vector anchor_tangent(const System& sys, const Vector& y) {
  const Matrix null = jacobian_null_space(sys, y);
  for (Eigen::Index axis = 0; axis < y.size(); ++axis) {
    Vector e = Vector::Zero(y.size());
    e(axis) = 1.0;
    Vector t = null * (null.transpose() * e);
    if (t.norm() > 1e-8) {
      t.normalize();
      if (t(axis) < 0) t = -t;
      return t;
    }
  }
  return null.col(0);
}

double sphere_distance(const Matrix& kernel, const Vector& x) {
  if (kernel.cols() == 0) return x.norm();
  return (x - kernel * (kernel.transpose() * x)).norm();
}

using StopPredicate = std::function<bool(const Vector&)>;

Branch trace_impl(const PerturbedProblem& problem, const SolutionPoint& anchor, int direction,
                  const ContinuationSettings& st, const StopPredicate& stop) {
  if (direction != 1 && direction != -1)
    throw Error(ErrorKind::InvalidInput, "trace_branch: direction must be +1 or -1");
  if (anchor.x.size() != problem.dim()) throw Error(ErrorKind::InvalidInput, "trace_branch: dimension mismatch");
  require_unit(anchor.x, "trace_branch anchor");

  const System sys(problem);
  const int n = sys.dim();
  const Vector y0 = pack(anchor);
  if (sys.psi_plus(y0).norm() > st.residual_tol * sys.scale(y0))
    throw Error(ErrorKind::ConstraintViolation, "trace_branch: anchor is not a solution");

  Branch br;
  br.anchor = sys.point(y0);
  br.points.push_back(br.anchor);
  br.max_abs_s = std::abs(anchor.s);

  const Vector t0 = anchor_tangent(sys, y0) * static_cast<double>(direction);
  Vector y = y0;
  Vector t = t0;
  double h = st.initial_step;
  int successes = 0;
  bool left_anchor = false;
  Vector e_s = Vector::Zero(n + 2);
  e_s(0) = 1.0;

  auto describe = [&](const char* what) {
    std::ostringstream os;
    os << what << " at s=" << y(0) << " lambda=" << y(1) << " step=" << h;
    return os.str();
  };

  for (int step = 0; step < st.max_steps; ++step) {
    if (h < st.min_step) {
      br.termination = Termination::StepFailure;
      br.diagnostics = describe("corrector failed below the step floor");
      return br;
    }
    const Vector yp = y + h * t;
    auto yc = correct(sys, yp, t, t.dot(yp), st);
    Vector tn;
    bool ok = yc && (*yc - yp).norm() <= 0.5 * h;
    if (ok) {
      tn = tangent(sys, *yc, t);
      ok = tn.dot(t) > 0.9;
    }
    if (!ok) {
      h *= st.shrink;
      successes = 0;
      continue;
    }

    const Vector prev = y;
    y = *yc;
    t = tn;
    br.arclength += (y - prev).norm();
    br.points.push_back(sys.point(y));
    br.max_abs_s = std::max(br.max_abs_s, std::abs(y(0)));

    if (stop && stop(y)) {
      br.termination = Termination::StepFailure;
      br.diagnostics = "stopped by caller";
      return br;
    }

    if (std::max(std::abs(y(0)), std::abs(y(1))) >= st.bound) {
      br.termination = Termination::Unbounded;
      return br;
    }

    // Return to the trivial set s = 0.
    const double s_prev = prev(0);
    const double s_cur = y(0);
    if (std::abs(s_prev) > st.s_tol && (s_prev * s_cur < 0 || std::abs(s_cur) <= st.s_tol)) {
      const double w = s_prev / (s_prev - s_cur);
      const Vector guess = prev + w * (y - prev);
      if (auto ys = correct(sys, guess, e_s, 0.0, st)) {
        const double lambda_c = (*ys)(1);
        const Vector xc = ys->tail(n);
        const Matrix kernel = kernel_basis(problem.pencil, lambda_c);
        if (sphere_distance(kernel, xc) <= st.sphere_tol) {
          br.arclength += (*ys - prev).norm() - (y - prev).norm();
          br.points.back() = sys.point(*ys);
          if (std::abs(lambda_c - anchor.lambda) > kClusterRadius * (1.0 + std::abs(anchor.lambda))) {
            br.termination = Termination::TrivialReturn;
            br.lambda_second = lambda_c;
            br.x_second = xc;
          } else {
            br.termination = Termination::ClosedLoop;
            br.diagnostics = "returned to the anchor eigenset with s != 0 along the way";
          }
          return br;
        }
      }
    }

    // Return to the anchor itself.
    const double dist = (y - y0).norm();
    if (!left_anchor && dist > 10.0 * st.initial_step) left_anchor = true;
    if (left_anchor && dist <= 2.0 * st.max_step && t.dot(t0) > 0.5) {
      const double sigma = t.dot(y0 - y);
      if (sigma > -h) {
        auto yl = correct(sys, y + sigma * t, t, t.dot(y0), st);
        if (yl && (*yl - y0).norm() <= st.loop_tol) {
          br.arclength += (*yl - y).norm();
          br.points.push_back(sys.point(*yl));
          br.termination = Termination::ClosedLoop;
          return br;
        }
      }
    }

    if (++successes >= st.grow_after) {
      h = std::min(h * st.grow, st.max_step);
      successes = 0;
    }
  }
  br.termination = Termination::StepFailure;
  br.diagnostics = describe("step budget exhausted");
  return br;
}

// Sign normalization: largest-magnitude component positive.
Vector canonical_sign(const Vector& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  return v(i) < 0 ? Vector(-v) : v;
}

std::vector<Vector> sphere_grid(int m, int density) {
  std::vector<Vector> out;
  auto push_unique = [&](const Vector& v) {
    for (const auto& u : out)
      if ((u - v).norm() < 1e-12) return;
    out.push_back(v);
  };
  if (m == 1) {
    push_unique(Vector::Ones(1));
    push_unique(-Vector::Ones(1));
    return out;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int q = 0; q < density; ++q) {
        const double a = 2.0 * std::numbers::pi * q / density;
        Vector v = Vector::Zero(m);
        v(i) = std::cos(a);
        v(j) = std::sin(a);
        for (Eigen::Index k = 0; k < m; ++k)
          if (std::abs(v(k)) < 1e-15) v(k) = 0.0;
        push_unique(v);
      }
    }
  }
  return out;
}

Matrix fixed_sign_kernel(const Pencil& pencil, double lambda) {
  Matrix k = kernel_basis(pencil, lambda);
  for (Eigen::Index c = 0; c < k.cols(); ++c) k.col(c) = canonical_sign(k.col(c));
  return k;
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Unbounded: return "Unbounded";
    case Termination::TrivialReturn: return "TrivialReturn";
    case Termination::ClosedLoop: return "ClosedLoop";
    case Termination::StepFailure: return "StepFailure";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::TrivialReturn: return "TrivialReturn";
    case Verdict::IsolatedCompact: return "IsolatedCompact";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::vector<SolutionPoint> find_trivial_solutions(const PerturbedProblem& problem, Window window,
                                                  int grid_density) {
  std::vector<SolutionPoint> out;
  if (!(window.lo < window.hi)) return out;
  for (const auto& info : pencil_eigenvalues(problem.pencil, window)) {
    const Matrix k = fixed_sign_kernel(problem.pencil, info.lambda);
    for (const Vector& a : sphere_grid(static_cast<int>(k.cols()), grid_density)) {
      const Vector x = (k * a).normalized();
      out.push_back({0.0, info.lambda, x, psi(problem.pencil, info.lambda, x).norm()});
    }
  }
  return out;
}

Branch trace_branch(const PerturbedProblem& problem, const SolutionPoint& anchor, int direction,
                    const ContinuationSettings& settings) {
  return trace_impl(problem, anchor, direction, settings, {});
}

std::vector<Vector> reduced_bifurcation_candidates(const PerturbedProblem& problem, double lambda_star,
                                                   int grid_density) {
  const auto cert = certify(problem.pencil, lambda_star);
  if (!cert.h3_holds)
    throw Error(ErrorKind::NotTransversal, "bifurcation candidates need Im T and C(Ker T) complementary");
  const int n = problem.dim();
  const int m = cert.geometric_mult;
  const Matrix kernel = fixed_sign_kernel(problem.pencil, lambda_star);
  Matrix w(n, n);
  w << cert.splitting.h1, problem.pencil.C() * kernel;
  const Eigen::PartialPivLU<Matrix> w_lu(w);

  auto reduced = [&](const Vector& a) -> Vector {
    return w_lu.solve(problem.perturbation.evaluate_unchecked(kernel * a)).tail(m);
  };
  auto reduced_jac = [&](const Vector& a) -> Matrix {
    return w_lu.solve(problem.perturbation.derivative_unchecked(kernel * a) * kernel).bottomRows(m);
  };

  std::vector<Vector> seeds = sphere_grid(m, grid_density);
  if (const auto& lin = problem.perturbation.linear_matrix()) {
    const Matrix reduced_m = w_lu.solve(*lin * kernel).bottomRows(m);
    Eigen::EigenSolver<Matrix> es(reduced_m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(es.eigenvalues()(i).imag()) > 1e-10) continue;
      Vector v = es.eigenvectors().col(i).real();
      if (v.norm() < 1e-12) continue;
      v.normalize();
      seeds.push_back(v);
      seeds.push_back(-v);
    }
  }

  std::vector<Vector> found;
  for (const Vector& seed : seeds) {
    Vector a = seed;
    double mu = a.dot(reduced(a));
    bool ok = false;
    for (int it = 0; it < 40; ++it) {
      Vector r(m + 1);
      r.head(m) = reduced(a) - mu * a;
      r(m) = 0.5 * (a.squaredNorm() - 1.0);
      if (r.norm() <= 1e-13) {
        ok = true;
        break;
      }
      Matrix j(m + 1, m + 1);
      j.topLeftCorner(m, m) = reduced_jac(a) - mu * Matrix::Identity(m, m);
      j.topRightCorner(m, 1) = -a;
      j.bottomLeftCorner(1, m) = a.transpose();
      j(m, m) = 0.0;
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(j);
      cod.setThreshold(1e-12);
      const Vector d = cod.solve(-r);
      a += d.head(m);
      mu += d(m);
      if (!a.allFinite()) break;
    }
    if (!ok) continue;
    a.normalize();
    bool dup = false;
    for (const auto& f : found)
      if ((f - a).norm() < 1e-8) dup = true;
    if (!dup) found.push_back(a);
  }

  std::vector<Vector> out;
  for (const auto& a : found) out.push_back((kernel * a).normalized());
  return out;
}

std::vector<Vector> dedupe_bifurcation_points(const std::vector<Vector>& points, double tol) {
  struct Class {
    Vector canon;
    bool plus = false;
    bool minus = false;
  };
  std::vector<Class> classes;
  for (const auto& p : points) {
    const Vector c = canonical_sign(p);
    const bool is_plus = (c - p).norm() <= (c + p).norm();
    bool placed = false;
    for (auto& cl : classes) {
      if ((cl.canon - c).norm() <= tol) {
        (is_plus ? cl.plus : cl.minus) = true;
        placed = true;
        break;
      }
      if ((cl.canon + c).norm() <= tol) {  // tie in the sign normalization
        (is_plus ? cl.minus : cl.plus) = true;
        placed = true;
        break;
      }
    }
    if (!placed) {
      Class cl{c};
      (is_plus ? cl.plus : cl.minus) = true;
      classes.push_back(cl);
    }
  }
  std::vector<Vector> out;
  for (const auto& cl : classes) {
    if (cl.plus) out.push_back(cl.canon);
    if (cl.minus) out.push_back(-cl.canon);
  }
  return out;
}

std::vector<Vector> detect_bifurcation_points(const PerturbedProblem& problem, double lambda_star,
                                              const ContinuationSettings& st) {
  const auto cert = certify(problem.pencil, lambda_star);
  if (cert.geometric_mult < 2)
    throw Error(ErrorKind::InvalidInput, "detect_bifurcation_points: eigenvalue must have a multiple kernel");
  const double lambda = cert.lambda_star;
  const System sys(problem);
  const int n = sys.dim();
  constexpr double kProbe = 0.05;
  constexpr int kLadder = 8;

  ContinuationSettings probe = st;
  probe.max_steps = 400;
  Vector e_s = Vector::Zero(n + 2);
  e_s(0) = 1.0;

  const auto candidates = reduced_bifurcation_candidates(problem, lambda, st.anchor_grid);
  std::vector<std::vector<Vector>> limits(candidates.size());
  detail::parallel_for(candidates.size(), st.threads, [&](std::size_t ci) {
    const Vector& xhat = candidates[ci];
    const SolutionPoint anchor{0.0, lambda, xhat, 0.0};
    const Vector t0 = anchor_tangent(sys, pack(anchor));
    if (std::abs(t0(0)) < 1e-6) return;  // no s-direction: not a bifurcation point
    for (int dir : {1, -1}) {
      const Branch br = trace_impl(problem, anchor, dir, probe,
                                   [&](const Vector& y) { return std::abs(y(0)) >= kProbe; });
      const SolutionPoint& last = br.points.back();
      if (std::abs(last.s) < kProbe) continue;

      // x(s) on a geometric ladder s_j = s_0 2^{-j}, then Richardson extrapolation to s = 0.
      Vector y = pack(last);
      std::vector<Vector> xs;
      for (int j = 0; j < kLadder; ++j) {
        const double target = last.s * std::ldexp(1.0, -j);
        auto yc = correct(sys, y, e_s, target, st);
        if (!yc) break;
        y = *yc;
        xs.push_back(y.tail(n));
      }
      if (xs.size() < 3) continue;
      std::vector<std::vector<Vector>> table(xs.size());
      for (std::size_t j = 0; j < xs.size(); ++j) {
        table[j].push_back(xs[j]);
        for (std::size_t k = 1; k <= std::min<std::size_t>(j, 3); ++k) {
          const double f = std::ldexp(1.0, static_cast<int>(k)) - 1.0;
          table[j].push_back(table[j][k - 1] + (table[j][k - 1] - table[j - 1][k - 1]) / f);
        }
      }
      limits[ci].push_back(table.back().back().normalized());
    }
  });

  std::vector<Vector> all;
  for (auto& l : limits) all.insert(all.end(), l.begin(), l.end());
  return dedupe_bifurcation_points(all, 1e-6);
}

ComponentVerdict classify_component(const PerturbedProblem& problem, const SolutionPoint& anchor,
                                    double bound, const ContinuationSettings& settings) {
  if (std::abs(anchor.s) > settings.s_tol)
    throw Error(ErrorKind::InvalidInput, "classify_component: anchor must be a trivial solution");
  ContinuationSettings st = settings;
  st.bound = bound;

  std::vector<SolutionPoint> anchors{anchor};
  const Matrix kernel = kernel_basis(problem.pencil, anchor.lambda);
  if (kernel.cols() > 1) {
    for (const Vector& x : reduced_bifurcation_candidates(problem, anchor.lambda, st.anchor_grid))
      anchors.push_back({0.0, anchor.lambda, x, 0.0});
    if (st.trace_grid) {
      const Window w{anchor.lambda - 1e-9 * (1.0 + std::abs(anchor.lambda)),
                     anchor.lambda + 1e-9 * (1.0 + std::abs(anchor.lambda))};
      for (const auto& p : find_trivial_solutions(problem, w, st.anchor_grid)) anchors.push_back(p);
    }
  }

  ComponentVerdict out;
  out.branches.resize(2 * anchors.size());
  detail::parallel_for(out.branches.size(), st.threads, [&](std::size_t i) {
    out.branches[i] = trace_impl(problem, anchors[i / 2], i % 2 == 0 ? 1 : -1, st, {});
  });

  bool unbounded = false;
  const Branch* trivial = nullptr;
  bool all_flat_loops = true;
  std::ostringstream diag;
  for (const auto& br : out.branches) {
    switch (br.termination) {
      case Termination::Unbounded: unbounded = true; break;
      case Termination::TrivialReturn:
        if (!trivial) trivial = &br;
        break;
      case Termination::ClosedLoop:
        if (br.max_abs_s > st.s_tol) {
          all_flat_loops = false;
          diag << "closed loop with s != 0 from lambda=" << br.anchor.lambda << "; ";
        }
        break;
      case Termination::StepFailure:
        all_flat_loops = false;
        diag << "step failure: " << br.diagnostics << "; ";
        break;
    }
  }
  if (unbounded) {
    out.verdict = Verdict::Unbounded;
  } else if (trivial) {
    out.verdict = Verdict::TrivialReturn;
    out.lambda_second = trivial->lambda_second;
    out.x_second = trivial->x_second;
  } else if (all_flat_loops) {
    out.verdict = Verdict::IsolatedCompact;
  } else {
    out.verdict = Verdict::Inconclusive;
  }
  out.diagnostics = diag.str();
  return out;
}

}  // namespace spherebranch
