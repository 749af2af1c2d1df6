#include "spherebranch/eigenpair_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spherebranch/error.hpp"
#include "spherebranch/parallel.hpp"

namespace spherebranch {

namespace {

constexpr double kZeroRowTol = 1e-12;
constexpr double kLineTol = 1e-8;

class DetField {
 public:
  explicit DetField(const PerturbedProblem& problem) : l_(problem.pencil.L()), c_(problem.pencil.C()) {
    const auto lin = problem.perturbation.linear_matrix();
    if (!lin)
      throw Error(ErrorKind::UnsupportedMap,
                  "eigenpair maps need a linear perturbation; use continuation for nonlinear N");
    n_ = *lin;
    // Row scales come from the operator data, not from (s, lambda), so that
    // the magnitude of the determinant still measures distance to a zero.
    inv_row_scale_.resize(l_.rows());
    for (Eigen::Index i = 0; i < l_.rows(); ++i) {
      const double r = l_.row(i).norm() + n_.row(i).norm() + c_.row(i).norm();
      inv_row_scale_(i) = r > 0 ? 1.0 / r : 1.0;
    }
  }

  Matrix at(double s, double lambda) const { return l_ + s * n_ - lambda * c_; }
  double operator()(double s, double lambda) const {
    return Eigen::PartialPivLU<Matrix>(inv_row_scale_.asDiagonal() * at(s, lambda)).determinant();
  }
  const Matrix& N() const { return n_; }
  const Matrix& C() const { return c_; }
  double scale(double s, double lambda) const {
    return 1.0 + l_.norm() + std::abs(s) * n_.norm() + std::abs(lambda) * c_.norm();
  }

 private:
  Matrix l_, c_, n_;
  Vector inv_row_scale_;
};

struct Grid {
  PlaneWindow w;
  int g = 0;
  double hs = 0.0, hl = 0.0;
  std::vector<double> d;  // row-major in lambda: d[j * g + i]

  double s(int i) const { return w.s_lo + (i + 0.5) * hs; }
  double l(int j) const { return w.lambda_lo + (j + 0.5) * hl; }
  double at(int i, int j) const { return d[static_cast<std::size_t>(j) * g + i]; }
  bool pos(int i, int j) const { return at(i, j) >= 0.0; }

  // Edge ids: horizontal (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1).
  int hedge(int i, int j) const { return j * (g - 1) + i; }
  int vedge(int i, int j) const { return g * (g - 1) + j * g + i; }
  int edge_count() const { return 2 * g * (g - 1); }
};

Grid evaluate_grid(const DetField& f, PlaneWindow w, int g, int threads) {
  Grid grid{w, g, (w.s_hi - w.s_lo) / g, (w.lambda_hi - w.lambda_lo) / g, {}};
  grid.d.resize(static_cast<std::size_t>(g) * g);
  detail::parallel_for(static_cast<std::size_t>(g), threads, [&](std::size_t j) {
    for (int i = 0; i < g; ++i)
      grid.d[j * g + i] = f(grid.s(i), grid.l(static_cast<int>(j)));
  });
  return grid;
}

// Zero of f on the segment a-b, where f(a) and f(b) have opposite signs
// (zero counts as positive).
PlanePoint bisect(const DetField& f, PlanePoint a, PlanePoint b) {
  const bool pa = f(a[0], a[1]) >= 0.0;
  for (int it = 0; it < 64; ++it) {
    const PlanePoint m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    if ((m[0] == a[0] || m[0] == b[0]) && (m[1] == a[1] || m[1] == b[1])) break;
    if ((f(m[0], m[1]) >= 0.0) == pa) a = m;
    else b = m;
  }
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

struct Contours {
  std::vector<std::vector<int>> chains;  // edge ids in order
  std::vector<bool> closed;
  std::vector<PlanePoint> crossing;      // per edge id (valid where crossed)
  bool conflict = false;
};

Contours march(const DetField& f, const Grid& grid, int threads) {
  const int g = grid.g;
  Contours out;
  out.crossing.assign(grid.edge_count(), {0.0, 0.0});
  std::vector<char> crossed(grid.edge_count(), 0);

  for (int j = 0; j < g; ++j)
    for (int i = 0; i + 1 < g; ++i)
      if (grid.pos(i, j) != grid.pos(i + 1, j)) crossed[grid.hedge(i, j)] = 1;
  for (int j = 0; j + 1 < g; ++j)
    for (int i = 0; i < g; ++i)
      if (grid.pos(i, j) != grid.pos(i, j + 1)) crossed[grid.vedge(i, j)] = 1;

  std::vector<int> edges;
  for (int e = 0; e < grid.edge_count(); ++e)
    if (crossed[e]) edges.push_back(e);
  detail::parallel_for(edges.size(), threads, [&](std::size_t k) {
    const int e = edges[k];
    const int hcount = g * (g - 1);
    PlanePoint a, b;
    if (e < hcount) {
      const int j = e / (g - 1), i = e % (g - 1);
      a = {grid.s(i), grid.l(j)};
      b = {grid.s(i + 1), grid.l(j)};
    } else {
      const int r = e - hcount, j = r / g, i = r % g;
      a = {grid.s(i), grid.l(j)};
      b = {grid.s(i), grid.l(j + 1)};
    }
    out.crossing[e] = bisect(f, a, b);
  });

  // Segments per cell; saddles resolved by the sign at the cell center.
  std::vector<std::array<int, 2>> adj(grid.edge_count(), {-1, -1});
  auto link = [&](int a, int b) {
    for (int e : {a, b}) {
      auto& slot = adj[e];
      const int other = e == a ? b : a;
      if (slot[0] < 0) slot[0] = other;
      else slot[1] = other;
    }
  };
  std::vector<std::array<int, 4>> saddles;  // two segments sharing a cell
  for (int j = 0; j + 1 < g; ++j) {
    for (int i = 0; i + 1 < g; ++i) {
      const int bottom = grid.hedge(i, j), top = grid.hedge(i, j + 1);
      const int left = grid.vedge(i, j), right = grid.vedge(i + 1, j);
      std::array<int, 4> cand{bottom, right, top, left};
      std::vector<int> hit;
      for (int e : cand)
        if (crossed[e]) hit.push_back(e);
      if (hit.size() == 2) {
        link(hit[0], hit[1]);
      } else if (hit.size() == 4) {
        const double center = f(grid.s(i) + 0.5 * grid.hs, grid.l(j) + 0.5 * grid.hl);
        if ((center >= 0.0) == grid.pos(i, j)) {
          link(bottom, right);
          link(top, left);
          saddles.push_back({bottom, right, top, left});
        } else {
          link(left, bottom);
          link(right, top);
          saddles.push_back({left, bottom, right, top});
        }
      }
    }
  }

  std::vector<int> chain_of(grid.edge_count(), -1);
  auto walk = [&](int start) {
    std::vector<int> chain{start};
    chain_of[start] = static_cast<int>(out.chains.size());
    int prev = -1, cur = start;
    for (;;) {
      int next = -1;
      for (int cand : adj[cur])
        if (cand >= 0 && cand != prev && chain_of[cand] < 0) {
          next = cand;
          break;
        }
      if (next < 0) break;
      chain_of[next] = chain_of[start];
      chain.push_back(next);
      prev = cur;
      cur = next;
    }
    const bool closed = chain.size() > 2 && (adj[cur][0] == start || adj[cur][1] == start);
    out.chains.push_back(std::move(chain));
    out.closed.push_back(closed);
  };
  for (int e : edges)
    if (chain_of[e] < 0 && (adj[e][0] < 0) != (adj[e][1] < 0)) walk(e);
  for (int e : edges)
    if (chain_of[e] < 0) walk(e);

  for (const auto& s : saddles)
    if (chain_of[s[0]] != chain_of[s[2]]) out.conflict = true;
  return out;
}

// Regular Newton on (s, lambda, x) for (L + sN - lambda C) x = 0, |x| = 1,
// with minimum-norm updates.
std::optional<PlanePoint> newton_eigenpair(const DetField& f, double s, double lambda) {
  Eigen::JacobiSVD<Matrix> svd(f.at(s, lambda), Eigen::ComputeFullV);
  Vector x = svd.matrixV().col(svd.matrixV().cols() - 1);
  const int n = static_cast<int>(x.size());
  for (int it = 0; it < 60; ++it) {
    const Matrix a = f.at(s, lambda);
    Vector r(n + 1);
    r.head(n) = a * x;
    r(n) = 0.5 * (x.squaredNorm() - 1.0);
    if (!r.allFinite()) return std::nullopt;
    if (r.norm() <= 1e-14 * f.scale(s, lambda)) return PlanePoint{s, lambda};
    Matrix j = Matrix::Zero(n + 1, n + 2);
    j.block(0, 0, n, 1) = f.N() * x;
    j.block(0, 1, n, 1) = -(f.C() * x);
    j.block(0, 2, n, n) = a;
    j.block(n, 2, 1, n) = x.transpose();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(j);
    cod.setThreshold(1e-10);
    const Vector dy = cod.solve(-r);
    s += dy(0);
    lambda += dy(1);
    x += dy.tail(n);
  }
  return std::nullopt;
}

// True when eigenpair_det keeps one sign on a (4m) x (4m) lattice over the
// square of half-width `half` around p.
bool sign_constant_near(const DetField& f, PlanePoint p, double hs, double hl, int m) {
  const int count = 4 * m;
  int sign = 0;
  for (int b = 0; b <= count; ++b) {
    for (int a = 0; a <= count; ++a) {
      const double s = p[0] + hs * (2.0 * a / count - 1.0);
      const double l = p[1] + hl * (2.0 * b / count - 1.0);
      const double v = f(s, l);
      if (std::abs(v) <= 1e-300) continue;
      const int sv = v > 0 ? 1 : -1;
      if (sign == 0) sign = sv;
      else if (sv != sign) return false;
    }
  }
  return true;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::vector<EigenpairComponent> assemble(const DetField& f, const Grid& grid, const Contours& contours) {
  std::vector<EigenpairComponent> curves;
  std::vector<std::pair<double, std::vector<PlanePoint>>> lines;  // (lambda, samples)
  auto add_line = [&](double lambda, std::vector<PlanePoint> pts) {
    for (auto& [l, samples] : lines) {
      if (std::abs(l - lambda) <= kLineTol * (1.0 + std::abs(lambda))) {
        samples.insert(samples.end(), pts.begin(), pts.end());
        return;
      }
    }
    lines.emplace_back(lambda, std::move(pts));
  };

  for (std::size_t c = 0; c < contours.chains.size(); ++c) {
    std::vector<PlanePoint> pts;
    for (int e : contours.chains[c]) pts.push_back(contours.crossing[e]);
    if (contours.closed[c]) {
      EigenpairComponent comp{ComponentKind::ClosedCurve, std::move(pts), std::nullopt};
      try {
        comp.conic_fit = fit_conic(comp);
      } catch (const Error&) {
      }
      curves.push_back(std::move(comp));
      continue;
    }
    std::vector<double> ls;
    for (const auto& p : pts) ls.push_back(p[1]);
    const double med = median(ls);
    const auto near = std::count_if(ls.begin(), ls.end(), [&](double l) {
      return std::abs(l - med) <= kLineTol * (1.0 + std::abs(med));
    });
    if (pts.size() >= 2 && static_cast<double>(near) >= 0.95 * static_cast<double>(pts.size())) {
      add_line(med, std::move(pts));
    } else {
      curves.push_back({ComponentKind::OpenCurve, std::move(pts), std::nullopt});
    }
  }

  // Grid rows on which the determinant vanishes identically.
  std::vector<char> zero_row(grid.g, 0);
  for (int j = 0; j < grid.g; ++j) {
    int zeros = 0;
    for (int i = 0; i < grid.g; ++i)
      if (std::abs(grid.at(i, j)) <= kZeroRowTol) ++zeros;
    if (zeros >= 0.95 * grid.g) {
      zero_row[j] = 1;
      std::vector<PlanePoint> pts;
      for (int i = 0; i < grid.g; ++i) pts.push_back({grid.s(i), grid.l(j)});
      add_line(grid.l(j), std::move(pts));
    }
  }

  // Isolated zeros: local minima of |d| away from every sign change.
  std::vector<PlanePoint> isolated;
  const double reach = 3.0 * std::max(grid.hs, grid.hl);
  for (int j = 1; j + 1 < grid.g; ++j) {
    if (zero_row[j] || zero_row[j - 1] || zero_row[j + 1]) continue;
    for (int i = 1; i + 1 < grid.g; ++i) {
      const double v = std::abs(grid.at(i, j));
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1; ++di)
          if ((di || dj) && std::abs(grid.at(i + di, j + dj)) < v) {
            is_min = false;
            break;
          }
      if (!is_min) continue;
      bool near_crossing = false;
      for (int dj = -2; dj <= 2; ++dj)
        for (int di = -2; di <= 2; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < grid.g && jj < grid.g && grid.pos(ii, jj) != grid.pos(i, j))
            near_crossing = true;
        }
      if (near_crossing) continue;
      const auto p = newton_eigenpair(f, grid.s(i), grid.l(j));
      if (!p) continue;
      if (std::hypot((*p)[0] - grid.s(i), (*p)[1] - grid.l(j)) > reach) continue;
      if ((*p)[0] < grid.w.s_lo || (*p)[0] > grid.w.s_hi || (*p)[1] < grid.w.lambda_lo ||
          (*p)[1] > grid.w.lambda_hi)
        continue;
      bool dup = false;
      for (const auto& q : isolated)
        if (std::hypot(q[0] - (*p)[0], q[1] - (*p)[1]) <= 1e-6) dup = true;
      if (dup) continue;
      if (!sign_constant_near(f, *p, 1.5 * grid.hs, 1.5 * grid.hl, 3)) continue;
      if (!sign_constant_near(f, *p, 0.375 * grid.hs, 0.375 * grid.hl, 3)) continue;
      isolated.push_back(*p);
    }
  }

  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EigenpairComponent> out = std::move(curves);
  for (auto& [l, pts] : lines) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    out.push_back({ComponentKind::Line, std::move(pts), std::nullopt});
  }
  for (const auto& p : isolated) out.push_back({ComponentKind::IsolatedPoint, {p}, std::nullopt});
  return out;
}

}  // namespace

const char* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::Line: return "line";
    case ComponentKind::ClosedCurve: return "closed_curve";
    case ComponentKind::OpenCurve: return "open_curve";
    case ComponentKind::IsolatedPoint: return "isolated_point";
  }
  return "?";
}

double eigenpair_det(const PerturbedProblem& problem, double s, double lambda) {
  return DetField(problem)(s, lambda);
}

std::vector<EigenpairComponent> trace_components(const PerturbedProblem& problem, PlaneWindow window,
                                                 const MapSettings& settings) {
  if (!(window.s_lo < window.s_hi) || !(window.lambda_lo < window.lambda_hi) ||
      !std::isfinite(window.s_lo) || !std::isfinite(window.s_hi) || !std::isfinite(window.lambda_lo) ||
      !std::isfinite(window.lambda_hi))
    throw Error(ErrorKind::InvalidInput, "trace_components: empty or non-finite window");
  if (settings.grid < 8) throw Error(ErrorKind::InvalidInput, "trace_components: grid must be at least 8");
  const DetField f(problem);
  int g = settings.grid;
  for (int attempt = 0;; ++attempt, g *= 2) {
    const Grid grid = evaluate_grid(f, window, g, settings.threads);
    const Contours contours = march(f, grid, settings.threads);
    if (!contours.conflict) return assemble(f, grid, contours);
    if (attempt >= settings.max_refinements) {
      std::ostringstream os;
      os << "trace_components: two components share a cell at grid " << g;
      throw Error(ErrorKind::ResolutionError, os.str());
    }
  }
}

ConicFit fit_conic(const EigenpairComponent& component) {
  if (component.kind != ComponentKind::ClosedCurve)
    throw Error(ErrorKind::FitError, "fit_conic: component is not a closed curve");
  const auto& pts = component.samples;
  if (pts.size() < 20) throw Error(ErrorKind::FitError, "fit_conic: fewer than 20 samples");

  // Fit in centred, scaled coordinates; axis alignment is preserved.
  double ms = 0, ml = 0;
  for (const auto& p : pts) {
    ms += p[0];
    ml += p[1];
  }
  ms /= pts.size();
  ml /= pts.size();
  double ss = 0, sl = 0;
  for (const auto& p : pts) {
    ss = std::max(ss, std::abs(p[0] - ms));
    sl = std::max(sl, std::abs(p[1] - ml));
  }
  if (ss <= 0 || sl <= 0) throw Error(ErrorKind::FitError, "fit_conic: samples are collinear");

  Matrix a(pts.size(), 5);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    const double u = (pts[r][0] - ms) / ss, v = (pts[r][1] - ml) / sl;
    a.row(r) << u * u, v * v, u, v, 1.0;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(3) <= 1e-10 * sv(0)) throw Error(ErrorKind::FitError, "fit_conic: rank-deficient design matrix");
  const Vector c = svd.matrixV().col(4);
  const double ca = c(0), cb = c(1), cd = c(2), ce = c(3), cf = c(4);
  if (!(ca * cb > 0)) throw Error(ErrorKind::FitError, "fit_conic: samples do not lie on an ellipse");
  const double u0 = -cd / (2 * ca), v0 = -ce / (2 * cb);
  const double gval = ca * u0 * u0 + cb * v0 * v0 - cf;
  if (!(gval / ca > 0)) throw Error(ErrorKind::FitError, "fit_conic: imaginary ellipse");

  ConicFit fit;
  fit.s0 = ms + ss * u0;
  fit.lambda0 = ml + sl * v0;
  fit.a_s = ss * std::sqrt(gval / ca);
  fit.a_lambda = sl * std::sqrt(gval / cb);
  for (const auto& p : pts) {
    const double ds = (p[0] - fit.s0) / fit.a_s, dl = (p[1] - fit.lambda0) / fit.a_lambda;
    fit.residual = std::max(fit.residual, std::abs(ds * ds + dl * dl - 1.0));
  }
  return fit;
}

}  // namespace spherebranch
