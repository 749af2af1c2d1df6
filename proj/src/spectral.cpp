#include "spherebranch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

Eigen::VectorXcd resolvent_spectrum(const Pencil& pencil, double lambda_hat) {
  const Matrix shifted = pencil.at(lambda_hat);
  const Matrix m = shifted.partialPivLu().solve(pencil.C());
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::PencilDegenerate, "resolvent eigenvalue iteration failed");
  return es.eigenvalues();
}

// One Newton step on sigma_min using the singular vectors of L - lambda C:
// d/dlambda (u^T (L - lambda C) v) = -u^T C v.
double polish_simple(const Pencil& pencil, double lambda) {
  for (int it = 0; it < 3; ++it) {
    Eigen::JacobiSVD<Matrix> svd(pencil.at(lambda), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Index last = pencil.dim() - 1;
    const Vector u = svd.matrixU().col(last);
    const Vector v = svd.matrixV().col(last);
    const double denom = u.dot(pencil.C() * v);
    if (std::abs(denom) < 1e-14) break;
    const double step = u.dot(pencil.at(lambda) * v) / denom;
    if (!std::isfinite(step) || std::abs(step) > 1e-6 * (1.0 + std::abs(lambda))) break;
    lambda += step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(lambda))) break;
  }
  return lambda;
}

}  // namespace

double rank_tolerance(const Pencil& pencil, double lambda) {
  return kRankRelTol * std::max(pencil.scale(lambda), 1e-300);
}

bool is_eigenvalue(const Pencil& pencil, double lambda) {
  return linalg::smallest_singular_value(pencil.at(lambda)) <= rank_tolerance(pencil, lambda);
}

double choose_resolvent_point(const Pencil& pencil, Window window) {
  constexpr int kSamples = 97;
  double best = pencil.regular_point();
  double best_sigma = linalg::smallest_singular_value(pencil.at(best)) / std::max(1.0, pencil.scale(best));
  const double width = window.hi - window.lo;
  for (int i = 0; i < kSamples; ++i) {
    // Irrational-ish interior offsets keep samples off rational eigenvalues.
    const double t = (i + 0.5 + 0.1234567 * ((i % 3) - 1)) / kSamples;
    const double lambda = window.lo + t * width;
    const double sigma =
        linalg::smallest_singular_value(pencil.at(lambda)) / std::max(1.0, pencil.scale(lambda));
    if (sigma > best_sigma) {
      best_sigma = sigma;
      best = lambda;
    }
  }
  if (!(best_sigma > 0.0))
    throw Error(ErrorKind::PencilDegenerate, "no regular point found for the resolvent");
  return best;
}

Matrix kernel_basis(const Pencil& pencil, double lambda) {
  return linalg::null_space(pencil.at(lambda), rank_tolerance(pencil, lambda));
}

int algebraic_multiplicity(const Pencil& pencil, double lambda, double lambda_hat) {
  const Eigen::VectorXcd mu = resolvent_spectrum(pencil, lambda_hat);
  const std::complex<double> target(1.0 / (lambda - lambda_hat), 0.0);
  const double radius = kClusterRadius * std::max(1.0, std::abs(target));
  int count = 0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (std::abs(mu(i) - target) <= radius) ++count;
  return count;
}

std::vector<EigenvalueInfo> pencil_eigenvalues(const Pencil& pencil, Window window) {
  if (!(window.lo < window.hi)) throw Error(ErrorKind::InvalidInput, "eigenvalue window is empty");
  const double lambda_hat = choose_resolvent_point(pencil, window);
  const Eigen::VectorXcd mu = resolvent_spectrum(pencil, lambda_hat);

  // Map resolvent eigenvalues back to pencil eigenvalues and cluster them.
  std::vector<std::complex<double>> candidates;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (std::abs(mu(i)) < 1e-14) continue;  // eigenvalue at infinity
    candidates.push_back(lambda_hat + 1.0 / mu(i));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](auto a, auto b) { return a.real() < b.real(); });

  std::vector<std::vector<std::complex<double>>> clusters;
  for (const auto& c : candidates) {
    bool placed = false;
    for (auto& cl : clusters) {
      if (std::abs(cl.front() - c) <= kClusterRadius * (1.0 + std::abs(c))) {
        cl.push_back(c);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({c});
  }

  const double edge = 1e-9 * (1.0 + std::max(std::abs(window.lo), std::abs(window.hi)));
  std::vector<EigenvalueInfo> out;
  for (const auto& cl : clusters) {
    std::complex<double> mean(0.0, 0.0);
    for (const auto& c : cl) mean += c;
    mean /= static_cast<double>(cl.size());
    if (std::abs(mean.imag()) > kClusterRadius * (1.0 + std::abs(mean))) continue;
    double lambda = mean.real();
    if (lambda < window.lo - edge || lambda > window.hi + edge) continue;

    EigenvalueInfo info;
    info.kernel_basis = kernel_basis(pencil, lambda);
    info.geometric_mult = static_cast<int>(info.kernel_basis.cols());
    if (info.geometric_mult == 0) continue;
    info.algebraic_mult = std::max(info.geometric_mult, static_cast<int>(cl.size()));
    if (info.algebraic_mult == 1) {
      lambda = polish_simple(pencil, lambda);
      info.kernel_basis = kernel_basis(pencil, lambda);
      if (info.kernel_basis.cols() != 1) continue;
    }
    info.lambda = lambda;
    out.push_back(std::move(info));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return out;
}

HypothesisCertificate certify(const Pencil& pencil, double lambda_star) {
  const int n = pencil.dim();
  const Matrix t = pencil.at(lambda_star);
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = rank_tolerance(pencil, lambda_star);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  const int m = n - rank;
  if (m == 0)
    throw Error(ErrorKind::NotAnEigenvalue,
                "certify: " + std::to_string(lambda_star) + " is not an eigenvalue");

  HypothesisCertificate cert;
  cert.lambda_star = lambda_star;
  cert.h1_compact = pencil.compact();
  cert.geometric_mult = m;
  cert.h2_odd = (m % 2) == 1;

  Splitting& sp = cert.splitting;
  sp.g1 = svd.matrixV().leftCols(rank);
  sp.g2 = svd.matrixV().rightCols(m);
  sp.h1 = svd.matrixU().leftCols(rank);
  const Matrix c_kernel = pencil.C() * sp.g2;
  cert.kernel_injectivity = linalg::smallest_singular_value(c_kernel);
  sp.h2 = linalg::orthonormal_span(c_kernel);

  if (sp.h2.cols() == m && cert.kernel_injectivity > kInjectivityTol) {
    cert.h3_residual = linalg::smallest_principal_angle(sp.h1, sp.h2);
  } else {
    cert.h3_residual = 0.0;
  }
  cert.h3_holds = cert.h3_residual > kTransversalityAngle;

  Window around{lambda_star - 1.0, lambda_star + 1.0};
  const double lambda_hat = choose_resolvent_point(pencil, around);
  cert.algebraic_mult = std::max(m, algebraic_multiplicity(pencil, lambda_star, lambda_hat));
  cert.simple = (m == 1) && cert.h3_holds;
  return cert;
}

}  // namespace spherebranch
