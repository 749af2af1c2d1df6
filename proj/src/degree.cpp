#include "spherebranch/degree.hpp"

#include <cmath>
#include <string>

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

constexpr int kMaxHalvings = 40;

void require_regular(const Pencil& pencil, double lambda, ErrorKind kind, const char* what) {
  if (is_eigenvalue(pencil, lambda))
    throw Error(kind, std::string(what) + " " + std::to_string(lambda) + " is an eigenvalue");
}

int twin_sum(const Pencil& pencil, const EigenvalueInfo& info, OrientationConvention conv) {
  const Vector x = info.kernel_basis.col(0).normalized();
  return simple_eigenpoint_sign(pencil, info.lambda, x, conv) +
         simple_eigenpoint_sign(pencil, info.lambda, -x, conv);
}

struct PerturbedOutcome {
  int value = 0;
  std::vector<double> eigenvalues;
};

// Degree of psi through the perturbed family eta^eps. Returns nullopt when
// some perturbed eigenvalue leaves the interval or fails to be simple.
std::optional<PerturbedOutcome> perturbed_degree(const Pencil& pencil, const HypothesisCertificate& cert,
                                                 Window interval, double eps,
                                                 OrientationConvention conv) {
  const int n = pencil.dim();
  const int m = cert.geometric_mult;
  const Splitting& sp = cert.splitting;
  const double lambda_star = cert.lambda_star;

  // G = G1 (+) G2 with the SVD bases; H = Im T (+) C(Ker T) with H2 spanned
  // by C g2 so that the 22-block of C is the identity.
  Matrix v(n, n);
  v << sp.g1, sp.g2;
  Matrix w(n, n);
  w << sp.h1, pencil.C() * sp.g2;

  const Matrix t = pencil.at(lambda_star);
  const Matrix t11 = sp.h1.transpose() * t * sp.g1;  // H1 has orthonormal basis
  Matrix z_coords = Matrix::Zero(n, n);
  z_coords.topLeftCorner(n - m, n - m) = t11.inverse();
  z_coords.bottomRightCorner(m, m) = Matrix::Identity(m, m);

  // Z : H -> G in standard coordinates.
  const Matrix w_inv = w.partialPivLu().inverse();
  const Matrix z = v * z_coords * w_inv;
  const int z_sign = linalg::det_sign(z);
  if (z_sign == 0) throw Error(ErrorKind::NotTransversal, "splitting isomorphism Z is singular");

  // eta^eps_lambda = Z (L - lambda C) + G2-block diag(delta_j).
  Vector delta(m);
  for (int j = 0; j < m; ++j) delta(j) = eps * (j + 1) / (m + 1);
  const Matrix shift = sp.g2 * delta.asDiagonal() * sp.g2.transpose();
  const Pencil eta(z * pencil.L() + shift, z * pencil.C(), pencil.compact());

  const auto spectrum = pencil_eigenvalues(eta, interval);
  if (static_cast<int>(spectrum.size()) != m) return std::nullopt;

  PerturbedOutcome out;
  for (const auto& info : spectrum) {
    if (!(interval.lo < info.lambda && info.lambda < interval.hi)) return std::nullopt;
    const auto c = certify(eta, info.lambda);
    if (!c.simple) return std::nullopt;
    out.value += twin_sum(eta, info, conv);
    out.eigenvalues.push_back(info.lambda);
  }
  out.value *= z_sign;
  return out;
}

int simple_contribution(const Pencil& pencil, double lambda, OrientationConvention conv) {
  EigenvalueInfo info;
  info.lambda = lambda;
  info.kernel_basis = kernel_basis(pencil, lambda);
  info.geometric_mult = 1;
  return twin_sum(pencil, info, conv);
}

}  // namespace

const char* to_string(DegreeMethod m) {
  return m == DegreeMethod::ComputationFormula ? "computation-formula" : "epsilon-perturbation";
}

Matrix tangent_frame(const Vector& x) {
  require_unit(x, "tangent_frame");
  const Eigen::Index n = x.size();
  Eigen::Index pivot = 0;
  x.cwiseAbs().maxCoeff(&pivot);
  // Reflector H = I - 2 w w^T / (w^T w) with H x = -sign(x_p) e_p.
  Vector w = x;
  const double sigma = x(pivot) >= 0 ? 1.0 : -1.0;
  w(pivot) += sigma;
  const Matrix h = Matrix::Identity(n, n) - 2.0 * (w * w.transpose()) / w.squaredNorm();
  Matrix frame(n, n - 1);
  for (Eigen::Index i = 0, c = 0; i < n; ++i)
    if (i != pivot) frame.col(c++) = h.col(i);
  Matrix full(n, n);
  full << x, frame;
  if (linalg::det_sign(full) < 0) frame.col(0) = -frame.col(0);
  return frame;
}

int ls_sign(const Pencil& pencil, double lambda_hat, double lambda) {
  require_regular(pencil, lambda_hat, ErrorKind::SingularArgument, "ls_sign: lambda_hat");
  require_regular(pencil, lambda, ErrorKind::SingularArgument, "ls_sign: lambda");
  const int n = pencil.dim();
  const Matrix zc = pencil.at(lambda_hat).partialPivLu().solve(pencil.C());
  const Matrix field = Matrix::Identity(n, n) - (lambda - lambda_hat) * zc;
  const int sign = linalg::det_sign(field);
  if (sign == 0) throw Error(ErrorKind::SingularArgument, "ls_sign: vector field is singular");
  return sign;
}

int simple_eigenpoint_sign(const Pencil& pencil, double lambda, const Vector& x,
                           OrientationConvention conv) {
  require_unit(x, "simple_eigenpoint_sign");
  const int n = pencil.dim();
  const Matrix t = pencil.at(lambda);
  if ((t * x).norm() > 1e3 * rank_tolerance(pencil, lambda))
    throw Error(ErrorKind::ConstraintViolation, "simple_eigenpoint_sign: (lambda, x) is not an eigenpoint");
  Matrix dpsi(n, n);
  dpsi.col(0) = -(pencil.C() * x);
  dpsi.rightCols(n - 1) = t * tangent_frame(x);
  const int sign = linalg::det_sign(dpsi);
  if (sign == 0)
    throw Error(ErrorKind::DegenerateDifferential,
                "simple_eigenpoint_sign: differential is singular at lambda=" + std::to_string(lambda));
  return sign * conv.global_sign;
}

EigensetContribution eigenset_contribution(const Pencil& pencil, double lambda_star, Window interval,
                                           OrientationConvention conv, ContributionOptions opts) {
  if (!(interval.lo < lambda_star && lambda_star < interval.hi))
    throw Error(ErrorKind::NonIsolatingInterval, "eigenset_contribution: lambda_star outside the interval");
  require_regular(pencil, interval.lo, ErrorKind::EndpointCollision, "eigenset_contribution: alpha");
  require_regular(pencil, interval.hi, ErrorKind::EndpointCollision, "eigenset_contribution: beta");

  const auto spectrum = pencil_eigenvalues(pencil, interval);
  if (spectrum.size() != 1 ||
      std::abs(spectrum.front().lambda - lambda_star) > kClusterRadius * (1.0 + std::abs(lambda_star)))
    throw Error(ErrorKind::NonIsolatingInterval,
                "eigenset_contribution: interval must contain exactly the eigenvalue " +
                    std::to_string(lambda_star));
  const double lambda = spectrum.front().lambda;
  const HypothesisCertificate cert = certify(pencil, lambda);

  EigensetContribution out;
  out.lambda_star = lambda;
  out.geometric_mult = cert.geometric_mult;

  if (cert.simple && !opts.force_epsilon) {
    out.method = DegreeMethod::ComputationFormula;
    out.value = simple_contribution(pencil, lambda, conv);
    out.value_half_epsilon = out.value;
    out.perturbed_eigenvalues = {lambda};
    return out;
  }
  if (!cert.h3_holds)
    throw Error(ErrorKind::NotTransversal,
                "eigenset_contribution: Im T and C(Ker T) intersect at lambda=" + std::to_string(lambda));

  out.method = DegreeMethod::EpsilonPerturbation;
  double eps = opts.epsilon.value_or(std::min(interval.hi - lambda, lambda - interval.lo) / 10.0);
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, eps *= 0.5) {
    auto first = perturbed_degree(pencil, cert, interval, eps, conv);
    if (!first) continue;
    auto second = perturbed_degree(pencil, cert, interval, eps / 2, conv);
    if (!second) continue;
    out.epsilon = eps;
    out.value = first->value;
    out.value_half_epsilon = second->value;
    out.perturbed_eigenvalues = std::move(first->eigenvalues);
    return out;
  }
  throw Error(ErrorKind::EpsilonExhausted,
              "eigenset_contribution: no admissible perturbation after 40 halvings");
}

DegreeReport degree_on_interval(const Pencil& pencil, double alpha, double beta,
                                OrientationConvention conv, DegreeOptions opts) {
  if (!(alpha < beta)) throw Error(ErrorKind::InvalidInput, "degree_on_interval: need alpha < beta");
  require_regular(pencil, alpha, ErrorKind::EndpointCollision, "degree_on_interval: alpha");
  require_regular(pencil, beta, ErrorKind::EndpointCollision, "degree_on_interval: beta");

  DegreeReport report;
  report.interval = {alpha, beta};
  report.lambda_hat = opts.lambda_hat.value_or(choose_resolvent_point(pencil, {alpha, beta}));
  report.ls_sign_alpha = ls_sign(pencil, report.lambda_hat, alpha);
  report.ls_sign_beta = ls_sign(pencil, report.lambda_hat, beta);

  const auto spectrum = pencil_eigenvalues(pencil, {alpha, beta});
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const double lo = i == 0 ? alpha : 0.5 * (spectrum[i - 1].lambda + spectrum[i].lambda);
    const double hi = i + 1 == spectrum.size() ? beta : 0.5 * (spectrum[i].lambda + spectrum[i + 1].lambda);
    ContributionOptions copts;
    copts.epsilon = opts.epsilon;
    auto c = eigenset_contribution(pencil, spectrum[i].lambda, {lo, hi}, conv, copts);
    report.value += c.value;
    if (c.method == DegreeMethod::EpsilonPerturbation) report.method = DegreeMethod::EpsilonPerturbation;
    report.eigensets.push_back(std::move(c));
  }
  return report;
}

ConjectureRecord conjecture_check(const Pencil& pencil, double alpha, double beta,
                                  OrientationConvention conv, DegreeOptions opts) {
  ConjectureRecord rec;
  rec.report = degree_on_interval(pencil, alpha, beta, conv, opts);
  rec.deg_nonzero = rec.report.value != 0;
  rec.endpoint_signs_differ = rec.report.ls_sign_alpha != rec.report.ls_sign_beta;
  rec.agree = rec.deg_nonzero == rec.endpoint_signs_differ;
  return rec;
}

}  // namespace spherebranch
