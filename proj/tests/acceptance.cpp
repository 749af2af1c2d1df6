// Acceptance suite: one PASS/FAIL line per criterion. With an argument N only
// criterion N runs; exit status is nonzero if any executed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "random_pencils.hpp"
#include "spherebranch/continuation.hpp"
#include "spherebranch/degree.hpp"
#include "spherebranch/eigenpair_map.hpp"
#include "spherebranch/error.hpp"
#include "spherebranch/orientation.hpp"

using namespace spherebranch;

namespace {

constexpr int kN = 16;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << what << "; ";
    }
  }
};

Vector unit(int n, int i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

double dist_pm(const Vector& a, const Vector& b) { return std::min((a - b).norm(), (a + b).norm()); }

std::vector<double> cuts_of(const std::vector<EigenvalueInfo>& spec) {
  std::vector<double> cuts{spec.front().lambda - 0.5};
  for (std::size_t i = 0; i + 1 < spec.size(); ++i) cuts.push_back(0.5 * (spec[i].lambda + spec[i + 1].lambda));
  cuts.push_back(spec.back().lambda + 0.5);
  return cuts;
}

void spectrum(Outcome& o) {
  for (int k = 1; k <= 3; ++k) {
    const auto spec = pencil_eigenvalues(example_pencil(k, kN), {-1.0, 10.5});
    std::vector<double> flat;
    for (const auto& e : spec)
      for (int r = 0; r < e.algebraic_mult; ++r) flat.push_back(e.lambda);
    const auto expected = oracle::diag_spectrum(k, kN, -1.0, 10.5);
    o.require(flat.size() == expected.size(), "k=" + std::to_string(k) + " wrong count");
    if (flat.size() != expected.size()) continue;
    double err = 0;
    for (std::size_t i = 0; i < flat.size(); ++i) err = std::max(err, std::abs(flat[i] - expected[i]));
    o.require(err <= 1e-9, "k=" + std::to_string(k) + " error " + std::to_string(err));
    o.require(spec.front().geometric_mult == k, "k=" + std::to_string(k) + " multiplicity of 0");
    o.detail << "k=" << k << ": " << spec.size() << " distinct, max err " << err << "; ";
  }
}

void certificates(Outcome& o) {
  for (int k = 1; k <= 3; ++k) {
    const auto c = certify(example_pencil(k, kN), 0.0);
    o.require(c.h3_holds, "h3 fails for k=" + std::to_string(k));
    o.require(c.h2_odd == (k != 2), "h2_odd wrong for k=" + std::to_string(k));
    o.detail << "k=" << k << " h2_odd=" << c.h2_odd << " h3=" << c.h3_holds << "; ";
  }
}

void check_fit(Outcome& o, const std::string& label, const std::vector<EigenpairComponent>& comps,
               double lambda0, double a_s, double a_l) {
  const EigenpairComponent* best = nullptr;
  for (const auto& c : comps)
    if (c.kind == ComponentKind::ClosedCurve && c.conic_fit &&
        (!best || std::abs(c.conic_fit->lambda0 - lambda0) < std::abs(best->conic_fit->lambda0 - lambda0)))
      best = &c;
  if (!best) {
    o.require(false, label + ": no closed curve");
    return;
  }
  const auto& f = *best->conic_fit;
  const bool ok = std::abs(f.s0) <= 1e-4 && std::abs(f.lambda0 - lambda0) <= 1e-4 && std::abs(f.a_s - a_s) <= 1e-4 &&
                  std::abs(f.a_lambda - a_l) <= 1e-4 && f.residual <= 1e-8;
  o.require(ok, label + " fit off");
  o.detail << label << " center (" << f.s0 << "," << f.lambda0 << ") axes (" << f.a_s << "," << f.a_lambda
           << ") res " << f.residual << "; ";
}

void ellipses(Outcome& o) {
  const auto k3 = trace_components(example_problem(3, kN), {-1, 1, -1, 8});
  check_fit(o, "k3", k3, 2.0, 1 / std::sqrt(3.0), 2.0);
  const auto k2 = trace_components(example_problem(2, kN), {-0.5, 0.5, 2.5, 4.5});
  check_fit(o, "k2", k2, 3.5, 1 / std::sqrt(48.0), 0.5);
  const auto k1 = trace_components(example_problem(1, kN), {-1, 1, -0.5, 4.5});
  check_fit(o, "k1 lower", k1, 1.0, 1 / std::sqrt(2.0), 1.0);
  check_fit(o, "k1 upper", k1, 3.5, 1 / std::sqrt(48.0), 0.5);
}

void isolated(Outcome& o) {
  const auto comps = trace_components(example_problem(2, kN), {-0.3, 0.3, -0.5, 0.5});
  o.require(comps.size() == 1, std::to_string(comps.size()) + " components");
  if (comps.size() != 1) return;
  o.require(comps[0].kind == ComponentKind::IsolatedPoint, std::string("kind ") + to_string(comps[0].kind));
  const auto p = comps[0].samples.front();
  o.require(std::hypot(p[0], p[1]) <= 1e-8, "point off the origin");
  o.detail << "isolated point at (" << p[0] << "," << p[1] << ")";
}

void endpoints(Outcome& o) {
  const auto prob = example_problem(3, kN);
  const auto v = classify_component(prob, {0.0, 0.0, unit(kN, 2), 0.0}, 10.0);
  o.require(v.verdict == Verdict::TrivialReturn, std::string("verdict ") + to_string(v.verdict));
  if (v.verdict == Verdict::TrivialReturn) {
    o.require(std::abs(v.lambda_second - 4.0) <= 1e-6, "lambda_second " + std::to_string(v.lambda_second));
    o.require(dist_pm(v.x_second, unit(kN, 3)) <= 1e-6, "x_second is not +/- e4");
    o.detail << "TrivialReturn at lambda=" << v.lambda_second << ", |x - (+/-e4)|=" << dist_pm(v.x_second, unit(kN, 3))
             << "; ";
  }
  const auto pts = detect_bifurcation_points(prob, 0.0);
  o.require(pts.size() == 2, std::to_string(pts.size()) + " bifurcation points");
  bool plus = false, minus = false;
  for (const auto& x : pts) {
    plus = plus || (x - unit(kN, 2)).norm() <= 1e-4;
    minus = minus || (x + unit(kN, 2)).norm() <= 1e-4;
  }
  o.require(plus && minus, "bifurcation points are not +/- e3");
  o.detail << "bifurcation points: " << pts.size();
}

void unbounded(Outcome& o) {
  const auto prob = example_problem(3, kN);
  for (int lam : {5, 6}) {
    const auto v = classify_component(prob, {0.0, double(lam), unit(kN, lam - 1), 0.0}, 10.0);
    o.require(v.verdict == Verdict::Unbounded, "lambda=" + std::to_string(lam) + " verdict " + to_string(v.verdict));
    double worst = 0;
    for (const auto& b : v.branches)
      for (const auto& p : b.points) worst = std::max(worst, dist_pm(p.x, unit(kN, lam - 1)));
    o.require(worst <= 1e-8, "lambda=" + std::to_string(lam) + " x drift " + std::to_string(worst));
    o.detail << "lambda=" << lam << " " << to_string(v.verdict) << " max |x -+ e| " << worst << "; ";
  }
}

void twin_signs(Outcome& o) {
  int checked = 0, violations = 0;
  auto check_pencil = [&](const Pencil& p, Window w) {
    for (const auto& e : pencil_eigenvalues(p, w)) {
      if (e.geometric_mult != 1 || e.algebraic_mult != 1) continue;
      const Vector x = e.kernel_basis.col(0);
      if (simple_eigenpoint_sign(p, e.lambda, x) != simple_eigenpoint_sign(p, e.lambda, -x)) ++violations;
      ++checked;
    }
  };
  for (int k = 1; k <= 3; ++k) check_pencil(example_pencil(k, kN), {-1.0, kN + 0.5});
  std::mt19937_64 rng(20240607);
  for (int t = 0; t < 20; ++t) check_pencil(random_symmetric_pencil(2 + t % 7, rng), {-100, 100});
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.require(checked > 50, "too few eigenpoints checked");
  o.detail << checked << " twin pairs, " << violations << " violations";
}

void parity(Outcome& o) {
  for (int k = 1; k <= 3; ++k) {
    const Pencil p = example_pencil(k, kN);
    const Window w{-0.5, 0.5 * (k + 1)};
    const auto c = eigenset_contribution(p, 0.0, w);
    ContributionOptions half;
    half.epsilon = c.epsilon > 0 ? c.epsilon / 2 : 0.05;
    half.force_epsilon = true;
    const auto h = eigenset_contribution(p, 0.0, w, {}, half);
    const bool shape = k == 2 ? c.value == 0 : (c.value != 0 && ((c.value % 4) + 4) % 4 == 2);
    o.require(shape, "k=" + std::to_string(k) + " value " + std::to_string(c.value));
    o.require(c.value == c.value_half_epsilon && c.value == h.value && h.value == h.value_half_epsilon,
              "k=" + std::to_string(k) + " unstable under halving");
    o.detail << "k=" << k << " value " << c.value << " (" << to_string(c.method) << ", halves " << h.value << "); ";
  }
}

void compact_consistency(Outcome& o) {
  for (int k = 1; k <= 3; ++k) {
    const auto prob = example_problem(k, kN);
    const int contribution = eigenset_contribution(prob.pencil, 0.0, {-0.5, 0.5 * (k + 1)}).value;
    Window at0{-1e-9, 1e-9};
    bool any_isolated = false, all_isolated = true;
    for (const auto& a : find_trivial_solutions(prob, at0, 2)) {
      const auto v = classify_component(prob, a, 10.0);
      any_isolated = any_isolated || v.verdict == Verdict::IsolatedCompact;
      all_isolated = all_isolated && v.verdict == Verdict::IsolatedCompact;
    }
    if (k == 2) {
      o.require(all_isolated && contribution == 0, "k=2 verdict/contribution mismatch");
    } else {
      o.require(!any_isolated, "k=" + std::to_string(k) + " has an IsolatedCompact anchor");
    }
    o.detail << "k=" << k << " contribution " << contribution << (any_isolated ? " IsolatedCompact" : " not isolated")
             << "; ";
  }
}

void ls_jump(Outcome& o) {
  for (int k = 1; k <= 3; ++k) {
    const Pencil p = example_pencil(k, kN);
    const int lo = ls_sign(p, 1.0, -0.25), hi = ls_sign(p, 1.0, 0.25);
    o.require(lo == oracle::diag_ls_sign(k, kN, 1.0, -0.25) && hi == oracle::diag_ls_sign(k, kN, 1.0, 0.25),
              "k=" + std::to_string(k) + " differs from the oracle");
    o.require((lo != hi) == (k != 2), "k=" + std::to_string(k) + " jump wrong");
    o.detail << "k=" << k << " (" << lo << "," << hi << "); ";
  }
}

void conjecture(Outcome& o) {
  int intervals = 0, disagree = 0;
  for (int k = 1; k <= 3; ++k) {
    const Pencil p = example_pencil(k, kN);
    const auto cuts = cuts_of(pencil_eigenvalues(p, {-1.0, 10.5}));
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      for (std::size_t j = i + 1; j < cuts.size(); ++j) {
        const auto r = conjecture_check(p, cuts[i], cuts[j]);
        ++intervals;
        if (!r.agree) {
          ++disagree;
          o.detail << "DISAGREE k=" << k << " (" << cuts[i] << "," << cuts[j] << ") deg=" << r.report.value
                   << " ls=(" << r.report.ls_sign_alpha << "," << r.report.ls_sign_beta << ") method "
                   << to_string(r.report.method) << "; ";
        }
      }
    }
  }
  o.require(disagree == 0, std::to_string(disagree) + " disagreements");
  o.detail << intervals << " intervals, " << disagree << " disagreements";
}

Matrix random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = g(rng);
  return a;
}

void properties(Outcome& o) {
  std::mt19937_64 rng(12);
  // Additivity and excision.
  int add_fail = 0, add_checked = 0;
  std::vector<Pencil> pencils{example_pencil(1, 12), example_pencil(2, 12), example_pencil(3, 12)};
  for (int t = 0; t < 12; ++t) pencils.push_back(random_symmetric_pencil(2 + t % 7, rng));
  for (const auto& p : pencils) {
    const auto spec = pencil_eigenvalues(p, {-100, 100});
    if (spec.size() < 2) continue;
    const auto cuts = cuts_of(spec);
    int sum = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const int piece = degree_on_interval(p, cuts[i], cuts[i + 1]).value;
      sum += piece;
      const double lo = 0.5 * (cuts[i] + spec[i].lambda), hi = 0.5 * (spec[i].lambda + cuts[i + 1]);
      if (degree_on_interval(p, lo, hi).value != piece) ++add_fail;
      if (degree_on_interval(p, cuts[i], lo).value != 0) ++add_fail;
    }
    if (degree_on_interval(p, cuts.front(), cuts.back()).value != sum) ++add_fail;
    ++add_checked;
  }
  o.require(add_fail == 0, std::to_string(add_fail) + " additivity/excision failures");

  // Two-class companion partition.
  int part_fail = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = 3 + t % 4;
    Matrix tm = random_matrix(n, rng);
    tm.col(0).setZero();
    std::vector<Matrix> ks;
    while (ks.size() < 6) {
      Matrix k = random_matrix(n, rng);
      if (is_companion(tm, k)) ks.push_back(k);
    }
    for (std::size_t i = 0; i < ks.size(); ++i)
      for (std::size_t j = 0; j < ks.size(); ++j)
        for (std::size_t l = 0; l < ks.size(); ++l) {
          const bool ij = companions_equivalent(tm, ks[i], ks[j]), jl = companions_equivalent(tm, ks[j], ks[l]);
          const bool il = companions_equivalent(tm, ks[i], ks[l]);
          // Two classes: equivalence is transitive and non-equivalence composes to equivalence.
          if ((ij && jl && !il) || (!ij && !jl && !il)) ++part_fail;
        }
  }
  o.require(part_fail == 0, std::to_string(part_fail) + " partition failures");

  // Oriented composition multiplies signs.
  int comp_fail = 0, comp_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 5;
    const Matrix t1 = random_matrix(n, rng), t2 = random_matrix(n, rng);
    const Matrix k1 = random_matrix(n, rng), k2 = random_matrix(n, rng);
    if (!is_companion(t1, k1) || !is_companion(t2, k2)) continue;
    const OrientedOperator a(t1, k1), b(t2, k2);
    if (operator_sign(compose(a, b)) != operator_sign(a) * operator_sign(b)) ++comp_fail;
    ++comp_checked;
  }
  o.require(comp_fail == 0, std::to_string(comp_fail) + " composition failures");

  // Derivative against finite differences.
  const double fd = derivative_fd_error(build_paper_N(kN), rng);
  auto map = [](const Vector& x) {
    Vector y = Vector::Zero(x.size());
    y(0) = x(1) * x(1) * x(2);
    y(2) = std::sin(x(0));
    return y;
  };
  auto jac = [](const Vector& x) {
    Matrix j = Matrix::Zero(x.size(), x.size());
    j(0, 1) = 2 * x(1) * x(2);
    j(0, 2) = x(1) * x(1);
    j(2, 0) = std::cos(x(0));
    return j;
  };
  const double fd_nl = derivative_fd_error(Perturbation::nonlinear(6, map, jac), rng);
  o.require(fd <= 1e-6 && fd_nl <= 1e-6, "finite-difference mismatch");
  o.detail << add_checked << " pencils additive, " << comp_checked << " compositions, fd err " << fd << "/" << fd_nl;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"spectrum reproduction", spectrum},
      {"hypothesis certificates", certificates},
      {"eigenpair ellipses", ellipses},
      {"isolated eigenpair", isolated},
      {"branch endpoints and bifurcation points", endpoints},
      {"unbounded horizontal lines", unbounded},
      {"twin-sign equality", twin_signs},
      {"parity of the eigenset contribution", parity},
      {"degree and branch consistency", compact_consistency},
      {"LS-sign jump", ls_jump},
      {"conjecture sweep", conjecture},
      {"property suites", properties},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  bool all_pass = true;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome o;
    const auto c0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - c0;
    std::printf("criterion %2zu %-42s %s  (%.2fs)  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                dt.count(), o.detail.str().c_str());
    all_pass = all_pass && o.pass;
  }
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - t0;
  std::printf("total %.2fs: %s\n", total.count(), all_pass ? "PASS" : "FAIL");
  return all_pass ? 0 : 1;
}
