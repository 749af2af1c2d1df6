#include "spherebranch/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "spherebranch/continuation.hpp"
#include "spherebranch/degree.hpp"
#include "spherebranch/error.hpp"
#include "spherebranch/log.hpp"
#include "spherebranch/problem_json.hpp"
#include "spherebranch/report.hpp"

namespace spherebranch {

namespace {

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Stopwatch {
 public:
  explicit Stopwatch(Json& sink) : sink_(sink) {}
  template <class Fn>
  auto time(const std::string& stage, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    log(LogLevel::Info, "stage " + stage);
    auto result = fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    sink_[stage] = dt.count();
    log(LogLevel::Debug, "stage " + stage + " took " + std::to_string(dt.count()) + " s");
    return result;
  }

 private:
  Json& sink_;
};

std::string csv_of(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

Json window_json(Window w) { return {w.lo, w.hi}; }
Json plane_json(PlaneWindow w) { return {w.s_lo, w.s_hi, w.lambda_lo, w.lambda_hi}; }

Json perturbation_checks(const PerturbedProblem& problem, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Json j;
  if (problem.perturbation.linear_matrix()) j["linear_consistency_error"] = linear_consistency_error(problem.perturbation, rng);
  j["derivative_fd_error"] = derivative_fd_error(problem.perturbation, rng);
  return j;
}

Json run_certify(const PerturbedProblem& problem, const SpectralParams& p) {
  Json certs = Json::array();
  if (p.lambda) {
    certs.push_back(to_json(certify(problem.pencil, *p.lambda)));
  } else {
    for (const auto& e : pencil_eigenvalues(problem.pencil, p.window))
      certs.push_back(to_json(certify(problem.pencil, e.lambda)));
  }
  return {{"window", window_json(p.window)}, {"certificates", certs}};
}

std::vector<EigenvalueInfo> spectrum_of(const PerturbedProblem& problem, Window w) {
  if (!(w.lo < w.hi)) throw Error(ErrorKind::InvalidInput, "spectrum window must satisfy lo < hi");
  return pencil_eigenvalues(problem.pencil, w);
}

Json spectrum_json(const std::vector<EigenvalueInfo>& spec) {
  Json a = Json::array();
  for (const auto& e : spec)
    a.push_back({{"lambda", e.lambda}, {"geometric_mult", e.geometric_mult}, {"algebraic_mult", e.algebraic_mult}});
  return a;
}

SolutionPoint pick_anchor(const PerturbedProblem& problem, const TraceParams& p) {
  double lambda = 0.0;
  if (p.anchor_lambda) {
    lambda = *p.anchor_lambda;
  } else {
    const auto spec = spectrum_of(problem, p.search);
    if (spec.empty()) throw Error(ErrorKind::NotAnEigenvalue, "trace: no eigenvalue in the search window");
    lambda = spec.front().lambda;
  }
  const double r = 1e-6 * (1.0 + std::abs(lambda));
  const auto anchors = find_trivial_solutions(problem, {lambda - r, lambda + r});
  if (anchors.empty())
    throw Error(ErrorKind::InvalidInput, "--anchor-lambda " + format_number(lambda) + " is not an eigenvalue");
  if (p.anchor_index < 0 || static_cast<std::size_t>(p.anchor_index) >= anchors.size())
    throw Error(ErrorKind::InvalidInput, "--anchor-index out of range (have " + std::to_string(anchors.size()) +
                                             " anchors)");
  return anchors[static_cast<std::size_t>(p.anchor_index)];
}

void check_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be positive");
}

struct MapRun {
  Json summary;
  std::string csv;
};

MapRun run_map(const PerturbedProblem& problem, PlaneWindow w, int grid, int threads) {
  MapSettings ms;
  ms.grid = grid;
  ms.threads = threads;
  const auto comps = trace_components(problem, w, ms);
  Json list = Json::array();
  for (const auto& c : comps) list.push_back(to_json(c));
  return {{{"window", plane_json(w)}, {"grid", grid}, {"components", list}},
          csv_of([&](std::ostream& os) { write_components_csv(os, comps); })};
}

}  // namespace

const char* to_string(Subcommand c) {
  switch (c) {
    case Subcommand::Certify: return "certify";
    case Subcommand::Spectrum: return "spectrum";
    case Subcommand::Degree: return "degree";
    case Subcommand::Trace: return "trace";
    case Subcommand::Map: return "map";
  }
  return "?";
}

Json RunReport::to_json() const {
  return {{"version", version}, {"input_hash", input_hash}, {"results", results}};
}

RunReport run_spec(const ScenarioConfig& cfg) {
  RunReport rep;
  rep.version = SPHEREBRANCH_VERSION;
  rep.timings = Json::object();
  Stopwatch sw(rep.timings);

  const PerturbedProblem problem = sw.time("parse", [&] { return problem_from_json(cfg.problem); });
  if (cfg.threads < 1) throw Error(ErrorKind::InvalidInput, "--threads must be at least 1");

  Json params;
  Json results = {{"command", to_string(cfg.command)}, {"seed", cfg.seed}, {"dim", problem.dim()}};
  switch (cfg.command) {
    case Subcommand::Certify: {
      params = {{"window", window_json(cfg.spectral.window)}, {"lambda", cfg.spectral.lambda ? Json(*cfg.spectral.lambda) : Json(nullptr)}};
      results["certify"] = sw.time("certify", [&] { return run_certify(problem, cfg.spectral); });
      results["perturbation_checks"] = perturbation_checks(problem, cfg.seed);
      break;
    }
    case Subcommand::Spectrum: {
      params = {{"window", window_json(cfg.spectral.window)}};
      const auto spec = sw.time("spectrum", [&] { return spectrum_of(problem, cfg.spectral.window); });
      results["spectrum"] = {{"window", window_json(cfg.spectral.window)}, {"eigenvalues", spectrum_json(spec)}};
      rep.artifacts.emplace_back("spectrum.csv", csv_of([&](std::ostream& os) { write_spectrum_csv(os, spec); }));
      break;
    }
    case Subcommand::Degree: {
      const auto& d = cfg.degree;
      if (!d.alpha || !d.beta) throw Error(ErrorKind::InvalidInput, "degree needs --alpha and --beta");
      if (!(*d.alpha < *d.beta)) throw Error(ErrorKind::InvalidInput, "degree needs --alpha < --beta");
      if (d.epsilon) check_positive(*d.epsilon, "--epsilon");
      params = {{"alpha", *d.alpha}, {"beta", *d.beta},
                {"lambda_hat", d.lambda_hat ? Json(*d.lambda_hat) : Json(nullptr)},
                {"epsilon", d.epsilon ? Json(*d.epsilon) : Json(nullptr)}};
      DegreeOptions opts{d.lambda_hat, d.epsilon};
      const auto rec = sw.time("degree", [&] { return conjecture_check(problem.pencil, *d.alpha, *d.beta, {}, opts); });
      results["degree"] = to_json(rec.report);
      results["conjecture"] = {{"deg_nonzero", rec.deg_nonzero},
                               {"endpoint_signs_differ", rec.endpoint_signs_differ},
                               {"agree", rec.agree}};
      break;
    }
    case Subcommand::Trace: {
      const auto& t = cfg.trace;
      if (t.direction != 1 && t.direction != -1) throw Error(ErrorKind::InvalidInput, "--direction must be 1 or -1");
      check_positive(t.bound, "--bound");
      check_positive(t.step, "--step");
      params = {{"anchor_lambda", t.anchor_lambda ? Json(*t.anchor_lambda) : Json(nullptr)},
                {"anchor_index", t.anchor_index}, {"direction", t.direction}, {"bound", t.bound},
                {"step", t.step}, {"search", window_json(t.search)}};
      const SolutionPoint anchor = pick_anchor(problem, t);
      ContinuationSettings st;
      st.initial_step = t.step;
      st.max_step = std::max(st.max_step, t.step);
      st.bound = t.bound;
      st.threads = cfg.threads;
      const Branch br = sw.time("trace", [&] { return trace_branch(problem, anchor, t.direction, st); });
      const ComponentVerdict v = sw.time("classify", [&] { return classify_component(problem, anchor, t.bound, st); });
      results["trace"] = {{"branch", to_json(br)}, {"component", to_json(v)}};
      rep.artifacts.emplace_back("branch.csv", csv_of([&](std::ostream& os) { write_branch_csv(os, br); }));
      break;
    }
    case Subcommand::Map: {
      if (cfg.map.grid < 8) throw Error(ErrorKind::InvalidInput, "--grid must be at least 8");
      params = {{"window", plane_json(cfg.map.window)}, {"grid", cfg.map.grid}};
      auto m = sw.time("map", [&] { return run_map(problem, cfg.map.window, cfg.map.grid, cfg.threads); });
      results["map"] = std::move(m.summary);
      rep.artifacts.emplace_back("components.csv", std::move(m.csv));
      break;
    }
  }
  results["params"] = params;
  const Json canonical = {{"problem", cfg.problem}, {"command", to_string(cfg.command)},
                          {"params", params}, {"seed", cfg.seed}};
  rep.input_hash = fnv1a_hex(canonical.dump());
  rep.results = std::move(results);
  return rep;
}

RunReport run_example(const std::string& name, int n, std::uint64_t seed, int threads) {
  int k = 0;
  if (name == "k1") k = 1;
  else if (name == "k2") k = 2;
  else if (name == "k3") k = 3;
  else throw Error(ErrorKind::InvalidInput, "example must be one of k1, k2, k3 (got '" + name + "')");
  if (n < 8) throw Error(ErrorKind::InvalidTruncation, "example truncation must be at least 8");
  if (threads < 1) throw Error(ErrorKind::InvalidInput, "--threads must be at least 1");

  RunReport rep;
  rep.version = SPHEREBRANCH_VERSION;
  rep.timings = Json::object();
  Stopwatch sw(rep.timings);
  const PerturbedProblem problem = example_problem(k, n);
  const Window window{-1.0, std::min(10.5, n - 0.5)};

  Json results = {{"example", name}, {"dim", n}, {"seed", seed}};
  results["perturbation_checks"] = perturbation_checks(problem, seed);

  const auto spec = sw.time("spectrum", [&] { return pencil_eigenvalues(problem.pencil, window); });
  results["spectrum"] = {{"window", window_json(window)}, {"eigenvalues", spectrum_json(spec)}};
  rep.artifacts.emplace_back("spectrum.csv", csv_of([&](std::ostream& os) { write_spectrum_csv(os, spec); }));

  results["certificates"] = sw.time("certify", [&] {
    Json a = Json::array();
    for (const auto& e : spec) a.push_back(to_json(certify(problem.pencil, e.lambda)));
    return a;
  });

  // Isolating intervals with endpoints at eigenvalue midpoints.
  std::vector<double> cuts{spec.front().lambda - 0.5};
  for (std::size_t i = 0; i + 1 < spec.size(); ++i) cuts.push_back(0.5 * (spec[i].lambda + spec[i + 1].lambda));
  cuts.push_back(spec.back().lambda + 0.5);
  results["degree"] = sw.time("degree", [&] {
    Json sweep = Json::array();
    bool all_agree = true;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      for (std::size_t j = i + 1; j < cuts.size() && j <= i + 2; ++j) {
        const auto rec = conjecture_check(problem.pencil, cuts[i], cuts[j]);
        all_agree = all_agree && rec.agree;
        sweep.push_back(to_json(rec));
      }
    }
    return Json{{"contribution_at_0", to_json(eigenset_contribution(problem.pencil, 0.0, {cuts[0], cuts[1]}))},
                {"ls_sign", {{"lambda_hat", 1.0},
                             {"at_minus_quarter", ls_sign(problem.pencil, 1.0, -0.25)},
                             {"at_plus_quarter", ls_sign(problem.pencil, 1.0, 0.25)}}},
                {"conjecture_sweep", sweep},
                {"conjecture_all_agree", all_agree}};
  });

  ContinuationSettings st;
  st.threads = threads;
  results["branches"] = sw.time("trace", [&] {
    Json out;
    const auto& first = spec.front();
    std::vector<SolutionPoint> anchors;
    if (first.geometric_mult > 1) {
      const auto points = detect_bifurcation_points(problem, first.lambda, st);
      Json bp = Json::array();
      for (const auto& x : points) bp.push_back(to_json(x));
      out["bifurcation_points"] = bp;
      if (!points.empty()) anchors.push_back({0.0, first.lambda, points.front(), 0.0});
    }
    if (anchors.empty()) anchors.push_back(find_trivial_solutions(problem, {first.lambda - 1e-9, first.lambda + 1e-9}).front());
    const Branch main_branch = trace_branch(problem, anchors.front(), 1, st);
    rep.artifacts.emplace_back("branch_0.csv", csv_of([&](std::ostream& os) { write_branch_csv(os, main_branch); }));
    out["branch_0"] = to_json(main_branch);

    Json verdicts = Json::array();
    for (const auto& e : spec) {
      if (e.lambda > 7.5) break;
      const SolutionPoint anchor =
          e.lambda == first.lambda ? anchors.front()
                                   : find_trivial_solutions(problem, {e.lambda - 1e-9, e.lambda + 1e-9}).front();
      const auto v = classify_component(problem, anchor, st.bound, st);
      verdicts.push_back({{"lambda", e.lambda}, {"verdict", to_string(v.verdict)},
                          {"lambda_second", std::isfinite(v.lambda_second) ? Json(v.lambda_second) : Json(nullptr)},
                          {"branches", v.branches.size()}, {"diagnostics", v.diagnostics}});
    }
    out["verdicts"] = verdicts;
    return out;
  });

  std::vector<std::pair<std::string, PlaneWindow>> windows;
  if (k == 3) windows = {{"map", {-1.0, 1.0, -1.0, 8.0}}};
  if (k == 2) windows = {{"map_origin", {-0.3, 0.3, -0.5, 0.5}}, {"map_upper", {-0.5, 0.5, 2.5, 4.5}}};
  if (k == 1) windows = {{"map", {-1.0, 1.0, -0.5, 4.5}}};
  Json maps;
  for (const auto& [label, w] : windows) {
    auto m = sw.time(label, [&] { return run_map(problem, w, 200, threads); });
    maps[label] = std::move(m.summary);
    rep.artifacts.emplace_back(label + ".csv", std::move(m.csv));
  }
  results["maps"] = maps;

  rep.input_hash = fnv1a_hex(Json{{"example", name}, {"dim", n}, {"seed", seed}}.dump());
  rep.results = std::move(results);
  return rep;
}

void write_outputs(const RunReport& report, const std::filesystem::path& outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + outdir.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& body) {
    const auto path = outdir / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  };
  write("report.json", dump_json(report.to_json()));
  write("timings.json", dump_json(report.timings));
  for (const auto& [name, body] : report.artifacts) write(name, body);
}

}  // namespace spherebranch
