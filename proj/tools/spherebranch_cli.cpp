#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spherebranch/error.hpp"
#include "spherebranch/log.hpp"
#include "spherebranch/problem_json.hpp"
#include "spherebranch/report.hpp"
#include "spherebranch/runner.hpp"

namespace sb = spherebranch;

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw sb::Error(sb::ErrorKind::InvalidInput, std::string(flag) + ": malformed number '" + cell + "'");
    }
  }
  if (out.size() != count)
    throw sb::Error(sb::ErrorKind::InvalidInput,
                    std::string(flag) + ": expected " + std::to_string(count) + " comma-separated numbers");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, degree certificates, branches and eigenpair maps for L x + s N(x) = lambda C x on the unit sphere"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPHEREBRANCH_VERSION);

  std::string spec_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  auto common = [&](CLI::App* sub, bool needs_spec) {
    auto* o = sub->add_option("--spec", spec_path, "Problem description (JSON)");
    if (needs_spec) o->required();
    sub->add_option("--out", out_dir, "Output directory (default: print report.json to stdout)");
    sub->add_option("--seed", seed, "Seed for randomized checks");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string spectral_window = "-1,10.5";
  std::optional<double> certify_lambda;
  auto* certify = app.add_subcommand("certify", "Hypothesis certificates for eigenvalues");
  common(certify, true);
  certify->add_option("--window", spectral_window, "Eigenvalue window lo,hi");
  certify->add_option("--lambda", certify_lambda, "Certify this eigenvalue only");

  auto* spectrum = app.add_subcommand("spectrum", "Real eigenvalues with multiplicities");
  common(spectrum, true);
  spectrum->add_option("--window", spectral_window, "Eigenvalue window lo,hi");

  sb::DegreeParams dp;
  auto* degree = app.add_subcommand("degree", "Degree of psi on (alpha, beta) x S");
  common(degree, true);
  degree->add_option("--alpha", dp.alpha)->required();
  degree->add_option("--beta", dp.beta)->required();
  degree->add_option("--lambda-hat", dp.lambda_hat, "Regular reference point for LS signs");
  degree->add_option("--epsilon", dp.epsilon, "Initial perturbation size for multiple eigenvalues");

  sb::TraceParams tp;
  std::string trace_window = "-1,10.5";
  auto* trace = app.add_subcommand("trace", "Continue a branch from a trivial solution");
  common(trace, true);
  trace->add_option("--anchor-lambda", tp.anchor_lambda, "Eigenvalue to start from (default: first in window)");
  trace->add_option("--anchor-index", tp.anchor_index, "Index into the trivial solutions at that eigenvalue");
  trace->add_option("--direction", tp.direction, "+1 or -1");
  trace->add_option("--bound", tp.bound, "Unbounded radius R");
  trace->add_option("--step", tp.step, "Initial continuation step");
  trace->add_option("--window", trace_window, "Eigenvalue search window lo,hi");

  sb::MapParams mp;
  std::string map_window = "-1,1,-1,8";
  auto* map = app.add_subcommand("map", "Eigenpair set in the s-lambda plane (linear N)");
  common(map, true);
  map->add_option("--window", map_window, "s_lo,s_hi,lambda_lo,lambda_hi");
  map->add_option("--grid", mp.grid, "Grid nodes per axis");

  std::string example_name;
  int example_dim = 16;
  auto* example = app.add_subcommand("example", "Full pipeline for a built-in example");
  common(example, false);
  example->add_option("name", example_name, "k1, k2 or k3")->required();
  example->add_option("--dim", example_dim, "Truncation size (>= 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    sb::RunReport report;
    if (example->parsed()) {
      report = sb::run_example(example_name, example_dim, seed, threads);
    } else {
      sb::ScenarioConfig cfg;
      cfg.problem = sb::load_json_file(spec_path);
      cfg.seed = seed;
      cfg.threads = threads;
      if (certify->parsed()) {
        cfg.command = sb::Subcommand::Certify;
        const auto w = parse_list(spectral_window, 2, "--window");
        cfg.spectral = {{w[0], w[1]}, certify_lambda};
      } else if (spectrum->parsed()) {
        cfg.command = sb::Subcommand::Spectrum;
        const auto w = parse_list(spectral_window, 2, "--window");
        cfg.spectral.window = {w[0], w[1]};
      } else if (degree->parsed()) {
        cfg.command = sb::Subcommand::Degree;
        cfg.degree = dp;
      } else if (trace->parsed()) {
        cfg.command = sb::Subcommand::Trace;
        const auto w = parse_list(trace_window, 2, "--window");
        tp.search = {w[0], w[1]};
        cfg.trace = tp;
      } else {
        cfg.command = sb::Subcommand::Map;
        const auto w = parse_list(map_window, 4, "--window");
        mp.window = {w[0], w[1], w[2], w[3]};
        cfg.map = mp;
      }
      report = sb::run_spec(cfg);
    }
    if (out_dir.empty()) {
      std::cout << sb::dump_json(report.to_json());
    } else {
      sb::write_outputs(report, out_dir);
      sb::log(sb::LogLevel::Info, "wrote outputs to " + out_dir);
    }
    return 0;
  } catch (const sb::Error& e) {
    std::cerr << "error (" << sb::to_string(e.kind()) << "): " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
