#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spherebranch/eigenpair_map.hpp"
#include "spherebranch/json.hpp"
#include "spherebranch/spectral.hpp"

namespace spherebranch {

enum class Subcommand { Certify, Spectrum, Degree, Trace, Map };
const char* to_string(Subcommand c);

struct SpectralParams {
  Window window{-1.0, 10.5};
  std::optional<double> lambda;  // certify a single eigenvalue instead of the whole window
};

struct DegreeParams {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> lambda_hat;
  std::optional<double> epsilon;
};

struct TraceParams {
  std::optional<double> anchor_lambda;  // default: first eigenvalue of `search`
  int anchor_index = 0;
  int direction = 1;
  double bound = 10.0;
  double step = 1e-2;
  Window search{-1.0, 10.5};
};

struct MapParams {
  PlaneWindow window{-1.0, 1.0, -1.0, 8.0};
  int grid = 200;
};

struct ScenarioConfig {
  Json problem;
  Subcommand command = Subcommand::Spectrum;
  SpectralParams spectral;
  DegreeParams degree;
  TraceParams trace;
  MapParams map;
  std::filesystem::path outdir;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RunReport {
  std::string version;
  std::string input_hash;  // FNV-1a of the canonical configuration
  Json results;
  Json timings;  // wall-clock seconds per stage; kept out of `results`
  /// Files to write, in order: (relative name, contents).
  std::vector<std::pair<std::string, std::string>> artifacts;

  /// Deterministic part: version, input hash and results.
  Json to_json() const;
};

RunReport run_spec(const ScenarioConfig& config);

/// The full pipeline (spectrum, certificates, degrees, maps, branches) for
/// one of the built-in examples "k1", "k2", "k3" at truncation n >= 8.
RunReport run_example(const std::string& name, int n, std::uint64_t seed = 0, int threads = 1);

/// Writes report.json, timings.json and every artifact under `outdir`.
void write_outputs(const RunReport& report, const std::filesystem::path& outdir);

}  // namespace spherebranch
