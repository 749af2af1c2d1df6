#pragma once

#include <filesystem>

#include "spherebranch/json.hpp"
#include "spherebranch/operators.hpp"

namespace spherebranch {

/// Builds a problem from
///   {"dim": n,
///    "L": {"builder": "Tk", "k": k} | {"dense": [row-major]},
///    "C": {"builder": "harmonic"}   | {"dense": [row-major]},
///    "N": {"builder": "paper_N"}    | {"linear": [row-major]},   (optional, default 0)
///    "compact": bool}                                             (optional)
/// Unknown keys and type mismatches raise InvalidInput naming the field path.
PerturbedProblem problem_from_json(const Json& spec);

Json load_json_file(const std::filesystem::path& path);

}  // namespace spherebranch
