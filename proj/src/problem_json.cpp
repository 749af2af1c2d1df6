#include "spherebranch/problem_json.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, "spec field '" + path + "': " + msg);
}

void reject_unknown(const Json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

const Json& required(const Json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

Matrix dense(const Json& arr, int n, const std::string& path) {
  if (!arr.is_array()) fail(path, "expected an array of numbers");
  if (arr.size() != static_cast<std::size_t>(n) * n)
    fail(path, "expected " + std::to_string(n * n) + " entries (row-major), got " + std::to_string(arr.size()));
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Json& v = arr[static_cast<std::size_t>(r) * n + c];
      const std::string here = path + "[" + std::to_string(r * n + c) + "]";
      if (!v.is_number()) fail(here, "expected a number");
      const double x = v.get<double>();
      if (!std::isfinite(x)) fail(here, "not finite");
      m(r, c) = x;
    }
  }
  return m;
}

std::string builder_name(const Json& obj, const std::string& path) {
  const Json& b = required(obj, "builder", path);
  if (!b.is_string()) fail(path + ".builder", "expected a string");
  return b.get<std::string>();
}

}  // namespace

PerturbedProblem problem_from_json(const Json& spec) {
  reject_unknown(spec, "", {"dim", "L", "C", "N", "compact"});
  const Json& dim = required(spec, "dim", "");
  if (!dim.is_number_integer()) fail("dim", "expected an integer");
  const long long nn = dim.get<long long>();
  if (nn < 2 || nn > 4096) fail("dim", "must lie in [2, 4096]");
  const int n = static_cast<int>(nn);

  bool compact_default = false;
  Matrix l;
  {
    const Json& node = required(spec, "L", "");
    if (!node.is_object()) fail("L", "expected an object");
    if (node.contains("dense")) {
      reject_unknown(node, "L", {"dense"});
      l = dense(node["dense"], n, "L.dense");
    } else {
      reject_unknown(node, "L", {"builder", "k"});
      const std::string b = builder_name(node, "L");
      if (b != "Tk") fail("L.builder", "unknown builder '" + b + "' (expected \"Tk\")");
      const Json& k = required(node, "k", "L");
      if (!k.is_number_integer()) fail("L.k", "expected an integer");
      const long long kk = k.get<long long>();
      if (kk < 1 || kk >= n)
        throw Error(ErrorKind::InvalidTruncation, "spec field 'L.k': need 1 <= k < dim");
      l = build_Tk(static_cast<int>(kk), n);
      compact_default = true;
    }
  }

  Matrix c;
  {
    const Json& node = required(spec, "C", "");
    if (!node.is_object()) fail("C", "expected an object");
    if (node.contains("dense")) {
      reject_unknown(node, "C", {"dense"});
      c = dense(node["dense"], n, "C.dense");
    } else {
      reject_unknown(node, "C", {"builder"});
      const std::string b = builder_name(node, "C");
      if (b != "harmonic") fail("C.builder", "unknown builder '" + b + "' (expected \"harmonic\")");
      c = build_C(n);
    }
  }

  std::optional<Perturbation> pert;
  if (const auto it = spec.find("N"); it != spec.end()) {
    const Json& node = *it;
    if (!node.is_object()) fail("N", "expected an object");
    if (node.contains("linear")) {
      reject_unknown(node, "N", {"linear"});
      pert = Perturbation::linear(dense(node["linear"], n, "N.linear"));
    } else {
      reject_unknown(node, "N", {"builder"});
      const std::string b = builder_name(node, "N");
      if (b != "paper_N") fail("N.builder", "unknown builder '" + b + "' (expected \"paper_N\")");
      if (n < 4) throw Error(ErrorKind::InvalidTruncation, "spec field 'N.builder': paper_N needs dim >= 4");
      pert = build_paper_N(n);
    }
  } else {
    pert = Perturbation::zero(n);
  }

  bool compact = compact_default;
  if (const auto it = spec.find("compact"); it != spec.end()) {
    if (!it->is_boolean()) fail("compact", "expected a boolean");
    compact = it->get<bool>();
  }
  return PerturbedProblem(Pencil(std::move(l), std::move(c), compact), std::move(*pert));
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open spec file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, "spec file " + path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace spherebranch
