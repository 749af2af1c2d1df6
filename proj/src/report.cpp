#include "spherebranch/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "spherebranch/error.hpp"

namespace spherebranch {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::InvalidInput, "csv: malformed number '" + s + "'");
  return v;
}

ComponentKind parse_kind(const std::string& s) {
  for (auto k : {ComponentKind::Line, ComponentKind::ClosedCurve, ComponentKind::OpenCurve,
                 ComponentKind::IsolatedPoint})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::InvalidInput, "csv: unknown component kind '" + s + "'");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

Json to_json(const EigenvalueInfo& info) {
  Json kernel = Json::array();
  for (Eigen::Index c = 0; c < info.kernel_basis.cols(); ++c) kernel.push_back(to_json(Vector(info.kernel_basis.col(c))));
  return {{"lambda", number(info.lambda)},
          {"geometric_mult", info.geometric_mult},
          {"algebraic_mult", info.algebraic_mult},
          {"kernel_basis", kernel}};
}

Json to_json(const HypothesisCertificate& c) {
  return {{"lambda_star", number(c.lambda_star)},
          {"h1_compact", c.h1_compact},
          {"h2_odd", c.h2_odd},
          {"h3_residual", number(c.h3_residual)},
          {"h3_holds", c.h3_holds},
          {"geometric_mult", c.geometric_mult},
          {"algebraic_mult", c.algebraic_mult},
          {"kernel_injectivity", number(c.kernel_injectivity)},
          {"simple", c.simple}};
}

Json to_json(const EigensetContribution& c) {
  Json pert = Json::array();
  for (double l : c.perturbed_eigenvalues) pert.push_back(number(l));
  return {{"lambda_star", number(c.lambda_star)},
          {"value", c.value},
          {"method", to_string(c.method)},
          {"geometric_mult", c.geometric_mult},
          {"epsilon", number(c.epsilon)},
          {"value_half_epsilon", c.value_half_epsilon},
          {"perturbed_eigenvalues", pert}};
}

Json to_json(const DegreeReport& r) {
  Json sets = Json::array();
  for (const auto& e : r.eigensets) sets.push_back(to_json(e));
  return {{"alpha", number(r.interval.lo)},
          {"beta", number(r.interval.hi)},
          {"value", r.value},
          {"method", to_string(r.method)},
          {"lambda_hat", number(r.lambda_hat)},
          {"ls_sign_alpha", r.ls_sign_alpha},
          {"ls_sign_beta", r.ls_sign_beta},
          {"eigensets", sets}};
}

Json to_json(const ConjectureRecord& r) {
  return {{"deg_nonzero", r.deg_nonzero},
          {"endpoint_signs_differ", r.endpoint_signs_differ},
          {"agree", r.agree},
          {"report", to_json(r.report)}};
}

Json to_json(const SolutionPoint& p) {
  return {{"s", number(p.s)}, {"lambda", number(p.lambda)}, {"x", to_json(p.x)}, {"residual", number(p.residual)}};
}

Json to_json(const Branch& b) {
  Json j = {{"anchor", to_json(b.anchor)},
            {"termination", to_string(b.termination)},
            {"points", b.points.size()},
            {"arclength", number(b.arclength)},
            {"max_abs_s", number(b.max_abs_s)},
            {"diagnostics", b.diagnostics}};
  if (!b.points.empty()) j["end"] = to_json(b.points.back());
  if (b.termination == Termination::TrivialReturn) {
    j["lambda_second"] = number(b.lambda_second);
    j["x_second"] = to_json(b.x_second);
  }
  return j;
}

Json to_json(const ComponentVerdict& v) {
  Json branches = Json::array();
  for (const auto& b : v.branches) branches.push_back(to_json(b));
  Json j = {{"verdict", to_string(v.verdict)}, {"diagnostics", v.diagnostics}, {"branches", branches}};
  if (v.verdict == Verdict::TrivialReturn) {
    j["lambda_second"] = number(v.lambda_second);
    j["x_second"] = to_json(v.x_second);
  }
  return j;
}

Json to_json(const ConicFit& f) {
  return {{"center", {number(f.s0), number(f.lambda0)}},
          {"half_axes", {number(f.a_s), number(f.a_lambda)}},
          {"residual", number(f.residual)}};
}

Json to_json(const EigenpairComponent& c) {
  Json j = {{"kind", to_string(c.kind)}, {"samples", c.samples.size()}};
  if (c.kind == ComponentKind::Line && !c.samples.empty()) j["lambda"] = number(c.samples.front()[1]);
  if (c.kind == ComponentKind::IsolatedPoint && !c.samples.empty())
    j["point"] = {number(c.samples.front()[0]), number(c.samples.front()[1])};
  j["conic_fit"] = c.conic_fit ? to_json(*c.conic_fit) : Json(nullptr);
  return j;
}

void write_branch_csv(std::ostream& out, const Branch& branch) {
  const Eigen::Index n = branch.points.empty() ? 0 : branch.points.front().x.size();
  out << "step,s,lambda";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  out << ",residual\n";
  for (std::size_t k = 0; k < branch.points.size(); ++k) {
    const auto& p = branch.points[k];
    out << k << ',' << format_number(p.s) << ',' << format_number(p.lambda);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(p.x(i));
    out << ',' << format_number(p.residual) << '\n';
  }
}

std::vector<SolutionPoint> read_branch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::InvalidInput, "csv: empty branch file");
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "step" || header[1] != "s" || header[2] != "lambda" ||
      header.back() != "residual")
    throw Error(ErrorKind::InvalidInput, "csv: unexpected branch header");
  const std::size_t n = header.size() - 4;
  std::vector<SolutionPoint> out;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() != header.size()) throw Error(ErrorKind::InvalidInput, "csv: ragged branch row");
    SolutionPoint p;
    p.s = parse_number(cells[1]);
    p.lambda = parse_number(cells[2]);
    p.x.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) p.x(static_cast<Eigen::Index>(i)) = parse_number(cells[3 + i]);
    p.residual = parse_number(cells.back());
    out.push_back(std::move(p));
  }
  return out;
}

void write_components_csv(std::ostream& out, const std::vector<EigenpairComponent>& comps) {
  out << "component,kind,s,lambda\n";
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (const auto& p : comps[c].samples)
      out << c << ',' << to_string(comps[c].kind) << ',' << format_number(p[0]) << ',' << format_number(p[1])
          << '\n';
}

std::vector<EigenpairComponent> read_components_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "component,kind,s,lambda")
    throw Error(ErrorKind::InvalidInput, "csv: unexpected component header");
  std::vector<EigenpairComponent> out;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    if (cells.size() != 4) throw Error(ErrorKind::InvalidInput, "csv: ragged component row");
    const auto idx = static_cast<std::size_t>(parse_number(cells[0]));
    if (idx > out.size()) throw Error(ErrorKind::InvalidInput, "csv: component index out of order");
    if (idx == out.size()) out.push_back({parse_kind(cells[1]), {}, std::nullopt});
    out[idx].samples.push_back({parse_number(cells[2]), parse_number(cells[3])});
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const std::vector<EigenvalueInfo>& spectrum) {
  out << "lambda,geometric_mult,algebraic_mult\n";
  for (const auto& e : spectrum)
    out << format_number(e.lambda) << ',' << e.geometric_mult << ',' << e.algebraic_mult << '\n';
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace spherebranch
