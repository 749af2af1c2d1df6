#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "spherebranch/continuation.hpp"
#include "spherebranch/degree.hpp"
#include "spherebranch/eigenpair_map.hpp"
#include "spherebranch/json.hpp"

namespace spherebranch {

/// 17 significant digits in %g style with a '.' separator, independent of
/// the process locale.
std::string format_number(double v);

Json to_json(const Vector& v);
Json to_json(const EigenvalueInfo& info);
Json to_json(const HypothesisCertificate& cert);
Json to_json(const EigensetContribution& c);
Json to_json(const DegreeReport& r);
Json to_json(const ConjectureRecord& r);
Json to_json(const SolutionPoint& p);
/// Summary without the point list (see write_branch_csv).
Json to_json(const Branch& b);
Json to_json(const ComponentVerdict& v);
Json to_json(const ConicFit& f);
/// Summary with sample count and conic fit; samples go to write_components_csv.
Json to_json(const EigenpairComponent& c);

/// Columns: step,s,lambda,x_1..x_n,residual.
void write_branch_csv(std::ostream& out, const Branch& branch);
std::vector<SolutionPoint> read_branch_csv(std::istream& in);

/// Columns: component,kind,s,lambda.
void write_components_csv(std::ostream& out, const std::vector<EigenpairComponent>& comps);
std::vector<EigenpairComponent> read_components_csv(std::istream& in);

/// Columns: lambda,geometric_mult,algebraic_mult.
void write_spectrum_csv(std::ostream& out, const std::vector<EigenvalueInfo>& spectrum);

/// Pretty JSON with a trailing newline.
std::string dump_json(const Json& j);

}  // namespace spherebranch
