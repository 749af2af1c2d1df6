#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spherebranch/continuation.hpp"
#include "spherebranch/degree.hpp"
#include "spherebranch/eigenpair_map.hpp"
#include "spherebranch/error.hpp"
#include "spherebranch/orientation.hpp"
#include "spherebranch/problem_json.hpp"
#include "spherebranch/report.hpp"
#include "spherebranch/runner.hpp"

namespace py = pybind11;
using namespace spherebranch;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perturbed eigenvalue problems L x + s N(x) = lambda C x on the unit sphere";
  m.attr("__version__") = SPHEREBRANCH_VERSION;

  static py::exception<Error> exc(m, "SpherebranchError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
      py::set_error(exc, msg.c_str());
    }
  });

  py::class_<Window>(m, "Window")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &Window::lo)
      .def_readwrite("hi", &Window::hi);

  py::class_<Pencil>(m, "Pencil")
      .def(py::init<Matrix, Matrix, bool>(), py::arg("L"), py::arg("C"), py::arg("compact") = false)
      .def_property_readonly("dim", &Pencil::dim)
      .def_property_readonly("L", &Pencil::L)
      .def_property_readonly("C", &Pencil::C)
      .def_property_readonly("compact", &Pencil::compact)
      .def_property_readonly("regular_point", &Pencil::regular_point);

  py::class_<Perturbation>(m, "Perturbation")
      .def_static("linear", &Perturbation::linear)
      .def_static("nonlinear", &Perturbation::nonlinear, py::arg("dim"), py::arg("map"), py::arg("jacobian"))
      .def_static("zero", &Perturbation::zero)
      .def_property_readonly("dim", &Perturbation::dim)
      .def("evaluate", &Perturbation::evaluate)
      .def("derivative", &Perturbation::derivative)
      .def_property_readonly("linear_matrix", &Perturbation::linear_matrix);

  py::class_<PerturbedProblem>(m, "PerturbedProblem")
      .def(py::init<Pencil, Perturbation>())
      .def_readonly("pencil", &PerturbedProblem::pencil)
      .def_readonly("perturbation", &PerturbedProblem::perturbation)
      .def_property_readonly("dim", &PerturbedProblem::dim);

  m.def("build_Tk", &build_Tk, py::arg("k"), py::arg("n"));
  m.def("build_C", &build_C, py::arg("n"));
  m.def("build_paper_N", &build_paper_N, py::arg("n"));
  m.def("example_pencil", &example_pencil, py::arg("k"), py::arg("n"));
  m.def("example_problem", &example_problem, py::arg("k"), py::arg("n"));
  m.def("psi", &psi);
  m.def("psi_plus", &psi_plus);
  m.def("problem_from_json",
        [](const std::string& text) { return problem_from_json(Json::parse(text)); });

  py::class_<EigenvalueInfo>(m, "EigenvalueInfo")
      .def_readonly("lambda_", &EigenvalueInfo::lambda)
      .def_readonly("geometric_mult", &EigenvalueInfo::geometric_mult)
      .def_readonly("algebraic_mult", &EigenvalueInfo::algebraic_mult)
      .def_readonly("kernel_basis", &EigenvalueInfo::kernel_basis);

  py::class_<HypothesisCertificate>(m, "HypothesisCertificate")
      .def_readonly("lambda_star", &HypothesisCertificate::lambda_star)
      .def_readonly("h1_compact", &HypothesisCertificate::h1_compact)
      .def_readonly("h2_odd", &HypothesisCertificate::h2_odd)
      .def_readonly("h3_residual", &HypothesisCertificate::h3_residual)
      .def_readonly("h3_holds", &HypothesisCertificate::h3_holds)
      .def_readonly("geometric_mult", &HypothesisCertificate::geometric_mult)
      .def_readonly("algebraic_mult", &HypothesisCertificate::algebraic_mult)
      .def_readonly("simple", &HypothesisCertificate::simple);

  m.def("pencil_eigenvalues", &pencil_eigenvalues);
  m.def("kernel_basis", &kernel_basis);
  m.def("certify", &certify);
  m.def("is_companion", &is_companion);
  m.def("companions_equivalent", &companions_equivalent);

  m.def("ls_sign", &ls_sign, py::arg("pencil"), py::arg("lambda_hat"), py::arg("lambda_"));
  m.def("simple_eigenpoint_sign",
        [](const Pencil& p, double lambda, const Vector& x) { return simple_eigenpoint_sign(p, lambda, x); });

  py::enum_<DegreeMethod>(m, "DegreeMethod")
      .value("ComputationFormula", DegreeMethod::ComputationFormula)
      .value("EpsilonPerturbation", DegreeMethod::EpsilonPerturbation);

  py::class_<EigensetContribution>(m, "EigensetContribution")
      .def_readonly("lambda_star", &EigensetContribution::lambda_star)
      .def_readonly("value", &EigensetContribution::value)
      .def_readonly("method", &EigensetContribution::method)
      .def_readonly("epsilon", &EigensetContribution::epsilon)
      .def_readonly("value_half_epsilon", &EigensetContribution::value_half_epsilon);

  py::class_<DegreeReport>(m, "DegreeReport")
      .def_readonly("value", &DegreeReport::value)
      .def_readonly("ls_sign_alpha", &DegreeReport::ls_sign_alpha)
      .def_readonly("ls_sign_beta", &DegreeReport::ls_sign_beta)
      .def_readonly("eigensets", &DegreeReport::eigensets);

  py::class_<ConjectureRecord>(m, "ConjectureRecord")
      .def_readonly("deg_nonzero", &ConjectureRecord::deg_nonzero)
      .def_readonly("endpoint_signs_differ", &ConjectureRecord::endpoint_signs_differ)
      .def_readonly("agree", &ConjectureRecord::agree)
      .def_readonly("report", &ConjectureRecord::report);

  m.def("eigenset_contribution", [](const Pencil& p, double lambda_star, Window interval) {
    return eigenset_contribution(p, lambda_star, interval);
  });
  m.def("degree_on_interval", [](const Pencil& p, double alpha, double beta) {
    return degree_on_interval(p, alpha, beta);
  });
  m.def("conjecture_check", [](const Pencil& p, double alpha, double beta) {
    return conjecture_check(p, alpha, beta);
  });

  py::class_<SolutionPoint>(m, "SolutionPoint")
      .def(py::init([](double s, double lambda, Vector x) { return SolutionPoint{s, lambda, std::move(x), 0.0}; }),
           py::arg("s"), py::arg("lambda_"), py::arg("x"))
      .def_readonly("s", &SolutionPoint::s)
      .def_readonly("lambda_", &SolutionPoint::lambda)
      .def_readonly("x", &SolutionPoint::x)
      .def_readonly("residual", &SolutionPoint::residual);

  py::enum_<Termination>(m, "Termination")
      .value("Unbounded", Termination::Unbounded)
      .value("TrivialReturn", Termination::TrivialReturn)
      .value("ClosedLoop", Termination::ClosedLoop)
      .value("StepFailure", Termination::StepFailure);

  py::class_<Branch>(m, "Branch")
      .def_readonly("points", &Branch::points)
      .def_readonly("termination", &Branch::termination)
      .def_readonly("lambda_second", &Branch::lambda_second)
      .def_readonly("x_second", &Branch::x_second)
      .def_readonly("arclength", &Branch::arclength);

  py::class_<ContinuationSettings>(m, "ContinuationSettings")
      .def(py::init<>())
      .def_readwrite("initial_step", &ContinuationSettings::initial_step)
      .def_readwrite("max_step", &ContinuationSettings::max_step)
      .def_readwrite("bound", &ContinuationSettings::bound)
      .def_readwrite("threads", &ContinuationSettings::threads)
      .def_readwrite("trace_grid", &ContinuationSettings::trace_grid);

  py::enum_<Verdict>(m, "Verdict")
      .value("Unbounded", Verdict::Unbounded)
      .value("TrivialReturn", Verdict::TrivialReturn)
      .value("IsolatedCompact", Verdict::IsolatedCompact)
      .value("Inconclusive", Verdict::Inconclusive);

  py::class_<ComponentVerdict>(m, "ComponentVerdict")
      .def_readonly("verdict", &ComponentVerdict::verdict)
      .def_readonly("lambda_second", &ComponentVerdict::lambda_second)
      .def_readonly("x_second", &ComponentVerdict::x_second)
      .def_readonly("branches", &ComponentVerdict::branches)
      .def_readonly("diagnostics", &ComponentVerdict::diagnostics);

  m.def("find_trivial_solutions", &find_trivial_solutions, py::arg("problem"), py::arg("window"),
        py::arg("grid_density") = 8);
  m.def("trace_branch", &trace_branch, py::arg("problem"), py::arg("anchor"), py::arg("direction") = 1,
        py::arg("settings") = ContinuationSettings{});
  m.def("classify_component", &classify_component, py::arg("problem"), py::arg("anchor"), py::arg("bound") = 10.0,
        py::arg("settings") = ContinuationSettings{});
  m.def("detect_bifurcation_points", &detect_bifurcation_points, py::arg("problem"), py::arg("lambda_star"),
        py::arg("settings") = ContinuationSettings{});

  py::class_<PlaneWindow>(m, "PlaneWindow")
      .def(py::init<double, double, double, double>(), py::arg("s_lo"), py::arg("s_hi"), py::arg("lambda_lo"),
           py::arg("lambda_hi"));

  py::enum_<ComponentKind>(m, "ComponentKind")
      .value("Line", ComponentKind::Line)
      .value("ClosedCurve", ComponentKind::ClosedCurve)
      .value("OpenCurve", ComponentKind::OpenCurve)
      .value("IsolatedPoint", ComponentKind::IsolatedPoint);

  py::class_<ConicFit>(m, "ConicFit")
      .def_readonly("s0", &ConicFit::s0)
      .def_readonly("lambda0", &ConicFit::lambda0)
      .def_readonly("a_s", &ConicFit::a_s)
      .def_readonly("a_lambda", &ConicFit::a_lambda)
      .def_readonly("residual", &ConicFit::residual);

  py::class_<EigenpairComponent>(m, "EigenpairComponent")
      .def_readonly("kind", &EigenpairComponent::kind)
      .def_readonly("samples", &EigenpairComponent::samples)
      .def_readonly("conic_fit", &EigenpairComponent::conic_fit);

  m.def("eigenpair_det", &eigenpair_det);
  m.def("trace_components",
        [](const PerturbedProblem& p, PlaneWindow w, int grid, int threads) {
          MapSettings ms;
          ms.grid = grid;
          ms.threads = threads;
          return trace_components(p, w, ms);
        },
        py::arg("problem"), py::arg("window"), py::arg("grid") = 200, py::arg("threads") = 1);
  m.def("fit_conic", &fit_conic);

  m.def("run_example",
        [](const std::string& name, int n, std::uint64_t seed) { return run_example(name, n, seed).to_json().dump(); },
        py::arg("name"), py::arg("n") = 16, py::arg("seed") = 0,
        "Runs the full pipeline for a built-in example; returns the report as a JSON string.");
}
