#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oscispline/error.hpp"
#include "oscispline/modulus.hpp"
#include "oscispline/oracle.hpp"
#include "oscispline/serialize.hpp"
#include "oscispline/zerofit.hpp"

namespace py = pybind11;
using namespace oscispline;

namespace {

Domain domain_of(const std::optional<double>& A) { return A ? Domain::segment(*A) : Domain::half_line(); }

HalfLinePath path_of(const std::string& s)
{
    if (s == "continuation") return HalfLinePath::Continuation;
    if (s == "direct") return HalfLinePath::Direct;
    if (s == "truncated") return HalfLinePath::TruncatedOnly;
    throw Error(ErrorKind::InvalidArgument, "unknown path " + s);
}

OscillateOptions osc_options(double tol, const std::string& path)
{
    OscillateOptions o;
    o.tol = tol;
    o.path = path_of(path);
    return o;
}

// Plain dict through the JSON serializer; keeps the Python side free of C++ types.
py::object as_dict(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_oscispline, m)
{
    m.doc() = "Maximally oscillating perfect g-splines";

    static py::exception<Error> exc(m, "OscisplineError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = exc;
            py::object inst = err(e.what());
            inst.attr("kind") = to_string(e.kind());
            inst.attr("residual") = e.residual();
            PyErr_SetObject(err.ptr(), inst.ptr());
        }
    });

    py::class_<WeightFunction>(m, "Weight")
        .def(py::init([](const std::string& spec, std::optional<double> A) { return parse_weight(spec, domain_of(A)); }),
             py::arg("spec"), py::arg("A") = py::none())
        .def("__call__", &WeightFunction::operator(), py::arg("t"))
        .def("describe", &WeightFunction::describe)
        .def_property_readonly("limit", &WeightFunction::limit_at_infinity)
        .def_property_readonly("monotone", &WeightFunction::monotone_nonincreasing)
        .def("scaled", &WeightFunction::scaled)
        .def("__repr__", [](const WeightFunction& w) { return "Weight('" + w.describe() + "')"; });

    py::class_<GCalculus>(m, "Calculus")
        .def(py::init([](const WeightFunction& g, int r) { return build_calculus(g, r); }), py::arg("g"), py::arg("r"))
        .def("P", [](const GCalculus& c, int k, double t) { return eval_Pk(c, k, t); }, py::arg("k"), py::arg("t"))
        .def("Q", &GCalculus::Q, py::arg("k"), py::arg("t"))
        .def_property_readonly("tail_constants", &GCalculus::tail_constants)
        .def_property_readonly("closed_form", &GCalculus::closed_form);

    py::class_<PerfectGSpline>(m, "Spline")
        .def(py::init([](const GCalculus& calc, std::vector<double> knots, int eps, double limit) {
                 return make_spline(calc, std::move(knots), eps, limit);
             }),
             py::arg("calc"), py::arg("knots"), py::arg("eps") = 1, py::arg("limit") = 0.0)
        .def("__call__", [](const PerfectGSpline& s, double t, int j) { return s.eval(j, t); }, py::arg("t"),
             py::arg("j") = 0)
        .def_property_readonly("order", &PerfectGSpline::order)
        .def_property_readonly("knots", &PerfectGSpline::knots)
        .def_property_readonly("leading_sign", &PerfectGSpline::leading_sign)
        .def_property_readonly("limit", &PerfectGSpline::limit_value)
        .def("to_dict", [](const PerfectGSpline& s) { return as_dict(to_json(s)); });

    py::class_<OscillationSolution>(m, "Oscillation")
        .def_readonly("spline", &OscillationSolution::spline)
        .def_readonly("C", &OscillationSolution::C)
        .def_readonly("oscillation_points", &OscillationSolution::oscillation_points)
        .def_readonly("alpha", &OscillationSolution::alpha)
        .def_property_readonly("converged", [](const OscillationSolution& s) { return s.diagnostics.converged; })
        .def_property_readonly("residual", [](const OscillationSolution& s) { return s.diagnostics.residual; })
        .def("to_dict", [](const OscillationSolution& s) { return as_dict(to_json(s)); });

    m.def("check_assumptions",
          [](const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g, int r) {
              return as_dict(to_json(check_assumptions(fm, fp, g, r)));
          },
          py::arg("f_minus"), py::arg("f_plus"), py::arg("g"), py::arg("r"));

    m.def("fit_knots",
          [](const GCalculus& calc, std::vector<double> zeros) {
              auto res = fit_knots(ZeroFitProblem{calc, std::move(zeros), {}, std::nullopt});
              return py::make_tuple(res.spline, res.residual);
          },
          py::arg("calc"), py::arg("zeros"), "Spline vanishing at the zeros and its residual.");

    m.def("oscillate_segment",
          [](int r, int n, double A, const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g,
             double tol) { return oscillate_segment(r, n, A, fm, fp, g, osc_options(tol, "continuation")); },
          py::arg("r"), py::arg("n"), py::arg("A"), py::arg("f_minus"), py::arg("f_plus"), py::arg("g"),
          py::arg("tol") = 1e-11);

    m.def("oscillate_halfline",
          [](int r, int n, double alpha, const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g,
             double tol, const std::string& path) {
              return oscillate_halfline(r, n, alpha, fm, fp, g, osc_options(tol, path));
          },
          py::arg("r"), py::arg("n"), py::arg("alpha"), py::arg("f_minus"), py::arg("f_plus"), py::arg("g"),
          py::arg("tol") = 1e-11, py::arg("path") = "continuation");

    m.def("compute_Cn",
          [](int r, int n, double alpha, const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g) {
              return compute_Cn(r, n, alpha, fm, fp, g);
          },
          py::arg("r"), py::arg("n"), py::arg("alpha"), py::arg("f_minus"), py::arg("f_plus"), py::arg("g"));

    m.def("compute_C0",
          [](int r, const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g) {
              return as_dict(to_json(compute_C0(r, fm, fp, g)));
          },
          py::arg("r"), py::arg("f_minus"), py::arg("f_plus"), py::arg("g"));

    m.def("omega",
          [](int r, int k, double delta, const WeightFunction& f, const WeightFunction& g) {
              return as_dict(to_json(omega(r, k, delta, f, g)));
          },
          py::arg("r"), py::arg("k"), py::arg("delta"), py::arg("f"), py::arg("g"));

    m.def("least_deviating_primitive",
          [](int r, double a_end, const WeightFunction& f, const WeightFunction& g) {
              return as_dict(to_json(least_deviating_primitive(r, a_end, f, g)));
          },
          py::arg("r"), py::arg("a_end"), py::arg("f"), py::arg("g"));

    m.def("brute_oscillation",
          [](int r, int n, std::optional<double> A, double alpha, const WeightFunction& fm, const WeightFunction& fp,
             const WeightFunction& g) { return as_dict(to_json(brute_oscillation(r, n, domain_of(A), alpha, fm, fp, g))); },
          py::arg("r"), py::arg("n"), py::arg("A"), py::arg("alpha"), py::arg("f_minus"), py::arg("f_plus"),
          py::arg("g"));
}
