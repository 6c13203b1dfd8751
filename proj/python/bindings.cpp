#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modelspace/errors.hpp"
#include "modelspace/io.hpp"
#include "modelspace/kernels.hpp"

namespace py = pybind11;
using namespace modelspace;

namespace {

// Reports cross the boundary as JSON text; the Python layer decodes them.
std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Embedding criteria for model spaces";

    py::register_exception<Error>(m, "ModelspaceError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<InnerFunction>(m, "InnerFunction")
        .def(py::init<>())
        .def_static("monomial", &InnerFunction::monomial, py::arg("n"))
        .def_static("blaschke", [](const std::vector<Complex>& z) { return InnerFunction::blaschke(z); },
                    py::arg("zeros"))
        .def_static("from_json",
                    [](const std::string& text) { return inner_from_json(parse_json_text(text, "<inner>"), ""); },
                    py::arg("text"))
        .def("to_json", [](const InnerFunction& t) { return dump(to_json(t)); })
        .def("with_truncation", &InnerFunction::with_truncation, py::arg("n"))
        .def("__call__", [](const InnerFunction& t, Complex z) { return evaluate(t, z); }, py::arg("z"))
        .def_property_readonly("zero_count", &InnerFunction::zero_count)
        .def_property_readonly("flat_zeros", &InnerFunction::flat_zeros)
        .def_property_readonly("boundary_spectrum", &InnerFunction::boundary_spectrum);

    py::class_<DiscMeasure>(m, "DiscMeasure")
        .def(py::init<>())
        .def(py::init([](const std::vector<std::pair<Complex, double>>& atoms) {
                 std::vector<MeasureAtom> a;
                 for (const auto& [z, mass] : atoms) a.push_back({z, mass});
                 return DiscMeasure(std::move(a));
             }),
             py::arg("atoms"))
        .def_static("arc_measure", &DiscMeasure::arc_measure)
        .def_static("from_json",
                    [](const std::string& text, const InnerFunction& theta) {
                        return measure_from_json(parse_json_text(text, "<measure>"), theta, "");
                    },
                    py::arg("text"), py::arg("theta") = InnerFunction{})
        .def("to_json", [](const DiscMeasure& mu) { return dump(to_json(mu)); })
        .def("plus", &DiscMeasure::plus)
        .def_property_readonly("total_mass", &DiscMeasure::total_mass);

    m.def("evaluate", &evaluate, py::arg("theta"), py::arg("z"));
    m.def("reproducing_kernel", &reproducing_kernel, py::arg("theta"), py::arg("z"), py::arg("zeta"));
    m.def("kernel_norm", &kernel_norm, py::arg("theta"), py::arg("z"), py::arg("q") = 2.0, py::arg("power") = 1,
          py::arg("tol") = 1e-12);
    m.def("kernel_norm_squared_closed_form", &kernel_norm_squared_closed_form, py::arg("theta"), py::arg("z"));
    m.def("derivative_modulus_boundary", &derivative_modulus_boundary, py::arg("theta"), py::arg("zeta"));
    m.def("level_distance",
          [](const InnerFunction& t, double eps, Complex p, double tol) {
              const DistanceBracket b = level_distance(t, eps, p, tol);
              return std::make_pair(b.lo, b.hi);
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("p"), py::arg("tol") = 1e-6);

    m.def("clark_measure", &clark_measure, py::arg("b"), py::arg("alpha"));
    m.def("hs_integral", &hs_integral, py::arg("theta"), py::arg("mu"), py::arg("tol") = 1e-12);
    m.def("embedding_gram",
          [](const InnerFunction& t, const DiscMeasure& mu, double tol) {
              return Eigen::MatrixXcd(embedding_gram(t, mu, tol).matrix);
          },
          py::arg("theta"), py::arg("mu"), py::arg("tol") = 1e-12);
    m.def("singular_values",
          [](const InnerFunction& t, const DiscMeasure& mu, const std::vector<double>& r) {
              return dump(to_json(singular_values(embedding_gram(t, mu), r)));
          },
          py::arg("theta"), py::arg("mu"), py::arg("r_list") = std::vector<double>{1.0, 2.0});

    m.def("whitney_csv",
          [](const InnerFunction& t, double eps, double tol) { return whitney_decompose(t, eps, tol).to_csv(); },
          py::arg("theta"), py::arg("epsilon"), py::arg("tol") = 1e-6);

    m.def("carleson_constant", [](const DiscMeasure& mu, int depth) { return carleson_constant(mu, depth).value; },
          py::arg("mu"), py::arg("depth"));
    m.def("check_carleson", [](const DiscMeasure& mu, int depth) { return dump(to_json(check_carleson(mu, depth))); },
          py::arg("mu"), py::arg("depth"));
    m.def("check_volberg_treil",
          [](const InnerFunction& t, double eps, const DiscMeasure& mu, int depth, std::optional<double> c) {
              return dump(to_json(check_volberg_treil(t, eps, mu, depth, c)));
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("mu"), py::arg("depth"), py::arg("threshold") = py::none());
    m.def("check_V1",
          [](const InnerFunction& t, const DiscMeasure& mu, const std::vector<double>& grid, double eps, int depth) {
              return dump(to_json(check_V1(t, mu, grid, eps, depth)));
          },
          py::arg("theta"), py::arg("mu"), py::arg("delta_grid"), py::arg("epsilon"), py::arg("depth"));
    m.def("check_V2",
          [](const InnerFunction& t, double eps, const DiscMeasure& mu, int depth) {
              return dump(to_json(check_V2(t, eps, mu, depth)));
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("mu"), py::arg("depth"));
    m.def("luecking_sum",
          [](const DiscMeasure& mu, double r, int depth) { return dump(to_json(luecking_sum(mu, r, depth))); },
          py::arg("mu"), py::arg("r"), py::arg("depth"));
    m.def("schatten_necessary_sum",
          [](const InnerFunction& t, double eps, const DiscMeasure& mu, double r, int depth) {
              return dump(to_json(schatten_necessary_sum(t, eps, mu, r, depth)));
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("mu"), py::arg("r"), py::arg("depth"));
    m.def("thm54_family_sum",
          [](const InnerFunction& t, double eps, double A, const DiscMeasure& mu, double r, int depth) {
              return dump(to_json(thm54_family_sum(t, eps, A, mu, r, depth)));
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("A"), py::arg("mu"), py::arg("r"), py::arg("depth"));
    m.def("schatten_sufficient_sum",
          [](const InnerFunction& t, double eps, const DiscMeasure& mu, double r, double tol) {
              return dump(to_json(schatten_sufficient_sum(t, eps, mu, r, tol)));
          },
          py::arg("theta"), py::arg("epsilon"), py::arg("mu"), py::arg("r"), py::arg("tol") = 1e-6);
    m.def("check_thm14",
          [](const InnerFunction& t, bool cls, double eps, const DiscMeasure& mu, double r, int depth, double tol) {
              return dump(to_json(check_thm14(t, cls, eps, mu, r, depth, tol)));
          },
          py::arg("theta"), py::arg("cls_declared"), py::arg("epsilon"), py::arg("mu"), py::arg("r"),
          py::arg("depth"), py::arg("tol") = 1e-6);
}
