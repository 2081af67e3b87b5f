#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "frontlab/errors.hpp"
#include "frontlab/graph.hpp"
#include "frontlab/phase_plane.hpp"
#include "frontlab/scenarios.hpp"
#include "frontlab/solver.hpp"
#include "frontlab/spectral.hpp"
#include "frontlab/stationary.hpp"

namespace py = pybind11;
using namespace frontlab;

namespace {

std::vector<std::string> verdict_names(const Row& row) {
    std::vector<std::string> out;
    for (auto v : row) out.emplace_back(to_string(v));
    return out;
}

}  // namespace

PYBIND11_MODULE(_frontlab, m) {
    m.doc() = "Bistable fronts on metric graphs: propagation, blocking and invasion.";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = error;
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetString(error.ptr(), e.what());
        }
    });

    py::class_<Bistable>(m, "Bistable")
        .def_property_readonly("name", &Bistable::name)
        .def_property_readonly("a", &Bistable::a)
        .def_property_readonly("beta", &Bistable::beta)
        .def_property_readonly("F1", &Bistable::F1)
        .def_property_readonly("Fa", &Bistable::Fa)
        .def_property_readonly("f_max", &Bistable::f_max)
        .def("f", &Bistable::f)
        .def("F", &Bistable::F);
    m.def("make_cubic", &make_cubic, py::arg("a"));
    m.def("make_table", &make_table, py::arg("values"));

    py::class_<WaveProfile>(m, "WaveProfile")
        .def_readonly("speed", &WaveProfile::speed)
        .def("value", &WaveProfile::value);
    m.def("traveling_wave", [](const Bistable& b) { return traveling_wave(b); }, py::arg("b"));

    py::class_<StarCriterion>(m, "StarCriterion")
        .def_readonly("R", &StarCriterion::R)
        .def_readonly("margin", &StarCriterion::margin)
        .def_readonly("propagate", &StarCriterion::propagate);
    m.def(
        "star_criterion",
        [](const Bistable& b, const std::vector<double>& rho, int i) { return star_criterion(b, rho, i); },
        py::arg("b"), py::arg("thicknesses"), py::arg("source"));

    py::class_<MetricGraph>(m, "MetricGraph")
        .def_property_readonly("name", &MetricGraph::name)
        .def_property_readonly("num_outer", &MetricGraph::num_outer)
        .def("to_json", [](const MetricGraph& g) { return to_json(g).dump(); });
    m.def("graph_from_json", &build_graph_from_string, py::arg("text"));
    m.def("star_graph", py::overload_cast<int, double>(&star_graph), py::arg("n"), py::arg("truncation") = kDefaultTruncation);
    m.def(
        "weighted_star_graph",
        [](const std::vector<double>& rho, double truncation) { return star_graph(rho, truncation); },
        py::arg("thicknesses"), py::arg("truncation") = kDefaultTruncation);
    m.def("perturbed_star", &perturbed_star, py::arg("n"), py::arg("perimeter"), py::arg("truncation") = kDefaultTruncation);
    m.def("partial_propagation_graph", &partial_propagation_graph, py::arg("length"), py::arg("truncation") = kDefaultTruncation);
    m.def("one_way_graph", &one_way_graph, py::arg("length"), py::arg("offset"), py::arg("truncation") = kDefaultTruncation);
    m.def("random_center_graph", &random_center_graph, py::arg("seed"), py::arg("vertices"), py::arg("paths"),
          py::arg("min_length") = 1.0, py::arg("max_length") = 4.0, py::arg("truncation") = kDefaultTruncation);

    py::class_<SolverParams>(m, "SolverParams")
        .def(py::init<>())
        .def_readwrite("h", &SolverParams::h)
        .def_readwrite("dt", &SolverParams::dt)
        .def_readwrite("truncation", &SolverParams::truncation)
        .def_readwrite("tol", &SolverParams::tol)
        .def_readwrite("margin", &SolverParams::margin)
        .def_readwrite("max_steps", &SolverParams::max_steps)
        .def_readwrite("refine_short_edges", &SolverParams::refine_short_edges);

    py::class_<LimitProfile>(m, "LimitProfile")
        .def_readonly("source", &LimitProfile::source)
        .def_readonly("junction_values", &LimitProfile::junction_values)
        .def_readonly("far_values", &LimitProfile::far_values)
        .def_readonly("steps", &LimitProfile::steps)
        .def_readonly("time", &LimitProfile::time)
        .def_readonly("monotone", &LimitProfile::monotone)
        .def_property_readonly("verdicts", [](const LimitProfile& p) { return verdict_names(p.verdicts); })
        .def_property_readonly("row", [](const LimitProfile& p) { return row_string(p.verdicts); })
        .def_property_readonly("values", [](const LimitProfile& p) { return p.field.values; })
        .def("sup_deficit", &LimitProfile::sup_deficit)
        .def("invasion", [](const LimitProfile& p) { return std::string(to_string(classify_invasion(p).kind)); });
    m.def("limit_profile", &limit_profile, py::arg("graph"), py::arg("b"), py::arg("source"),
          py::arg("params") = SolverParams{});

    m.def(
        "propagation_matrix",
        [](const MetricGraph& g, const Bistable& b, const SolverParams& p) {
            const auto pm = propagation_matrix(g, b, p);
            std::vector<std::string> rows;
            for (const auto& r : pm.rows) rows.push_back(row_string(r));
            return py::dict(py::arg("rows") = rows, py::arg("triples") = pm.triples_checked,
                            py::arg("violations") = pm.violations.size(), py::arg("symmetric") = pm.symmetric());
        },
        py::arg("graph"), py::arg("b"), py::arg("params") = SolverParams{});

    m.def(
        "scan_cubic_a",
        [](int propagate_degree, int block_degree) {
            const auto s = scan_cubic_a(propagate_degree, block_degree);
            return py::dict(py::arg("a") = s.a, py::arg("lo") = s.lo, py::arg("hi") = s.hi,
                            py::arg("margin_propagate") = s.margin_propagate, py::arg("margin_block") = s.margin_block);
        },
        py::arg("propagate_degree"), py::arg("block_degree"));

    m.def(
        "neumann_eigenvalues",
        [](const std::string& text, double h, int k) {
            const auto g = build_finite_graph(nlohmann::json::parse(text));
            return neumann_spectrum(discretize(g, h), k).eigenvalues;
        },
        py::arg("graph_json"), py::arg("h"), py::arg("k"));

    m.def(
        "run_scenario",
        [](const std::string& text) {
            const auto out = run_scenario(nlohmann::json::parse(text));
            return py::dict(py::arg("status") = out.status, py::arg("csv") = out.csv, py::arg("messages") = out.messages);
        },
        py::arg("document"));
}
