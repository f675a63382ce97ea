#include "streammvc/error.hpp"
#include "streammvc/harness.hpp"
#include "streammvc/io.hpp"
#include "streammvc/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace smvc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming incomplete multi-view clustering: consensus updates, labeling and metrics.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "thin_svd",
      [](const Matrix& a) {
        ThinSvd s = thin_svd(a);
        return py::make_tuple(s.u, s.sigma, s.vt);
      },
      py::arg("m"), "Thin SVD with deterministic signs; returns (u, sigma, vt).");
  m.def("solve_trace_max", &solve_trace_max, py::arg("g"),
        "Column-orthonormal Q maximizing trace(Q.T @ g).");

  py::class_<ViewBatch>(m, "ViewBatch")
      .def(py::init([](Matrix data, std::vector<SampleId> ids, std::size_t view_index) {
             ViewBatch v{view_index, std::move(data), std::move(ids)};
             v.validate();
             return v;
           }),
           py::arg("data"), py::arg("ids"), py::arg("view_index") = 1)
      .def_readwrite("view_index", &ViewBatch::view_index)
      .def_readwrite("data", &ViewBatch::data)
      .def_readwrite("ids", &ViewBatch::ids);

  m.def(
      "register_view",
      [](const std::vector<SampleId>& registry, const ViewBatch& batch) {
        auto [reg, ind] = register_view(SampleRegistry(registry), batch);
        return py::make_tuple(reg.ids(), ind.m1_dense(), ind.m2_dense());
      },
      py::arg("registry"), py::arg("batch"),
      "Returns (updated ids, M1, M2) with the indicator matrices in dense form.");

  py::class_<Partition>(m, "Partition")
      .def(py::init([](std::vector<int> labels, int k) {
             Partition p{std::move(labels), k};
             p.validate();
             return p;
           }),
           py::arg("labels"), py::arg("k"))
      .def_readonly("labels", &Partition::labels)
      .def_readonly("k", &Partition::k);

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("acc", &MetricReport::acc)
      .def_readonly("nmi", &MetricReport::nmi)
      .def_readonly("purity", &MetricReport::purity)
      .def_readonly("fscore", &MetricReport::fscore)
      .def("__repr__", [](const MetricReport& r) {
        return "MetricReport(acc=" + std::to_string(r.acc) + ", nmi=" + std::to_string(r.nmi) +
               ", purity=" + std::to_string(r.purity) + ", fscore=" + std::to_string(r.fscore) + ")";
      });

  m.def("acc", &acc, py::arg("truth"), py::arg("pred"));
  m.def("nmi", &nmi, py::arg("truth"), py::arg("pred"));
  m.def("purity", &purity, py::arg("truth"), py::arg("pred"));
  m.def("fscore", &fscore, py::arg("truth"), py::arg("pred"));
  m.def("evaluate", &evaluate, py::arg("truth"), py::arg("pred"));
  m.def(
      "kmeans",
      [](const Matrix& points, int k, std::uint64_t seed) {
        KMeansResult r = kmeans(points, k, seed);
        return py::make_tuple(r.partition, r.inertia);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0,
      "k-means on the columns of points; returns (partition, inertia).");

  py::enum_<InitMethod>(m, "InitMethod").value("svd", InitMethod::svd).value("random", InitMethod::random);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("epsilon", &SolverConfig::epsilon)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("init", &SolverConfig::init)
      .def_readwrite("dense_indicators", &SolverConfig::dense_indicators)
      .def_readwrite("majorize_absent", &SolverConfig::majorize_absent);

  py::class_<LabelConfig>(m, "LabelConfig")
      .def(py::init<>())
      .def_readwrite("k", &LabelConfig::k)
      .def_readwrite("restarts", &LabelConfig::restarts)
      .def_readwrite("seed", &LabelConfig::seed)
      .def_readwrite("normalize", &LabelConfig::normalize);

  py::class_<SolveDiagnostics>(m, "SolveDiagnostics")
      .def_readonly("objective_trace", &SolveDiagnostics::objective_trace)
      .def_readonly("iters", &SolveDiagnostics::iters)
      .def_readonly("converged", &SolveDiagnostics::converged)
      .def_readonly("lower_bound", &SolveDiagnostics::lower_bound);

  py::class_<ConsensusState>(m, "ConsensusState")
      .def_readonly("z", &ConsensusState::z)
      .def_readonly("k", &ConsensusState::k)
      .def_readonly("views_seen", &ConsensusState::views_seen)
      .def_readonly("last_diag", &ConsensusState::last_diag)
      .def_property_readonly("ids", [](const ConsensusState& s) { return s.registry.ids(); });

  m.def("init_first_view", &init_first_view, py::arg("batch"), py::arg("k"), py::arg("cfg") = SolverConfig{});
  m.def("integrate_view", &integrate_view, py::arg("state"), py::arg("batch"), py::arg("cfg") = SolverConfig{});
  m.def("run_stream", &run_stream, py::arg("views"), py::arg("k"), py::arg("cfg") = SolverConfig{});
  m.def("lower_bound", &lower_bound, py::arg("n_prev"), py::arg("k"));
  m.def("final_labels", py::overload_cast<const ConsensusState&, const LabelConfig&>(&final_labels),
        py::arg("state"), py::arg("cfg") = LabelConfig{});

  m.def(
      "generate_synthetic",
      [](std::size_t n, int k, std::vector<Index> dims, double separation, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.n = n;
        spec.k = k;
        spec.dims = std::move(dims);
        spec.separation = separation;
        spec.seed = seed;
        SyntheticData d = generate_synthetic(spec);
        return py::make_tuple(d.views, d.labels.ids, d.labels.truth);
      },
      py::arg("n"), py::arg("k"), py::arg("dims"), py::arg("separation") = 10.0, py::arg("seed") = 0,
      "Returns (views, ids, truth partition aligned with ids).");
  m.def(
      "apply_missing",
      [](const std::vector<ViewBatch>& views, double ratio, std::uint64_t seed) {
        auto [out, pattern] = apply_missing(views, ratio, seed);
        return py::make_tuple(out, pattern.dropped);
      },
      py::arg("views"), py::arg("ratio"), py::arg("seed") = 0,
      "Returns (incomplete views, dropped ids per view).");

  m.def("save_checkpoint", &io::save_checkpoint, py::arg("path"), py::arg("state"));
  m.def("load_checkpoint", &io::load_checkpoint, py::arg("path"));

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
