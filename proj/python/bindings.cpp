#include "cass/baselines.hpp"
#include "cass/data.hpp"
#include "cass/evaluation.hpp"
#include "cass/segmentation.hpp"
#include "cass/trace_lasso.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace cass;

PYBIND11_MODULE(_cass, m) {
  m.doc() = "Trace Lasso subspace segmentation (samples are columns)";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<CsvError>(m, "CsvError", PyExc_OSError);
  py::register_exception<IdxError>(m, "IdxError", PyExc_OSError);

  m.def("nuclear_norm", &nuclear_norm, py::arg("M"));
  m.def("svt", &svt, py::arg("M"), py::arg("tau"));
  m.def("pca_project", &pca_project, py::arg("X"), py::arg("p"));
  m.def("normalize_columns", &normalize_columns, py::arg("X"));

  py::class_<AdmConfig>(m, "AdmConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &AdmConfig::lambda)
      .def_readwrite("mu0", &AdmConfig::mu0)
      .def_readwrite("rho", &AdmConfig::rho)
      .def_readwrite("mu_max", &AdmConfig::mu_max)
      .def_readwrite("eps", &AdmConfig::eps)
      .def_readwrite("max_iter", &AdmConfig::max_iter);

  py::class_<AdmResult>(m, "AdmResult")
      .def_readonly("w", &AdmResult::w)
      .def_readonly("J", &AdmResult::J)
      .def_readonly("iterations", &AdmResult::iterations)
      .def_readonly("converged", &AdmResult::converged)
      .def_readonly("final_residual", &AdmResult::final_residual)
      .def_readonly("objective", &AdmResult::objective);

  m.def("trace_lasso_norm", &trace_lasso_norm, py::arg("X"), py::arg("w"));
  m.def(
      "solve_noisy",
      [](const Matrix& X, const Vector& y, double lambda, std::optional<AdmConfig> config) {
        AdmConfig c = config.value_or(AdmConfig{});
        c.lambda = lambda;
        py::gil_scoped_release release;
        return solve_noisy(X, y, c);
      },
      py::arg("X"), py::arg("y"), py::arg("lambda_") = 0.1, py::arg("config") = py::none());
  m.def(
      "solve_exact",
      [](const Matrix& X, const Vector& y, double lambda, int steps) {
        AdmConfig c;
        c.lambda = lambda;
        py::gil_scoped_release release;
        return solve_exact(X, y, c, steps);
      },
      py::arg("X"), py::arg("y"), py::arg("lambda_") = 1e-2, py::arg("continuation_steps") = 4);

  m.def("solve_lsr", &solve_lsr, py::arg("X"), py::arg("y"), py::arg("lambda_"));
  m.def(
      "solve_ssc",
      [](const Matrix& X, const Vector& y, double lambda) {
        const SscResult r = solve_ssc(X, y, lambda);
        return py::make_tuple(r.w, r.converged);
      },
      py::arg("X"), py::arg("y"), py::arg("lambda_"), "Returns (w, converged).");
  m.def(
      "solve_lrr",
      [](const Matrix& X, double lambda) {
        const LrrResult r = solve_lrr(X, lambda);
        return py::make_tuple(r.W, r.E, r.converged);
      },
      py::arg("X"), py::arg("lambda_"), "Returns (W, E, converged).");

  py::class_<SegmentationConfig>(m, "SegmentationConfig")
      .def(py::init([](const std::string& method, int k, double lambda, std::uint64_t seed, int workers) {
             SegmentationConfig c;
             c.method = parse_method(method);
             c.k = k;
             c.lambda = lambda;
             c.seed = seed;
             c.workers = workers;
             return c;
           }),
           py::arg("method") = "cass", py::arg("k") = 2, py::arg("lambda_") = 0.1, py::arg("seed") = 0,
           py::arg("workers") = 1)
      .def_property(
          "method", [](const SegmentationConfig& c) { return to_string(c.method); },
          [](SegmentationConfig& c, const std::string& s) { c.method = parse_method(s); })
      .def_readwrite("k", &SegmentationConfig::k)
      .def_readwrite("lambda_", &SegmentationConfig::lambda)
      .def_readwrite("adm", &SegmentationConfig::adm)
      .def_readwrite("knn_neighbors", &SegmentationConfig::knn_neighbors)
      .def_readwrite("kmeans_restarts", &SegmentationConfig::kmeans_restarts)
      .def_readwrite("seed", &SegmentationConfig::seed)
      .def_readwrite("workers", &SegmentationConfig::workers);

  m.def(
      "coefficient_matrix",
      [](const Matrix& X, const SegmentationConfig& config) {
        py::gil_scoped_release release;
        const CoefficientMatrix W = coefficient_matrix(X, config);
        return std::make_pair(W.W, W.all_converged());
      },
      py::arg("X"), py::arg("config"), "Returns (W, all_converged).");
  m.def(
      "affinity", [](const Matrix& W) { return affinity(W).A; }, py::arg("W"));
  m.def(
      "spectral_cluster",
      [](const Matrix& A, int k, int restarts, std::uint64_t seed) { return spectral_cluster({A}, k, restarts, seed); },
      py::arg("A"), py::arg("k"), py::arg("restarts") = 50, py::arg("seed") = 0);
  m.def(
      "segment",
      [](const Matrix& X, const SegmentationConfig& config) {
        py::gil_scoped_release release;
        return segment(X, config).labels;
      },
      py::arg("X"), py::arg("config"));

  m.def("accuracy", &accuracy, py::arg("predicted"), py::arg("truth"));
  py::class_<ErrorStats>(m, "ErrorStats")
      .def_readonly("max", &ErrorStats::max)
      .def_readonly("mean", &ErrorStats::mean)
      .def_readonly("std", &ErrorStats::std);
  m.def("error_stats", &error_stats, py::arg("errors"));

  py::class_<LabeledData>(m, "LabeledData")
      .def_readonly("X", &LabeledData::X)
      .def_readonly("labels", &LabeledData::labels)
      .def_readonly("source", &LabeledData::source);
  m.def(
      "gen_synthetic",
      [](int k, int dim, int ambient, int per, double sigma, std::uint64_t seed, bool independent, double corr) {
        SyntheticSpec spec = SyntheticSpec::uniform(k, dim, ambient, per, sigma, seed);
        spec.independent = independent;
        spec.within_correlation = corr;
        return gen_synthetic(spec);
      },
      py::arg("k") = 3, py::arg("dim") = 4, py::arg("ambient") = 30, py::arg("per") = 20, py::arg("sigma") = 0.0,
      py::arg("seed") = 0, py::arg("independent") = true, py::arg("correlation") = 0.0);
  m.def("load_idx", &load_idx, py::arg("images"), py::arg("labels"));
  m.def(
      "load_csv",
      [](const std::filesystem::path& path, bool samples_as_rows, bool header) {
        return load_csv(path, samples_as_rows ? CsvOrientation::samples_as_rows : CsvOrientation::samples_as_columns,
                        header);
      },
      py::arg("path"), py::arg("samples_as_rows") = true, py::arg("header") = false);
}
