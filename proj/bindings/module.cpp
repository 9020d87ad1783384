#include "netdag/bcd.hpp"
#include "netdag/glasso.hpp"
#include "netdag/lasso.hpp"
#include "netdag/metrics.hpp"
#include "netdag/model.hpp"
#include "netdag/simulate.hpp"
#include "netdag/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace netdag;

namespace {

DataMatrix data_from_array(const Matrix& values,
                           std::optional<std::vector<std::string>> column_labels) {
  if (column_labels) {
    std::vector<std::string> rows;
    rows.reserve(values.rows());
    for (Index i = 0; i < values.rows(); ++i) rows.push_back("r" + std::to_string(i));
    return DataMatrix::make(values, std::move(*column_labels), std::move(rows));
  }
  return DataMatrix::from_values(values);
}

FitConfig make_config(double lambda1, double lambda2, double tol, int max_iter,
                      std::optional<std::vector<Index>> ordering, bool benchmark) {
  FitConfig cfg;
  cfg.penalties = PenaltyConfig{lambda1, lambda2};
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.ordering = std::move(ordering);
  cfg.benchmark_identity_theta = benchmark;
  return cfg;
}

BoolMatrix bool_from_double(const Matrix& m) {
  BoolMatrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j) != 0.0;
  return out;
}

Matrix double_from_bool(const BoolMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = m(i, j) ? 1.0 : 0.0;
  return out;
}

}  // namespace

PYBIND11_MODULE(_netdag, m) {
  m.doc() = "Sparse Gaussian DAG learning from network-correlated observations";
  m.attr("__version__") = kVersion;

  py::class_<DagParams>(m, "DagParams")
      .def_readonly("b", &DagParams::b)
      .def_readonly("omega_sq", &DagParams::omega_sq)
      .def_property_readonly("support", [](const DagParams& d) { return double_from_bool(d.support()); })
      .def_property_readonly("edge_count", &DagParams::edge_count)
      .def_static("make", &DagParams::make, py::arg("b"), py::arg("omega_sq"));

  py::class_<Reparam>(m, "Reparam")
      .def_readonly("phi", &Reparam::phi)
      .def_readonly("rho_sq", &Reparam::rho_sq)
      .def_static("from_dag", &Reparam::from_dag)
      .def("to_dag", &Reparam::to_dag);

  py::class_<RowPrecision>(m, "RowPrecision")
      .def_readonly("theta", &RowPrecision::theta)
      .def_readonly("sigma", &RowPrecision::sigma)
      .def_readonly("chol_lower", &RowPrecision::chol_lower)
      .def_static("from_theta", &RowPrecision::from_theta)
      .def_static("identity", &RowPrecision::identity);

  py::class_<DataMatrix>(m, "DataMatrix")
      .def(py::init(&data_from_array), py::arg("values"), py::arg("column_labels") = std::nullopt)
      .def_readonly("values", &DataMatrix::values)
      .def_readonly("column_labels", &DataMatrix::column_labels)
      .def_readonly("row_labels", &DataMatrix::row_labels);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("dag", &FitResult::dag)
      .def_readonly("reparam", &FitResult::reparam)
      .def_readonly("row_precision", &FitResult::row_precision)
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations);

  py::class_<SolutionPath>(m, "SolutionPath")
      .def_readonly("lambdas", &SolutionPath::lambdas)
      .def_readonly("fits", &SolutionPath::fits)
      .def_readonly("bic_values", &SolutionPath::bic_values)
      .def_readonly("selected_index", &SolutionPath::selected_index)
      .def_property_readonly("selected",
                             [](const SolutionPath& p) { return p.fits.at(p.selected_index); });

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("dag", &GroundTruth::dag)
      .def_readonly("row_precision", &GroundTruth::row_precision)
      .def_property_readonly("mask", [](const GroundTruth& g) { return double_from_bool(g.mask.adjacency); })
      .def_readonly("psi", &GroundTruth::psi)
      .def_readonly("data", &GroundTruth::data);

  py::class_<EdgeConfusion>(m, "EdgeConfusion")
      .def_readonly("predicted", &EdgeConfusion::predicted)
      .def_readonly("true_positive", &EdgeConfusion::true_positive)
      .def_readonly("false_positive", &EdgeConfusion::false_positive)
      .def_readonly("false_negative", &EdgeConfusion::false_negative)
      .def_readonly("reversed", &EdgeConfusion::reversed)
      .def_readonly("s0", &EdgeConfusion::s0)
      .def_property_readonly("fdr", &EdgeConfusion::fdr)
      .def_property_readonly("jaccard", &EdgeConfusion::jaccard)
      .def_property_readonly("shd", &EdgeConfusion::shd);

  py::class_<RocCurve>(m, "RocCurve")
      .def_readonly("thresholds", &RocCurve::thresholds)
      .def_readonly("points", &RocCurve::points)
      .def_readonly("auc", &RocCurve::auc);

  m.def(
      "random_dag",
      [](Index p, Index num_edges, std::pair<double, double> weight_range,
         std::pair<double, double> omega_range, std::uint64_t seed) {
        return random_dag(DagSpec{p, num_edges, weight_range, omega_range, seed});
      },
      py::arg("p"), py::arg("num_edges"), py::arg("weight_range") = std::pair<double, double>{0.1, 1.0},
      py::arg("omega_range") = std::pair<double, double>{0.1, 1.0}, py::arg("seed") = 0);

  m.def(
      "build_covariance",
      [](const std::string& family, Index block_size, Index num_blocks, std::uint64_t seed) {
        CovSpec spec;
        spec.family = cov_family_from_string(family);
        spec.block_size = block_size;
        spec.num_blocks = num_blocks;
        spec.seed = seed;
        return build_covariance(spec);
      },
      py::arg("family"), py::arg("block_size"), py::arg("num_blocks"), py::arg("seed") = 0);

  m.def("network_precision", &network_precision, py::arg("edges"), py::arg("n"),
        py::arg("value_range") = std::pair<double, double>{-5.0, 5.0}, py::arg("seed") = 0);

  m.def("sample_sem", &sample_sem, py::arg("dag"), py::arg("row_precision"), py::arg("n"),
        py::arg("seed") = 0);

  m.def("replicate_dag", &replicate_dag, py::arg("base"), py::arg("copies"),
        py::arg("omega_range") = std::pair<double, double>{0.1, 1.0}, py::arg("seed") = 0);

  m.def("psi_from_dag", &psi_from_dag);

  m.def(
      "support_mask",
      [](const Matrix& theta, double tol) { return double_from_bool(SupportMask::from_support(theta, tol).adjacency); },
      py::arg("theta"), py::arg("tol") = 0.0);

  m.def(
      "fit",
      [](const DataMatrix& x, const Matrix& mask, double lambda1, double lambda2, double tol,
         int max_iter, std::optional<std::vector<Index>> ordering, bool benchmark) {
        return fit(x, SupportMask::make(bool_from_double(mask)),
                   make_config(lambda1, lambda2, tol, max_iter, std::move(ordering), benchmark));
      },
      py::arg("x"), py::arg("mask"), py::arg("lambda1"), py::arg("lambda2") = 0.01,
      py::arg("tol") = 1e-4, py::arg("max_iter") = 50, py::arg("ordering") = std::nullopt,
      py::arg("benchmark") = false);

  m.def(
      "solution_path",
      [](const DataMatrix& x, const Matrix& mask, int num_points, double lambda2, double tol,
         int max_iter, std::optional<std::vector<Index>> ordering, bool benchmark) {
        return solution_path(x, SupportMask::make(bool_from_double(mask)),
                             make_config(0.0, lambda2, tol, max_iter, std::move(ordering), benchmark),
                             num_points);
      },
      py::arg("x"), py::arg("mask"), py::arg("num_points") = 20, py::arg("lambda2") = 0.01,
      py::arg("tol") = 1e-4, py::arg("max_iter") = 50, py::arg("ordering") = std::nullopt,
      py::arg("benchmark") = false);

  m.def(
      "restricted_mle",
      [](const DataMatrix& x, const Matrix& dag_support, const Matrix& mask) {
        return restricted_mle(x, bool_from_double(dag_support),
                              SupportMask::make(bool_from_double(mask)));
      },
      py::arg("x"), py::arg("dag_support"), py::arg("mask"));

  m.def(
      "fit_sigma_unordered",
      [](const DataMatrix& x, const Matrix& mask, double lambda1, double lambda2, double tol,
         int max_iter, std::int64_t seed) {
        return fit_sigma_unordered(x, SupportMask::make(bool_from_double(mask)),
                                   make_config(lambda1, lambda2, tol, max_iter, std::nullopt, false),
                                   seed);
      },
      py::arg("x"), py::arg("mask"), py::arg("lambda1"), py::arg("lambda2") = 0.01,
      py::arg("tol") = 1e-4, py::arg("max_iter") = 50, py::arg("seed") = 0);

  m.def("decorrelate", &decorrelate, py::arg("x"), py::arg("row_precision"));

  m.def(
      "lambda_max",
      [](const DataMatrix& x, const RowPrecision& rp) { return lambda_max(x, rp); },
      py::arg("x"), py::arg("row_precision"));

  m.def("update_rho", &update_rho, py::arg("a"), py::arg("b"), py::arg("n"));
  m.def("s_matrix", &s_matrix, py::arg("x"), py::arg("reparam"));
  m.def("neg_log_likelihood", &neg_log_likelihood, py::arg("x"), py::arg("reparam"),
        py::arg("row_precision"));
  m.def(
      "objective",
      [](const DataMatrix& x, const Reparam& r, const RowPrecision& rp, double lambda1,
         double lambda2) { return objective(x, r, rp, PenaltyConfig{lambda1, lambda2}); },
      py::arg("x"), py::arg("reparam"), py::arg("row_precision"), py::arg("lambda1"),
      py::arg("lambda2"));
  m.def("bic_score", &bic_score, py::arg("x"), py::arg("reparam"), py::arg("row_precision"),
        py::arg("include_theta_df") = true);

  m.def(
      "threshold_dag",
      [](const Matrix& b_hat, double tau) { return double_from_bool(threshold_dag(b_hat, tau)); },
      py::arg("b_hat"), py::arg("tau"));
  m.def(
      "confusion",
      [](const Matrix& pred, const Matrix& truth) {
        return confusion(bool_from_double(pred), bool_from_double(truth));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "roc_sweep",
      [](const Matrix& b_hat, const Matrix& truth, int num_thresholds) {
        return roc_sweep(b_hat, bool_from_double(truth), num_thresholds);
      },
      py::arg("b_hat"), py::arg("truth"), py::arg("num_thresholds") = 50);
  m.def("match_predicted_count", &match_predicted_count, py::arg("b_hat_a"), py::arg("b_hat_b"),
        py::arg("target"));
}
