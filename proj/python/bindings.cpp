#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smoothchol/errors.hpp"
#include "smoothchol/metrics.hpp"
#include "smoothchol/prox.hpp"
#include "smoothchol/scfit.hpp"
#include "smoothchol/simgen.hpp"
#include "smoothchol/tuning.hpp"

namespace py = pybind11;
using namespace smoothchol;

namespace {

FitConfig make_config(double epsilon, int max_iter, std::optional<int> band, const std::string& path) {
  FitConfig c;
  c.epsilon = epsilon;
  c.max_iter = max_iter;
  c.band = band;
  c.path = parse_coeff_path(path);
  return c;
}

SampleCov make_cov(const Matrix& x, bool is_covariance, std::optional<int> n) {
  return is_covariance ? SampleCov::from_matrix(x, n) : SampleCov::from_data(x);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Smooth Cholesky estimation of covariance and precision matrices";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<CholFactor>(m, "CholFactor")
      .def(py::init<std::vector<Vector>>(), py::arg("diagonals"))
      .def_static("from_dense", &CholFactor::from_dense, py::arg("lower"))
      .def_static("identity", &CholFactor::identity, py::arg("p"))
      .def_property_readonly("dim", &CholFactor::dim)
      .def_property_readonly("bandwidth", &CholFactor::bandwidth)
      .def("diagonal", &CholFactor::diagonal, py::arg("i"))
      .def("dense", &CholFactor::dense)
      .def("precision", [](const CholFactor& L) { return precision(L); })
      .def("covariance", [](const CholFactor& L) { return covariance(L); })
      .def("__repr__", [](const CholFactor& L) {
        return "<CholFactor p=" + std::to_string(L.dim()) + " bandwidth=" + std::to_string(L.bandwidth()) + ">";
      });

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("L", &FitResult::L)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("objective_trace", &FitResult::objective_trace)
      .def_readonly("final_gap", &FitResult::final_gap)
      .def_readonly("band", &FitResult::band)
      .def_property_readonly("path", [](const FitResult& r) { return to_string(r.path); });

  m.def(
      "fit",
      [](const Matrix& x, const std::string& penalty, double lam, double lam1, bool is_covariance,
         std::optional<int> n, double epsilon, int max_iter, std::optional<int> band, const std::string& path) {
        const SampleCov S = make_cov(x, is_covariance, n);
        const FitConfig cfg = make_config(epsilon, max_iter, band, path);
        py::gil_scoped_release release;
        return fit(S, PenaltySpec{parse_penalty_family(penalty), lam, lam1}, cfg);
      },
      py::arg("x"), py::arg("penalty") = "fused", py::arg("lam") = 0.0, py::arg("lam1") = 0.0,
      py::arg("is_covariance") = false, py::arg("n") = py::none(), py::arg("epsilon") = 1e-4,
      py::arg("max_iter") = 500, py::arg("band") = py::none(), py::arg("path") = "auto",
      "Fit the penalized Cholesky factor to a data matrix (rows are observations) or a covariance matrix.");

  m.def(
      "objective",
      [](const Matrix& S, const CholFactor& L, const std::string& penalty, double lam, double lam1) {
        return objective(SampleCov::from_matrix(S), L, PenaltySpec{parse_penalty_family(penalty), lam, lam1});
      },
      py::arg("S"), py::arg("L"), py::arg("penalty") = "fused", py::arg("lam") = 0.0, py::arg("lam1") = 0.0);

  py::class_<TuneResult>(m, "TuneResult")
      .def_readonly("lam", &TuneResult::lambda)
      .def_readonly("lam1", &TuneResult::lambda1)
      .def_property_readonly("best_fit", [](const TuneResult& t) { return t.best_fit; })
      .def_property_readonly("scores", [](const TuneResult& t) {
        py::list rows;
        for (const TuneRow& r : t.table) rows.append(py::make_tuple(r.lambda, r.lambda1, r.score, r.converged));
        return rows;
      });

  m.def(
      "tune",
      [](const Matrix& data, const std::string& penalty, std::optional<std::vector<double>> lambdas,
         std::vector<double> lambda1s, const std::string& criterion, int folds, std::uint64_t seed, double epsilon,
         int max_iter, std::optional<int> band) {
        TuneGrid grid;
        if (lambdas) grid.lambdas = *lambdas;
        grid.lambda1s = std::move(lambda1s);
        grid.criterion = parse_criterion(criterion);
        grid.folds = folds;
        grid.seed = seed;
        const FitConfig cfg = make_config(epsilon, max_iter, band, "auto");
        py::gil_scoped_release release;
        return tune(data, parse_penalty_family(penalty), grid, cfg);
      },
      py::arg("data"), py::arg("penalty") = "fused", py::arg("lambdas") = py::none(),
      py::arg("lambda1s") = std::vector<double>{}, py::arg("criterion") = "bic", py::arg("folds") = 5,
      py::arg("seed") = 1, py::arg("epsilon") = 1e-4, py::arg("max_iter") = 500, py::arg("band") = py::none());

  m.def(
      "make_truth",
      [](const std::string& case_id, int p, std::uint64_t seed) {
        const ModifiedChol tl = make_truth(CaseSpec{parse_case_id(case_id), p, seed});
        return py::make_tuple(tl.T, tl.lambda);
      },
      py::arg("case"), py::arg("p"), py::arg("seed") = 1, "Return (T, innovation variances) of a simulation design.");
  m.def(
      "simulate",
      [](const std::string& case_id, int p, int n, std::uint64_t seed) {
        const CholFactor L = from_modified(make_truth(CaseSpec{parse_case_id(case_id), p, seed}));
        return sample_gaussian(L, n, seed);
      },
      py::arg("case"), py::arg("p"), py::arg("n"), py::arg("seed") = 1);
  m.def("standardize", &standardize, py::arg("data"));
  m.def(
      "modified_cholesky",
      [](const CholFactor& L) {
        const ModifiedChol tl = to_modified(L);
        return py::make_tuple(tl.T, tl.lambda);
      },
      py::arg("L"));

  m.def(
      "matrix_error",
      [](const Matrix& a, const Matrix& b, const std::string& norm) { return matrix_error(a, b, parse_matrix_norm(norm)); },
      py::arg("estimate"), py::arg("truth"), py::arg("norm") = "frob_scaled");
  m.def("kl_loss", &kl_loss, py::arg("omega_hat"), py::arg("sigma_true"));
  m.def("total_variation", &total_variation, py::arg("g"));
  m.def("conditional_forecast", &conditional_forecast, py::arg("mu"), py::arg("sigma"), py::arg("x1"),
        py::arg("split"));
  m.def(
      "forecast_error",
      [](const Matrix& pred, const Matrix& actual) {
        const ForecastError fe = forecast_error(pred, actual);
        return py::make_tuple(fe.per_column, fe.aggregate);
      },
      py::arg("predictions"), py::arg("actuals"));

  m.def("solve_fused", &solve_fused, py::arg("C"), py::arg("y"), py::arg("lam"));
  m.def("solve_sparse_fused", &solve_sparse_fused, py::arg("C"), py::arg("y"), py::arg("lam"), py::arg("lam1"));
  m.def(
      "solve_trend", [](const Vector& C, const Vector& y, double lam) { return solve_trend(C, y, lam); },
      py::arg("C"), py::arg("y"), py::arg("lam"));
  m.def("solve_hp", &solve_hp, py::arg("C"), py::arg("y"), py::arg("lam"));
}
