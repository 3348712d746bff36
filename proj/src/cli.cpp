#include "smoothchol/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "smoothchol/errors.hpp"
#include "smoothchol/io.hpp"
#include "smoothchol/metrics.hpp"
#include "smoothchol/scfit.hpp"
#include "smoothchol/simgen.hpp"
#include "smoothchol/tuning.hpp"

namespace smoothchol {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSampleSeedMix = 0x9E3779B97F4A7C15ULL;

struct DataOptions {
  std::string file;
  bool header = false;
  bool transpose = false;
  bool standardize = true;
};

struct SolverOptions {
  std::string penalty = "fused";
  double lambda = 0.0;
  double lambda1 = 0.0;
  std::string band = "all";
  double tol = 1e-4;
  int max_iter = 500;
  std::string path = "auto";
  std::string init = "sqrtdiag";
};

void add_data_flags(CLI::App* cmd, DataOptions& d, const std::string& flag) {
  cmd->add_option(flag, d.file, "numeric CSV, rows are observations");
  cmd->add_flag("--header", d.header, "skip the first line of the CSV");
  cmd->add_flag("--transpose", d.transpose, "CSV rows are variables");
}

void add_solver_flags(CLI::App* cmd, SolverOptions& s, bool with_lambda) {
  cmd->add_option("--penalty", s.penalty, "fused | trend | hp | sparse-fused | none");
  if (with_lambda) {
    cmd->add_option("--lambda", s.lambda, "smoothness weight");
    cmd->add_option("--lambda1", s.lambda1, "sparsity weight (sparse-fused)");
  }
  cmd->add_option("--band", s.band, "number of swept subdiagonals, or 'all'");
  cmd->add_option("--tol", s.tol, "stopping tolerance on the sweep change");
  cmd->add_option("--max-iter", s.max_iter, "maximum number of sweeps");
  cmd->add_option("--path", s.path, "dense | lowrank | auto");
  cmd->add_option("--init", s.init, "sqrtdiag | identity");
}

FitConfig make_config(const SolverOptions& s) {
  FitConfig config;
  config.epsilon = s.tol;
  config.max_iter = s.max_iter;
  if (s.band != "all") {
    try {
      std::size_t used = 0;
      config.band = std::stoi(s.band, &used);
      if (used != s.band.size()) throw std::invalid_argument(s.band);
    } catch (const std::logic_error&) {
      throw UsageError("--band takes an integer or 'all', got '" + s.band + "'");
    }
  }
  config.path = parse_coeff_path(s.path);
  if (s.init == "sqrtdiag") {
    config.init = InitRule::SqrtDiag;
  } else if (s.init == "identity") {
    config.init = InitRule::Identity;
  } else {
    throw UsageError("--init takes sqrtdiag or identity, got '" + s.init + "'");
  }
  return config;
}

PenaltySpec make_penalty(const SolverOptions& s) {
  PenaltySpec penalty{parse_penalty_family(s.penalty), s.lambda, s.lambda1};
  penalty.validate();
  return penalty;
}

Matrix load_data(const DataOptions& d) {
  if (d.file.empty()) throw UsageError("no data file given");
  Matrix data = read_csv(d.file, CsvOptions{d.header, d.transpose});
  return d.standardize ? standardize(data) : data;
}

void record(Manifest& m, const DataOptions& d, const std::string& key) {
  m.set(key, d.file.empty() ? std::string() : fs::absolute(d.file).string());
  m.set("header", d.header ? 1 : 0);
  m.set("transpose", d.transpose ? 1 : 0);
  m.set("standardize", d.standardize ? 1 : 0);
}

void record(Manifest& m, const SolverOptions& s) {
  m.set("penalty", s.penalty);
  m.set("lambda", s.lambda);
  m.set("lambda1", s.lambda1);
  m.set("band", s.band);
  m.set("tol", s.tol);
  m.set("max_iter", s.max_iter);
  m.set("path", s.path);
  m.set("init", s.init);
}

void record_versions(Manifest& m, const std::string& command) {
  m.set("command", command);
  m.set("version", kVersion);
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  m.set("eigen", eigen.str());
}

void write_fit_outputs(const fs::path& dir, const FitResult& result, bool triplets) {
  const Matrix L = result.L.dense();
  if (triplets) {
    write_triplets(dir / "L.trp", L);
  } else {
    write_csv(dir / "L.csv", L);
  }
  const ModifiedChol tl = to_modified(result.L);
  write_csv(dir / "T.csv", tl.T);
  write_csv(dir / "Lambda.csv", tl.lambda);
  write_csv(dir / "Omega.csv", precision(result.L));
  write_csv(dir / "Sigma.csv", covariance(result.L));
  Matrix trace(static_cast<Eigen::Index>(result.objective_trace.size()), 2);
  for (std::size_t k = 0; k < result.objective_trace.size(); ++k) {
    trace(static_cast<Eigen::Index>(k), 0) = static_cast<double>(k + 1);
    trace(static_cast<Eigen::Index>(k), 1) = result.objective_trace[k];
  }
  write_csv(dir / "trace.csv", trace, {"iteration", "objective"});
}

void record_result(Manifest& m, const FitResult& r) {
  m.set("result.converged", r.converged ? 1 : 0);
  m.set("result.iterations", r.iterations);
  m.set("result.final_gap", r.final_gap);
  m.set("result.objective", r.objective_trace.empty() ? 0.0 : r.objective_trace.back());
  m.set("result.path", to_string(r.path));
  m.set("result.band", r.band);
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  fs::create_directories(out);
  return out;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string case_name = "A";
  int p = 50;
  int n = 100;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const CaseSpec spec{parse_case_id(a.case_name), a.p, a.seed};
  const ModifiedChol truth = make_truth(spec);
  const CholFactor L = from_modified(truth);
  const Matrix data = sample_gaussian(L, a.n, a.seed ^ kSampleSeedMix);
  const fs::path dir = prepare_out(a.out);
  write_csv(dir / "data.csv", data);
  write_csv(dir / "T.csv", truth.T);
  write_csv(dir / "Lambda.csv", truth.lambda);
  write_csv(dir / "L.csv", L.dense());
  Manifest m;
  record_versions(m, "simulate");
  m.set("case", to_string(spec.id));
  m.set("p", a.p);
  m.set("n", a.n);
  m.set("seed", std::to_string(a.seed));
  m.set("band", spec.band());
  m.write(dir / "manifest.txt");
  out << "wrote " << a.n << " x " << a.p << " sample of case " << to_string(spec.id) << " to " << dir.string()
      << '\n';
}

// ---- fit -------------------------------------------------------------------

struct FitArgs {
  DataOptions data;
  SolverOptions solver;
  bool triplets = false;
  std::string from_manifest;
  std::string out;
};

void load_fit_manifest(FitArgs& a) {
  const Manifest m = Manifest::read(a.from_manifest);
  if (m.contains("command") && m.get("command") != "fit") throw UsageError("manifest was not written by fit");
  auto flag = [&](const char* key) { return m.get(key) == "1"; };
  a.data.file = m.get("data");
  a.data.header = flag("header");
  a.data.transpose = flag("transpose");
  a.data.standardize = flag("standardize");
  a.solver.penalty = m.get("penalty");
  a.solver.lambda = std::stod(m.get("lambda"));
  a.solver.lambda1 = std::stod(m.get("lambda1"));
  a.solver.band = m.get("band");
  a.solver.tol = std::stod(m.get("tol"));
  a.solver.max_iter = std::stoi(m.get("max_iter"));
  a.solver.path = m.get("path");
  a.solver.init = m.get("init");
  a.triplets = flag("triplets");
}

void cmd_fit(FitArgs a, std::ostream& out) {
  if (!a.from_manifest.empty()) load_fit_manifest(a);
  const PenaltySpec penalty = make_penalty(a.solver);
  const FitConfig config = make_config(a.solver);
  const Matrix data = load_data(a.data);
  const SampleCov S = SampleCov::from_data(data);
  const FitResult result = fit(S, penalty, config);
  const fs::path dir = prepare_out(a.out);
  write_fit_outputs(dir, result, a.triplets);
  Manifest m;
  record_versions(m, "fit");
  record(m, a.data, "data");
  record(m, a.solver);
  m.set("triplets", a.triplets ? 1 : 0);
  m.set("n", static_cast<int>(data.rows()));
  m.set("p", static_cast<int>(data.cols()));
  record_result(m, result);
  m.write(dir / "manifest.txt");
  out << (result.converged ? "converged" : "stopped") << " after " << result.iterations
      << " sweeps, objective " << format_double(result.objective_trace.back()) << '\n';
}

// ---- tune ------------------------------------------------------------------

struct TuneArgs {
  DataOptions data;
  SolverOptions solver;
  std::string criterion = "bic";
  int folds = 5;
  std::string grid = "0.1:1:100";
  std::string grid1;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_tune(const TuneArgs& a, std::ostream& out) {
  const PenaltyFamily family = parse_penalty_family(a.solver.penalty);
  TuneGrid grid;
  grid.lambdas = TuneGrid::parse_range(a.grid);
  if (!a.grid1.empty()) {
    if (family != PenaltyFamily::SparseFused) throw UsageError("--grid1 applies to sparse-fused only");
    grid.lambda1s = TuneGrid::parse_range(a.grid1);
  }
  grid.folds = a.folds;
  grid.criterion = parse_criterion(a.criterion);
  grid.seed = a.seed;
  const FitConfig config = make_config(a.solver);
  const Matrix data = load_data(a.data);
  const TuneResult result = tune(data, family, grid, config);

  const fs::path dir = prepare_out(a.out);
  {
    std::ofstream scores(dir / "scores.csv");
    if (!scores) throw IoError("cannot write " + (dir / "scores.csv").string());
    write_score_table(scores, result.table);
  }
  write_fit_outputs(dir, *result.best_fit, false);
  Manifest m;
  record_versions(m, "tune");
  record(m, a.data, "data");
  record(m, a.solver);
  m.set("criterion", a.criterion);
  m.set("folds", a.folds);
  m.set("grid", a.grid);
  m.set("grid1", a.grid1);
  m.set("seed", std::to_string(a.seed));
  m.set("threads", worker_count(static_cast<int>(grid.lambdas.size())));
  m.set("selected.lambda", result.lambda);
  m.set("selected.lambda1", result.lambda1);
  m.set("failures", static_cast<int>(result.failures.size()));
  record_result(m, *result.best_fit);
  m.write(dir / "manifest.txt");
  out << "selected lambda " << format_double(result.lambda);
  if (family == PenaltyFamily::SparseFused) out << ", lambda1 " << format_double(result.lambda1);
  out << " (" << result.table.size() << " grid points, " << result.failures.size() << " failed)\n";
}

// ---- forecast --------------------------------------------------------------

struct ForecastArgs {
  DataOptions train;
  std::string test;
  int split = 0;
  SolverOptions solver;
  std::string out;
};

void cmd_forecast(const ForecastArgs& a, std::ostream& out) {
  const PenaltySpec penalty = make_penalty(a.solver);
  const FitConfig config = make_config(a.solver);
  if (a.train.file.empty() || a.test.empty()) throw UsageError("--train and --test are required");
  const CsvOptions csv{a.train.header, a.train.transpose};
  const Matrix train = read_csv(a.train.file, csv);
  const Matrix test = read_csv(a.test, csv);
  if (train.cols() != test.cols()) throw DimensionError("train and test have different numbers of columns");
  const auto p = static_cast<int>(train.cols());
  if (a.split < 1 || a.split >= p) throw DimensionError("--split must lie strictly between 0 and p");

  const Vector mu = train.colwise().mean().transpose();
  const Matrix z = standardize(train);
  const Vector sd = ((train.rowwise() - mu.transpose()).colwise().squaredNorm() / static_cast<double>(train.rows()))
                        .cwiseSqrt()
                        .transpose();
  const FitResult result = fit(SampleCov::from_data(z), penalty, config);
  const Matrix Sigma = sd.asDiagonal() * covariance(result.L) * sd.asDiagonal();

  const int q = p - a.split;
  const Matrix pred = conditional_forecast(mu, Sigma, test.leftCols(a.split), a.split);
  const Matrix actual = test.rightCols(q);
  const Matrix baseline = mu.tail(q).transpose().replicate(test.rows(), 1);
  const ForecastError fe = forecast_error(pred, actual);
  const ForecastError fe_mean = forecast_error(baseline, actual);

  const fs::path dir = prepare_out(a.out);
  write_csv(dir / "predictions.csv", pred);
  Matrix table(q, 3);
  for (int j = 0; j < q; ++j) table.row(j) << a.split + j + 1, fe.per_column(j), fe_mean.per_column(j);
  write_csv(dir / "fe.csv", table, {"t", "fe", "fe_mean"});
  Manifest m;
  record_versions(m, "forecast");
  record(m, a.train, "train");
  m.set("test", fs::absolute(a.test).string());
  m.set("split", a.split);
  record(m, a.solver);
  m.set("aggregate_fe", fe.aggregate);
  m.set("aggregate_fe_mean", fe_mean.aggregate);
  record_result(m, result);
  m.write(dir / "manifest.txt");
  out << "aggregate FE " << format_double(fe.aggregate) << " (mean predictor " << format_double(fe_mean.aggregate)
      << ")\n";
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string estimate;
  std::string truth;
  std::string metrics = "kl,frob_omega,inf_omega,frob_sigma,inf_sigma,frob_t,inf_t";
  std::string out;
  std::string fe_predictions;
  std::string fe_actuals;
  std::string fe_out;
  std::string t1_out;
  std::string t1_sign = "literal";
};

CholFactor load_factor(const fs::path& dir, std::optional<int> p) {
  if (fs::exists(dir / "L.csv")) return CholFactor::from_dense(read_csv(dir / "L.csv"));
  if (fs::exists(dir / "L.trp")) {
    if (!p) throw UsageError("a triplet factor needs the dimension from the truth");
    return CholFactor::from_dense(read_triplets(dir / "L.trp", *p));
  }
  throw IoError("no L.csv or L.trp in " + dir.string());
}

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.estimate.empty() || a.truth.empty() || a.out.empty()) {
    throw UsageError("--estimate, --truth and --out are required");
  }
  const CholFactor truth = load_factor(a.truth, std::nullopt);
  const CholFactor est = load_factor(a.estimate, truth.dim());
  if (est.dim() != truth.dim()) throw DimensionError("estimate and truth differ in dimension");

  const Matrix Omega_hat = precision(est), Omega = precision(truth);
  const Matrix Sigma_hat = covariance(est), Sigma = covariance(truth);
  const ModifiedChol tl_hat = to_modified(est), tl = to_modified(truth);
  const std::map<std::string, std::function<double()>> table{
      {"kl", [&] { return kl_loss(Omega_hat, Sigma); }},
      {"frob_omega", [&] { return matrix_error(Omega_hat, Omega, MatrixNorm::FrobScaled); }},
      {"inf_omega", [&] { return matrix_error(Omega_hat, Omega, MatrixNorm::Inf); }},
      {"frob_sigma", [&] { return matrix_error(Sigma_hat, Sigma, MatrixNorm::FrobScaled); }},
      {"inf_sigma", [&] { return matrix_error(Sigma_hat, Sigma, MatrixNorm::Inf); }},
      {"frob_t", [&] { return matrix_error(tl_hat.T, tl.T, MatrixNorm::FrobScaled); }},
      {"inf_t", [&] { return matrix_error(tl_hat.T, tl.T, MatrixNorm::Inf); }},
      {"frob_l", [&] { return matrix_error(est.dense(), truth.dense(), MatrixNorm::FrobScaled); }},
      {"inf_l", [&] { return matrix_error(est.dense(), truth.dense(), MatrixNorm::Inf); }},
      {"tv_t1", [&] { return truth.dim() > 1 ? total_variation(tl_hat.t_diagonal(1)) : 0.0; }},
      {"tv_t1_true", [&] { return truth.dim() > 1 ? total_variation(tl.t_diagonal(1)) : 0.0; }},
  };

  std::ofstream file(a.out);
  if (!file) throw IoError("cannot write " + a.out);
  file << "metric,value\n";
  std::stringstream names(a.metrics);
  std::string name;
  while (std::getline(names, name, ',')) {
    const auto it = table.find(name);
    if (it == table.end()) throw UsageError("unknown metric '" + name + "'");
    const double v = it->second();
    file << name << ',' << format_double(v) << '\n';
    out << name << ' ' << format_double(v) << '\n';
  }

  if (!a.fe_out.empty()) {
    if (a.fe_predictions.empty() || a.fe_actuals.empty()) {
      throw UsageError("--fe-out needs --fe-predictions and --fe-actuals");
    }
    const ForecastError fe = forecast_error(read_csv(a.fe_predictions), read_csv(a.fe_actuals));
    Matrix rows(fe.per_column.size(), 2);
    for (Eigen::Index j = 0; j < fe.per_column.size(); ++j) rows.row(j) << static_cast<double>(j + 1), fe.per_column(j);
    write_csv(a.fe_out, rows, {"t", "fe"});
    out << "aggregate_fe " << format_double(fe.aggregate) << '\n';
  }

  if (!a.t1_out.empty()) {
    if (truth.dim() < 2) throw DimensionError("the first subdiagonal needs p >= 2");
    // literal: entries of T as stored; phi: the regression coefficients, i.e. negated
    const double sign = a.t1_sign == "phi" ? -1.0 : 1.0;
    const int m = truth.dim() - 1;
    Matrix rows(m, 3);
    rows.col(0) = Vector::LinSpaced(m, 2.0, static_cast<double>(m + 1));
    rows.col(1) = sign * tl_hat.t_diagonal(1);
    rows.col(2) = sign * tl.t_diagonal(1);
    write_csv(a.t1_out, rows, {"t", "estimate", "truth"});
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smooth Cholesky covariance estimation for ordered data", "sc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "draw a sample from a simulation design");
  simulate->add_option("--case", sim.case_name, "A | B | C | D | mixed | nonhier");
  simulate->add_option("--p", sim.p, "dimension");
  simulate->add_option("--n", sim.n, "number of rows");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--out", sim.out, "output directory")->required();

  FitArgs fa;
  auto* fitcmd = app.add_subcommand("fit", "fit the smooth Cholesky estimator");
  add_data_flags(fitcmd, fa.data, "--data");
  fitcmd->add_flag("!--no-standardize", fa.data.standardize, "use the data as given");
  add_solver_flags(fitcmd, fa.solver, true);
  fitcmd->add_flag("--triplets", fa.triplets, "write L as 1-based (row, col, value) triplets");
  fitcmd->add_option("--from-manifest", fa.from_manifest, "replay the parameters of an earlier fit");
  fitcmd->add_option("--out", fa.out, "output directory")->required();

  TuneArgs ta;
  auto* tunecmd = app.add_subcommand("tune", "select lambda by BIC or cross-validation");
  add_data_flags(tunecmd, ta.data, "--data");
  tunecmd->add_flag("!--no-standardize", ta.data.standardize, "use the data as given");
  add_solver_flags(tunecmd, ta.solver, false);
  tunecmd->add_option("--criterion", ta.criterion, "bic | cv");
  tunecmd->add_option("--folds", ta.folds, "number of CV folds");
  tunecmd->add_option("--grid", ta.grid, "lambda grid LO:HI:N");
  tunecmd->add_option("--grid1", ta.grid1, "lambda1 grid LO:HI:N (sparse-fused)");
  tunecmd->add_option("--seed", ta.seed, "fold shuffle seed");
  tunecmd->add_option("--out", ta.out, "output directory")->required();

  ForecastArgs fc;
  auto* forecastcmd = app.add_subcommand("forecast", "predict the trailing block from the leading one");
  add_data_flags(forecastcmd, fc.train, "--train");
  forecastcmd->add_option("--test", fc.test, "test CSV");
  forecastcmd->add_option("--split", fc.split, "number of observed leading columns")->required();
  add_solver_flags(forecastcmd, fc.solver, true);
  forecastcmd->add_option("--out", fc.out, "output directory")->required();

  EvaluateArgs ev;
  auto* evaluatecmd = app.add_subcommand("evaluate", "compare an estimate with the truth");
  evaluatecmd->add_option("--estimate", ev.estimate, "directory with L.csv or L.trp");
  evaluatecmd->add_option("--truth", ev.truth, "directory with the true L.csv");
  evaluatecmd->add_option("--metrics", ev.metrics, "comma-separated metric names");
  evaluatecmd->add_option("--out", ev.out, "metrics CSV");
  evaluatecmd->add_option("--fe-predictions", ev.fe_predictions, "forecasts for per-column FE");
  evaluatecmd->add_option("--fe-actuals", ev.fe_actuals, "observed values for per-column FE");
  evaluatecmd->add_option("--fe-out", ev.fe_out, "per-column FE CSV");
  evaluatecmd->add_option("--t1-out", ev.t1_out, "first subdiagonal of T, estimate and truth, as CSV");
  evaluatecmd->add_option("--t1-sign", ev.t1_sign, "literal (T entries) | phi (autoregressive coefficients)")
      ->check(CLI::IsMember({"literal", "phi"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) cmd_simulate(sim, out);
    if (*fitcmd) cmd_fit(fa, out);
    if (*tunecmd) cmd_tune(ta, out);
    if (*forecastcmd) cmd_forecast(fc, out);
    if (*evaluatecmd) cmd_evaluate(ev, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 1;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: malformed value (" << e.what() << ")\n";
    return 1;
  }
  return 0;
}

}  // namespace smoothchol
