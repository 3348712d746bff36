#include "smoothchol/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "smoothchol/blockops.hpp"
#include "smoothchol/errors.hpp"
#include "smoothchol/io.hpp"
#include "smoothchol/prox.hpp"

namespace smoothchol {

namespace {

constexpr double kZeroTol = 1e-8;

double fused_groups(const Vector& x) {
  double groups = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const bool new_run = k == 0 || std::abs(x(k) - x(k - 1)) > kZeroTol;
    if (!new_run) continue;
    Eigen::Index end = k;
    while (end + 1 < x.size() && std::abs(x(end + 1) - x(end)) <= kZeroTol) ++end;
    if (x.segment(k, end - k + 1).cwiseAbs().maxCoeff() > kZeroTol) groups += 1.0;
  }
  return groups;
}

double trend_df(const Vector& x) {
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() <= kZeroTol) return 0.0;
  const Vector d2 = second_differences(x);
  const double knots = static_cast<double>((d2.array().abs() > kZeroTol).count());
  return std::min(knots + 2.0, static_cast<double>(x.size()));
}

double hp_df(const Vector& C, double lambda) {
  const int m = static_cast<int>(C.size());
  if (m < 3 || lambda == 0.0) return m;
  PentaDiagonal A = hp_system(C, lambda);
  A.factorize();
  double trace = 0.0;
  Vector e = Vector::Zero(m);
  for (int k = 0; k < m; ++k) {
    e(k) = 1.0;
    trace += C(k) * A.solve(e)(k);
    e(k) = 0.0;
  }
  return trace;
}

}  // namespace

std::string to_string(Criterion c) { return c == Criterion::Bic ? "bic" : "cv"; }

Criterion parse_criterion(const std::string& name) {
  if (name == "bic") return Criterion::Bic;
  if (name == "cv") return Criterion::Cv;
  throw UsageError("unknown criterion '" + name + "'");
}

std::vector<double> TuneGrid::linspace(double lo, double hi, int n) {
  if (n < 1) throw UsageError("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  v.back() = hi;
  return v;
}

std::vector<double> TuneGrid::parse_range(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("grid must look like LO:HI:N, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const double lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    const double hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    const int n = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("n");
    return linspace(lo, hi, n);
  } catch (const std::logic_error&) {
    throw UsageError("grid must look like LO:HI:N, got '" + spec + "'");
  }
}

void TuneGrid::validate(int n_rows) const {
  if (lambdas.empty()) throw UsageError("lambda grid is empty");
  for (const double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw UsageError("grid values must be finite and nonnegative");
  }
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw UsageError("lambda grid must be sorted");
  for (const double l : lambda1s) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw UsageError("lambda1 grid values must be finite and nonnegative");
  }
  if (!std::is_sorted(lambda1s.begin(), lambda1s.end())) throw UsageError("lambda1 grid must be sorted");
  if (criterion == Criterion::Cv && (folds < 2 || folds > n_rows)) {
    throw UsageError("folds must lie in [2, n]");
  }
}

double degrees_of_freedom(const SampleCov& S, const CholFactor& L, const PenaltySpec& penalty, int band) {
  const int p = L.dim();
  double df = p;
  for (int i = 1; i <= std::min(band, p - 1); ++i) {
    const Vector& x = L.diagonal(i);
    switch (penalty.family) {
      case PenaltyFamily::Fused:
      case PenaltyFamily::SparseFused: df += fused_groups(x); break;
      case PenaltyFamily::Trend: df += trend_df(x); break;
      case PenaltyFamily::Hp: df += hp_df(compute_ci(S, i), penalty.lambda); break;
      case PenaltyFamily::None: df += static_cast<double>((x.array().abs() > kZeroTol).count()); break;
    }
  }
  return df;
}

double bic_score(const SampleCov& S, const CholFactor& L, int n, double df) {
  if (n < 1) throw UsageError("BIC needs n >= 1");
  return n * cholesky_loss(S, L) + std::log(static_cast<double>(n)) * df;
}

std::vector<int> make_folds(int n_rows, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n_rows) throw UsageError("folds must lie in [2, n]");
  std::vector<int> order(static_cast<std::size_t>(n_rows));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n_rows));
  for (int k = 0; k < n_rows; ++k) fold[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k % folds;
  return fold;
}

CvOutcome cv_score(const Matrix& data, const PenaltySpec& penalty, const FitConfig& config,
                   const std::vector<int>& fold_of_row, int folds) {
  const auto n = static_cast<int>(data.rows());
  if (static_cast<int>(fold_of_row.size()) != n) throw DimensionError("fold labels do not match the data rows");
  CvOutcome out;
  for (int v = 0; v < folds; ++v) {
    std::vector<Eigen::Index> train, valid;
    for (int r = 0; r < n; ++r) (fold_of_row[static_cast<std::size_t>(r)] == v ? valid : train).push_back(r);
    if (train.size() < 2) throw UsageError("a cross-validation training set has fewer than two rows");
    const Matrix X_train = data(train, Eigen::all);
    const Vector mean = X_train.colwise().mean().transpose();
    const SampleCov S = SampleCov::from_data(X_train);
    const FitResult fitted = fit(S, penalty, config);
    out.converged = out.converged && fitted.converged;
    out.iterations = std::max(out.iterations, fitted.iterations);
    const Matrix L = fitted.L.dense();
    const Matrix Y = (data(valid, Eigen::all).rowwise() - mean.transpose()) * L.transpose();
    const double log_det = 2.0 * fitted.L.diagonal(0).array().log().sum();
    out.score += -static_cast<double>(valid.size()) * log_det + Y.squaredNorm();
  }
  out.score /= folds;
  return out;
}

int worker_count(int tasks) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) workers = static_cast<int>(v);
  }
  return std::clamp(workers, 1, std::max(tasks, 1));
}

TuneResult tune(const Matrix& data, PenaltyFamily family, const TuneGrid& grid, const FitConfig& config) {
  const auto n = static_cast<int>(data.rows());
  grid.validate(n);
  const std::vector<double> l1s = family == PenaltyFamily::SparseFused && !grid.lambda1s.empty()
                                      ? grid.lambda1s
                                      : std::vector<double>{0.0};
  struct Point {
    double lambda, lambda1;
  };
  std::vector<Point> points;
  for (const double l : grid.lambdas) {
    for (const double l1 : l1s) points.push_back({l, l1});
  }

  const SampleCov S_full = SampleCov::from_data(data);
  const std::vector<int> folds =
      grid.criterion == Criterion::Cv ? make_folds(n, grid.folds, grid.seed) : std::vector<int>{};

  struct Slot {
    std::optional<TuneRow> row;
    std::string error;
  };
  std::vector<Slot> slots(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      const PenaltySpec penalty{family, points[k].lambda, points[k].lambda1};
      try {
        TuneRow row{penalty.lambda, penalty.lambda1, grid.criterion};
        if (grid.criterion == Criterion::Bic) {
          const FitResult f = fit(S_full, penalty, config);
          row.score = bic_score(S_full, f.L, n, degrees_of_freedom(S_full, f.L, penalty, f.band));
          row.converged = f.converged;
          row.iterations = f.iterations;
        } else {
          const CvOutcome cv = cv_score(data, penalty, config, folds, grid.folds);
          row.score = cv.score;
          row.converged = cv.converged;
          row.iterations = cv.iterations;
        }
        if (!std::isfinite(row.score)) throw NumericalError("non-finite score");
        slots[k].row = row;
      } catch (const NumericalError& e) {
        slots[k].error = e.what();
      }
    }
  };
  const int workers = worker_count(static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  TuneResult result;
  std::optional<double> best;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!slots[k].row) {
      result.failures.push_back({points[k].lambda, points[k].lambda1, slots[k].error});
      continue;
    }
    const TuneRow& row = *slots[k].row;
    result.table.push_back(row);
    // points are in ascending (lambda, lambda1) order, so <= favours the larger values
    if (!best || row.score <= *best) {
      best = row.score;
      result.lambda = row.lambda;
      result.lambda1 = row.lambda1;
    }
  }
  if (!best) throw NumericalError("every grid point failed: " + result.failures.front().message);
  result.best_fit = fit(S_full, PenaltySpec{family, result.lambda, result.lambda1}, config);
  return result;
}

void write_score_table(std::ostream& out, const std::vector<TuneRow>& table) {
  out << "lambda,lambda1,criterion,score,converged,iterations\n";
  for (const TuneRow& r : table) {
    out << format_double(r.lambda) << ',' << format_double(r.lambda1) << ',' << to_string(r.criterion) << ','
        << format_double(r.score) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << '\n';
  }
}

}  // namespace smoothchol
