#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smoothchol/covmodel.hpp"
#include "smoothchol/scfit.hpp"

namespace smoothchol {

enum class Criterion { Bic, Cv };

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);

struct TuneGrid {
  std::vector<double> lambdas = linspace(0.1, 1.0, 100);
  std::vector<double> lambda1s;  // sparse-fused only; empty means {0}
  int folds = 5;
  Criterion criterion = Criterion::Bic;
  std::uint64_t seed = 1;  // fold shuffle

  // n equally spaced points from lo to hi inclusive.
  static std::vector<double> linspace(double lo, double hi, int n);
  // "LO:HI:N".
  static std::vector<double> parse_range(const std::string& spec);

  void validate(int n_rows) const;
};

// Degrees of freedom E: p for the main diagonal plus, over swept subdiagonals,
//   fused / sparse-fused  nonzero runs of equal consecutive values
//   trend                 second-difference knots + 2 (at most the length; 0 if all zero)
//   hp                    tr[(diag(C_i) + lambda D2^t D2)^{-1} diag(C_i)]
//   none                  nonzero entries
double degrees_of_freedom(const SampleCov& S, const CholFactor& L, const PenaltySpec& penalty, int band);

// n tr(L^t L S) - n log|L^t L| + log(n) df.
double bic_score(const SampleCov& S, const CholFactor& L, int n, double df);

// Fold label per row: a seeded shuffle of the rows, then labels 0..K-1 dealt
// round-robin along the shuffled order.
std::vector<int> make_folds(int n_rows, int folds, std::uint64_t seed);

// (1/K) sum_v [ -d_v log|L_v^t L_v| + sum_{i in v} y_i^t L_v^t L_v y_i ], L_v
// fitted without fold v and y_i centered by the training mean.
struct CvOutcome {
  double score = 0.0;
  bool converged = true;  // every fold fit converged
  int iterations = 0;     // largest fold iteration count
};
CvOutcome cv_score(const Matrix& data, const PenaltySpec& penalty, const FitConfig& config,
                   const std::vector<int>& fold_of_row, int folds);

struct TuneRow {
  double lambda = 0.0;
  double lambda1 = 0.0;
  Criterion criterion = Criterion::Bic;
  double score = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct TuneFailure {
  double lambda = 0.0;
  double lambda1 = 0.0;
  std::string message;
};

struct TuneResult {
  double lambda = 0.0;
  double lambda1 = 0.0;
  std::vector<TuneRow> table;  // grid order, failed points omitted
  std::vector<TuneFailure> failures;
  std::optional<FitResult> best_fit;  // refit on all rows at the selected point
};

// Evaluates every grid point (in parallel, up to SC_THREADS workers) and
// returns the minimizer; ties go to the larger lambda, then larger lambda1.
// Failing grid points are recorded and skipped. Throws NumericalError when
// every point fails.
TuneResult tune(const Matrix& data, PenaltyFamily family, const TuneGrid& grid, const FitConfig& config = {});

void write_score_table(std::ostream& out, const std::vector<TuneRow>& table);

// Worker count: SC_THREADS if set and positive, else hardware concurrency.
int worker_count(int tasks);

}  // namespace smoothchol
