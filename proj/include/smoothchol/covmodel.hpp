#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace smoothchol {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular factor L of a precision matrix (Omega = L^t L), stored by
// diagonal: diagonal(0) is the main diagonal, diagonal(i) holds the entries
// L(k + i, k) for k = 0 .. p - i - 1. The main diagonal is strictly positive.
class CholFactor {
 public:
  explicit CholFactor(std::vector<Vector> diagonals);

  static CholFactor identity(int p);
  static CholFactor from_diagonal(const Vector& main_diagonal);
  // Reads the lower triangle of a square matrix; the upper triangle is ignored.
  static CholFactor from_dense(const Matrix& lower);

  int dim() const { return static_cast<int>(diags_.size()); }
  const Vector& diagonal(int i) const { return diags_.at(static_cast<std::size_t>(i)); }
  std::span<const Vector> diagonals() const { return diags_; }

  // Entry L(row, col), zero-based, zero above the diagonal.
  double operator()(int row, int col) const;

  Matrix dense() const;

  // Largest index of a diagonal holding a nonzero entry (0 if L is diagonal).
  int bandwidth() const;

  friend bool operator==(const CholFactor&, const CholFactor&) = default;

 private:
  std::vector<Vector> diags_;
};

// Modified Cholesky pair: L = Lambda^{-1/2} T with T unit lower triangular
// and lambda the innovation variances (diagonal of Lambda). Off-diagonal
// entries of T are stored literally, i.e. as -phi of the regression form
// X_t = sum_j phi_tj X_{t-j} + e_t.
struct ModifiedChol {
  Matrix T;
  Vector lambda;

  ModifiedChol(Matrix t, Vector variances);
  int dim() const { return static_cast<int>(lambda.size()); }

  // Subdiagonal i of T as a vector of length p - i.
  Vector t_diagonal(int i) const;
};

ModifiedChol to_modified(const CholFactor& L);
CholFactor from_modified(const ModifiedChol& tl);

// Omega = L^t L.
Matrix precision(const CholFactor& L);
// Sigma = (L^t L)^{-1}, computed from triangular solves.
Matrix covariance(const CholFactor& L);

// Sample covariance S, optionally backed by the centered data matrix so that
// S = data^t data / n.
class SampleCov {
 public:
  // Symmetrizes (S + S^t) / 2 and validates diag(S) > 0.
  static SampleCov from_matrix(const Matrix& S, std::optional<int> n = std::nullopt);
  // Centers the columns of `data` (rows are observations).
  static SampleCov from_data(const Matrix& data);

  int dim() const { return static_cast<int>(S_.rows()); }
  const Matrix& matrix() const { return S_; }
  double operator()(int r, int c) const { return S_(r, c); }
  bool has_data() const { return data_.has_value(); }
  // Centered data, rows are observations.
  const Matrix& data() const { return *data_; }
  std::optional<int> n() const { return n_; }

 private:
  SampleCov(Matrix S, std::optional<Matrix> data, std::optional<int> n);

  Matrix S_;
  std::optional<Matrix> data_;
  std::optional<int> n_;
};

enum class PenaltyFamily { None, Fused, Trend, Hp, SparseFused };

std::string to_string(PenaltyFamily family);
PenaltyFamily parse_penalty_family(const std::string& name);

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::Fused;
  double lambda = 0.0;   // smoothness weight
  double lambda1 = 0.0;  // sparsity weight, sparse-fused only

  void validate() const;
};

enum class CoeffPath { Dense, Lowrank, Auto };

std::string to_string(CoeffPath path);
CoeffPath parse_coeff_path(const std::string& name);

enum class InitRule { SqrtDiag, Identity };

struct FitConfig {
  double epsilon = 1e-4;
  int max_iter = 500;
  std::optional<int> band;  // nullopt: all p - 1 subdiagonals
  InitRule init = InitRule::SqrtDiag;
  std::optional<CholFactor> init_factor;  // overrides `init` when set
  CoeffPath path = CoeffPath::Auto;

  void validate(int p) const;
  // Number of subdiagonals swept for a p-dimensional problem.
  int effective_band(int p) const;
};

}  // namespace smoothchol
