#pragma once

#include <string>
#include <utility>
#include <vector>

#include "smoothchol/covmodel.hpp"

namespace smoothchol {

enum class MatrixNorm { FrobScaled, Inf };

std::string to_string(MatrixNorm kind);
MatrixNorm parse_matrix_norm(const std::string& name);

// FrobScaled: (1/p) ||A_hat - A||_F^2. Inf: max absolute row sum of A_hat - A.
double matrix_error(const Matrix& A_hat, const Matrix& A, MatrixNorm kind);

// (1/p) [tr(Omega_hat Sigma) - log|Omega_hat Sigma| - p]. Both arguments must
// be positive definite.
double kl_loss(const Matrix& Omega_hat, const Matrix& Sigma_true);

// Sum of absolute successive differences.
double total_variation(const Vector& g);

// Upper bound c^{-1} K1 + c^{-2} K2 m on TV of subdiagonal i of
// L = Lambda^{-1/2} T, where c = min sigma, K1 = TV(T^i), K2 = TV(sigma),
// m = max |T^i| and sigma = sqrt(lambda).
double tv_cholesky_bound(const ModifiedChol& model, int i);

// Upper bound sum_j (m_j K_{j+i} + m_{j+i} K_j) on TV of subdiagonal i of
// L^t L, with m_j = max |L^j| and K_j the total variation of L^j extended by
// a trailing zero.
double tv_product_bound(const CholFactor& L, int i);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (FPR, TPR), sorted by FPR
  double auc = 0.0;                               // area over FPR in [0, fpr_cap]
  bool degenerate = false;                        // truth support empty or full
};

// Support recovery of the strictly lower triangle along a path of estimates.
// An entry counts as nonzero when its magnitude exceeds 1e-8. The area uses
// the nondecreasing envelope of the points, starts at (0, 0) and holds the
// last TPR flat up to fpr_cap.
RocCurve support_roc(const std::vector<CholFactor>& path, const CholFactor& truth, double fpr_cap = 0.15);

// E(x2 | x1) = mu2 + Sigma21 Sigma11^{-1} (x1 - mu1) for every row of x1, where
// the first `split` variables form the observed block. Uses an LDLt solve.
Matrix conditional_forecast(const Vector& mu, const Matrix& Sigma, const Matrix& x1, int split);

struct ForecastError {
  Vector per_column;  // FE_t: mean absolute error over rows, one per forecast column
  double aggregate = 0.0;
};

ForecastError forecast_error(const Matrix& predictions, const Matrix& actuals);

}  // namespace smoothchol
