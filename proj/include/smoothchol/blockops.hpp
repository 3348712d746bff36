#pragma once

#include <span>

#include "smoothchol/covmodel.hpp"

namespace smoothchol {

// Coefficients of the quadratic restricted to one diagonal:
//   h_i(x) = 2 x^t y_i + x^t diag(C_i) x + penalty(x)
// where tr(L S L^t) contributes the quadratic and cross terms.
struct BlockCoeffs {
  Vector C;
  Vector y;
};

// C_i = (S_11, ..., S_{p-i,p-i}).
Vector compute_ci(const SampleCov& S, int i);

// Cross term y_i(k) = sum_{j != i, j <= band} S(k, k + i - j) * L(k + i, k + i - j),
// i.e. the coupling of L(k + i, k) with the rest of row k + i. Never forms
// S (x) I_p. Costs O(p * band).
Vector compute_yi(const SampleCov& S, std::span<const Vector> diagonals, int i, int band);
Vector compute_yi(const SampleCov& S, const CholFactor& L, int i, int band);

// Low-rank coefficient path for n < p. Keeps R = X L^t / sqrt(n) (n x p),
// X the centered data, so that tr(L S L^t) = ||R||_F^2 and
//   y_i(k) = <R(:, k + i), X(:, k)> / sqrt(n) - S_kk L(k + i, k).
// A single-diagonal change updates R in O(n p).
class LowRankResidual {
 public:
  LowRankResidual(const SampleCov& S, std::span<const Vector> diagonals);

  // Recomputes R from scratch in O(n p^2).
  void refresh(std::span<const Vector> diagonals);
  // Diagonal k moved by `delta` (length p - k).
  void apply_update(int k, const Vector& delta);

  Vector yi(int i, const Vector& current_diagonal) const;
  // tr(L S L^t) for the tracked L.
  double trace_term() const { return R_.squaredNorm(); }
  const Matrix& residual() const { return R_; }

 private:
  const SampleCov* S_;
  Matrix Xs_;  // centered data / sqrt(n), n x p
  Matrix R_;
};

// tr(L S L^t) - 2 sum_k log L_kk.
double cholesky_loss(const SampleCov& S, const CholFactor& L);

// Penalty value lambda * P(L) (+ lambda1 * sum |L^i| for sparse-fused),
// summed over subdiagonals i >= 1. The main diagonal is never penalized.
double penalty_value(std::span<const Vector> diagonals, const PenaltySpec& penalty);

// Penalty on a single subdiagonal.
double block_penalty(const Vector& x, const PenaltySpec& penalty);

// Q(L) = tr(L S L^t) - 2 log|L| + penalty.
double objective(const SampleCov& S, const CholFactor& L, const PenaltySpec& penalty);

// Exact Gaussian log-likelihood n/2 (log|Omega| - tr(Omega S)) - n p/2 log(2 pi).
// The sample size comes from S when it carries one, otherwise from `n`.
double gaussian_loglik(const SampleCov& S, const CholFactor& L, std::optional<int> n = std::nullopt);

// h_i evaluated at x. For i = 0 the log-barrier -2 sum log x_k replaces the
// penalty (returns +inf if some x_k <= 0).
double block_objective(int i, const BlockCoeffs& coeffs, const Vector& x, const PenaltySpec& penalty);

// First and second difference operators applied to x.
Vector first_differences(const Vector& x);
Vector second_differences(const Vector& x);

}  // namespace smoothchol
