#pragma once

#include "smoothchol/covmodel.hpp"

namespace smoothchol {

// Exact minimizers of the per-diagonal problems
//   h(x) = 2 x^t y + sum_k C_k x_k^2 + penalty(x),   C > 0.
// All solvers are pure functions.

// Main diagonal: minimizes 2 x^t y + sum C_k x_k^2 - 2 sum log x_k over x > 0.
// x_0 = 1 / sqrt(C_0) (the first cross term is structurally zero and is
// ignored), x_k = (-y_k + sqrt(y_k^2 + 4 C_k)) / (2 C_k) otherwise.
Vector solve_diagonal(const Vector& C, const Vector& y);

// Weighted 1-D total-variation denoising with penalty lambda * sum |x_k - x_{k-1}|.
// Exact, by dynamic programming over the derivative of the partial
// minimizations (piecewise linear with finitely many knots).
Vector solve_fused(const Vector& C, const Vector& y, double lambda);

// Fused problem with an additional lambda1 * sum |x_k|, solved exactly by the
// same dynamic program (the l1 term adds a knot at zero). Coincides with
// sparse_threshold(solve_fused(...)) when C is constant.
Vector solve_sparse_fused(const Vector& C, const Vector& y, double lambda, double lambda1);

// l1 trend filtering, penalty lambda * ||D2 x||_1 with D2 rows (1, -2, 1).
// Solves the box-constrained dual with banded factorizations (a primal-dual
// active-set pass, falling back to a monotone primal active-set method if the
// partition cycles); the primal is recovered as x = -C^{-1}(y + D2^t u / 2).
// When `dual` holds a vector of length m - 2 it seeds the search; on return it
// holds the optimal u.
Vector solve_trend(const Vector& C, const Vector& y, double lambda, Vector* dual = nullptr);

// Hodrick-Prescott: penalty lambda * ||D2 x||_2^2, i.e. the solution of
// (diag(C) + lambda D2^t D2) x = -y via a pentadiagonal Cholesky solve.
Vector solve_hp(const Vector& C, const Vector& y, double lambda);

// Componentwise soft threshold sign(x)(|x| - lambda1 / (2 C_k))_+ applied to
// the lambda1 = 0 solution.
Vector sparse_threshold(const Vector& x_smooth, const Vector& C, double lambda1);

// Minimizer of h for subdiagonal blocks (i >= 1) under `penalty`. `trend_dual`
// is forwarded to solve_trend and ignored by the other families.
Vector solve_block(const Vector& C, const Vector& y, const PenaltySpec& penalty, Vector* trend_dual = nullptr);

// Optimality certificates. Each returns the largest violation of the
// subgradient conditions at x (0 at the exact minimizer).
double diagonal_stationarity_residual(const Vector& C, const Vector& y, const Vector& x);
double fused_kkt_residual(const Vector& C, const Vector& y, double lambda, const Vector& x);
double trend_kkt_residual(const Vector& C, const Vector& y, double lambda, const Vector& x);

// Symmetric positive-definite matrix with bandwidth two, stored by its main,
// first and second subdiagonals. Used by the H-P and trend solvers.
class PentaDiagonal {
 public:
  explicit PentaDiagonal(int n);

  int size() const { return static_cast<int>(d_.size()); }
  void add(int r, int c, double v);
  double operator()(int r, int c) const;

  // Cholesky factorization in place; throws NotPositiveDefinite.
  void factorize();
  Vector solve(const Vector& rhs) const;
  // A * v; only before factorize.
  Vector multiply(const Vector& v) const;
  Matrix dense() const;

 private:
  Vector d_, e_, f_;  // A(k,k), A(k,k-1), A(k,k-2)
  bool factored_ = false;
};

// diag(C) + lambda D2^t D2.
PentaDiagonal hp_system(const Vector& C, double lambda);

}  // namespace smoothchol
