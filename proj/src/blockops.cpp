#include "smoothchol/blockops.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "smoothchol/errors.hpp"

namespace smoothchol {

Vector compute_ci(const SampleCov& S, int i) {
  const int p = S.dim();
  if (i < 0 || i >= p) throw DimensionError("diagonal index out of range");
  Vector c = S.matrix().diagonal().head(p - i);
  if (!(c.array() > 0.0).all()) throw InvalidCovariance("sample covariance has a nonpositive diagonal entry");
  return c;
}

Vector compute_yi(const SampleCov& S, std::span<const Vector> diagonals, int i, int band) {
  const int p = S.dim();
  if (static_cast<int>(diagonals.size()) != p) throw DimensionError("factor and covariance dimensions differ");
  if (i < 0 || i >= p) throw DimensionError("diagonal index out of range");
  const Matrix& s = S.matrix();
  const int m = p - i;
  Vector y = Vector::Zero(m);
  const int top = std::min(band, p - 1);
  for (int j = 0; j <= top; ++j) {
    if (j == i) continue;
    const Vector& lj = diagonals[static_cast<std::size_t>(j)];
    if (j < i) {
      // entry k pairs with S(k, k + d) L^j(k + d), d = i - j
      const int d = i - j;
      y.noalias() += s.diagonal(d).head(m).cwiseProduct(lj.segment(d, m));
    } else {
      // entries k >= d pair with S(k, k - d) L^j(k - d), d = j - i
      const int d = j - i;
      const int len = p - j;
      y.segment(d, len).noalias() += s.diagonal(-d).head(len).cwiseProduct(lj.head(len));
    }
  }
  return y;
}

Vector compute_yi(const SampleCov& S, const CholFactor& L, int i, int band) {
  return compute_yi(S, L.diagonals(), i, band);
}

LowRankResidual::LowRankResidual(const SampleCov& S, std::span<const Vector> diagonals) : S_(&S) {
  if (!S.has_data()) throw UsageError("low-rank path requires the data matrix");
  const double n = static_cast<double>(*S.n());
  Xs_ = S.data() / std::sqrt(n);
  refresh(diagonals);
}

void LowRankResidual::refresh(std::span<const Vector> diagonals) {
  const int p = S_->dim();
  if (static_cast<int>(diagonals.size()) != p) throw DimensionError("factor and data dimensions differ");
  R_ = Matrix::Zero(Xs_.rows(), p);
  for (int j = 0; j < p; ++j) {
    const Vector& lj = diagonals[static_cast<std::size_t>(j)];
    for (int k = 0; k < p - j; ++k) {
      if (lj(k) != 0.0) R_.col(k + j).noalias() += lj(k) * Xs_.col(k);
    }
  }
}

void LowRankResidual::apply_update(int k, const Vector& delta) {
  const int p = S_->dim();
  if (delta.size() != p - k) throw DimensionError("update length does not match diagonal");
  for (int t = 0; t < p - k; ++t) {
    if (delta(t) != 0.0) R_.col(t + k).noalias() += delta(t) * Xs_.col(t);
  }
}

Vector LowRankResidual::yi(int i, const Vector& current_diagonal) const {
  const int p = S_->dim();
  const int m = p - i;
  Vector y(m);
  for (int k = 0; k < m; ++k) {
    y(k) = R_.col(k + i).dot(Xs_.col(k)) - (*S_)(k, k) * current_diagonal(k);
  }
  return y;
}

double cholesky_loss(const SampleCov& S, const CholFactor& L) {
  if (S.dim() != L.dim()) throw DimensionError("factor and covariance dimensions differ");
  const Matrix Ld = L.dense();
  const double trace = (Ld * S.matrix()).cwiseProduct(Ld).sum();
  return trace - 2.0 * L.diagonal(0).array().log().sum();
}

Vector first_differences(const Vector& x) {
  if (x.size() < 2) return Vector(0);
  return x.tail(x.size() - 1) - x.head(x.size() - 1);
}

Vector second_differences(const Vector& x) {
  const auto m = x.size();
  if (m < 3) return Vector(0);
  return x.head(m - 2) - 2.0 * x.segment(1, m - 2) + x.tail(m - 2);
}

double block_penalty(const Vector& x, const PenaltySpec& penalty) {
  switch (penalty.family) {
    case PenaltyFamily::None: return 0.0;
    case PenaltyFamily::Fused: return penalty.lambda * first_differences(x).lpNorm<1>();
    case PenaltyFamily::Trend: return penalty.lambda * second_differences(x).lpNorm<1>();
    case PenaltyFamily::Hp: return penalty.lambda * second_differences(x).squaredNorm();
    case PenaltyFamily::SparseFused:
      return penalty.lambda * first_differences(x).lpNorm<1>() + penalty.lambda1 * x.lpNorm<1>();
  }
  return 0.0;
}

double penalty_value(std::span<const Vector> diagonals, const PenaltySpec& penalty) {
  double total = 0.0;
  for (std::size_t i = 1; i < diagonals.size(); ++i) total += block_penalty(diagonals[i], penalty);
  return total;
}

double objective(const SampleCov& S, const CholFactor& L, const PenaltySpec& penalty) {
  return cholesky_loss(S, L) + penalty_value(L.diagonals(), penalty);
}

double gaussian_loglik(const SampleCov& S, const CholFactor& L, std::optional<int> n) {
  const auto size = S.n() ? S.n() : n;
  if (!size) throw UsageError("gaussian_loglik needs the sample size");
  const double nn = static_cast<double>(*size);
  const double p = static_cast<double>(S.dim());
  // log|Omega| - tr(Omega S) = -cholesky_loss
  return -0.5 * nn * cholesky_loss(S, L) - 0.5 * nn * p * std::log(2.0 * std::numbers::pi);
}

double block_objective(int i, const BlockCoeffs& coeffs, const Vector& x, const PenaltySpec& penalty) {
  const double quad = 2.0 * x.dot(coeffs.y) + (coeffs.C.array() * x.array().square()).sum();
  if (i == 0) {
    if (!(x.array() > 0.0).all()) return std::numeric_limits<double>::infinity();
    return quad - 2.0 * x.array().log().sum();
  }
  return quad + block_penalty(x, penalty);
}

}  // namespace smoothchol
