#include "smoothchol/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "smoothchol/errors.hpp"

namespace smoothchol {

namespace {

constexpr double kSupportTol = 1e-8;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shape mismatch");
  }
}

double log_det_pd(const Matrix& A, const char* name) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(name) + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double max_abs(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

}  // namespace

std::string to_string(MatrixNorm kind) { return kind == MatrixNorm::FrobScaled ? "frob_scaled" : "inf"; }

MatrixNorm parse_matrix_norm(const std::string& name) {
  if (name == "frob_scaled") return MatrixNorm::FrobScaled;
  if (name == "inf") return MatrixNorm::Inf;
  throw UsageError("unknown matrix norm '" + name + "'");
}

double matrix_error(const Matrix& A_hat, const Matrix& A, MatrixNorm kind) {
  require_same_shape(A_hat, A, "matrix_error");
  if (A.size() == 0) return 0.0;
  const Matrix diff = A_hat - A;
  if (kind == MatrixNorm::FrobScaled) return diff.squaredNorm() / static_cast<double>(A.rows());
  return diff.cwiseAbs().rowwise().sum().maxCoeff();
}

double kl_loss(const Matrix& Omega_hat, const Matrix& Sigma_true) {
  require_same_shape(Omega_hat, Sigma_true, "kl_loss");
  if (Omega_hat.rows() != Omega_hat.cols()) throw DimensionError("kl_loss: matrices must be square");
  const double p = static_cast<double>(Omega_hat.rows());
  const double trace = Omega_hat.cwiseProduct(Sigma_true.transpose()).sum();
  const double log_det = log_det_pd(Omega_hat, "Omega_hat") + log_det_pd(Sigma_true, "Sigma");
  return (trace - log_det - p) / p;
}

double total_variation(const Vector& g) {
  if (g.size() < 2) return 0.0;
  return (g.tail(g.size() - 1) - g.head(g.size() - 1)).cwiseAbs().sum();
}

double tv_cholesky_bound(const ModifiedChol& model, int i) {
  const int p = model.dim();
  if (i < 0 || i >= p) throw DimensionError("subdiagonal index out of range");
  const Vector sigma = model.lambda.cwiseSqrt();
  const Vector t = model.t_diagonal(i);
  const double c = sigma.minCoeff();
  return total_variation(t) / c + total_variation(sigma) * max_abs(t) / (c * c);
}

double tv_product_bound(const CholFactor& L, int i) {
  const int p = L.dim();
  if (i < 0 || i >= p) throw DimensionError("subdiagonal index out of range");
  std::vector<double> m(static_cast<std::size_t>(p)), K(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    const Vector& d = L.diagonal(j);
    Vector extended = Vector::Zero(d.size() + 1);
    extended.head(d.size()) = d;
    m[static_cast<std::size_t>(j)] = max_abs(d);
    K[static_cast<std::size_t>(j)] = total_variation(extended);
  }
  double bound = 0.0;
  for (int j = 0; j + i < p; ++j) {
    const auto a = static_cast<std::size_t>(j), b = static_cast<std::size_t>(j + i);
    bound += m[a] * K[b] + m[b] * K[a];
  }
  return bound;
}

RocCurve support_roc(const std::vector<CholFactor>& path, const CholFactor& truth, double fpr_cap) {
  if (!(fpr_cap > 0.0 && fpr_cap <= 1.0)) throw UsageError("fpr_cap must lie in (0, 1]");
  const int p = truth.dim();
  long positives = 0, negatives = 0;
  for (int i = 1; i < p; ++i) {
    for (const double v : truth.diagonal(i)) (std::abs(v) > kSupportTol ? positives : negatives)++;
  }
  RocCurve roc;
  roc.degenerate = positives == 0 || negatives == 0;
  for (const CholFactor& est : path) {
    if (est.dim() != p) throw DimensionError("support_roc: estimate and truth differ in dimension");
    long tp = 0, fp = 0;
    for (int i = 1; i < p; ++i) {
      const Vector& e = est.diagonal(i);
      const Vector& t = truth.diagonal(i);
      for (Eigen::Index k = 0; k < e.size(); ++k) {
        if (std::abs(e(k)) <= kSupportTol) continue;
        (std::abs(t(k)) > kSupportTol ? tp : fp)++;
      }
    }
    const double tpr = positives ? static_cast<double>(tp) / positives : 0.0;
    const double fpr = negatives ? static_cast<double>(fp) / negatives : 0.0;
    roc.points.emplace_back(fpr, tpr);
  }
  std::sort(roc.points.begin(), roc.points.end());

  double x_prev = 0.0, y_prev = 0.0;
  for (const auto& [fpr, tpr] : roc.points) {
    if (x_prev >= fpr_cap) break;
    const double y = std::max(y_prev, tpr);
    const double x = std::min(fpr, fpr_cap);
    // envelope is piecewise linear between (x_prev, y_prev) and (fpr, y)
    const double y_at_x = fpr > x_prev ? y_prev + (y - y_prev) * (x - x_prev) / (fpr - x_prev) : y;
    roc.auc += 0.5 * (x - x_prev) * (y_prev + y_at_x);
    x_prev = x;
    y_prev = fpr > fpr_cap ? y_at_x : y;
  }
  if (x_prev < fpr_cap) roc.auc += (fpr_cap - x_prev) * y_prev;
  return roc;
}

Matrix conditional_forecast(const Vector& mu, const Matrix& Sigma, const Matrix& x1, int split) {
  const Eigen::Index p = mu.size();
  if (Sigma.rows() != p || Sigma.cols() != p) throw DimensionError("conditional_forecast: Sigma does not match mu");
  if (split < 1 || split >= p) throw DimensionError("conditional_forecast: split must lie strictly inside 1..p");
  if (x1.cols() != split) throw DimensionError("conditional_forecast: observed block has the wrong width");
  const Eigen::Index q = p - split;
  const Matrix S11 = Sigma.topLeftCorner(split, split);
  Eigen::LDLT<Matrix> ldlt(S11);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any()) {
    throw NotPositiveDefinite("conditional_forecast: Sigma11 is singular");
  }
  const Matrix centered = (x1.rowwise() - mu.head(split).transpose()).transpose();  // split x n
  const Matrix coef = ldlt.solve(centered);
  Matrix out = (Sigma.bottomLeftCorner(q, split) * coef).transpose();
  out.rowwise() += mu.tail(q).transpose();
  return out;
}

ForecastError forecast_error(const Matrix& predictions, const Matrix& actuals) {
  require_same_shape(predictions, actuals, "forecast_error");
  if (predictions.rows() == 0) throw DimensionError("forecast_error: no rows");
  ForecastError fe;
  fe.per_column = (predictions - actuals).cwiseAbs().colwise().mean().transpose();
  fe.aggregate = fe.per_column.sum();
  return fe;
}

}  // namespace smoothchol
