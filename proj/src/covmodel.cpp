#include "smoothchol/covmodel.hpp"

#include <cmath>
#include <sstream>

#include "smoothchol/errors.hpp"

namespace smoothchol {

CholFactor::CholFactor(std::vector<Vector> diagonals) : diags_(std::move(diagonals)) {
  const auto p = static_cast<Eigen::Index>(diags_.size());
  if (p == 0) throw InvalidFactor("Cholesky factor must have dimension >= 1");
  for (Eigen::Index i = 0; i < p; ++i) {
    if (diags_[static_cast<std::size_t>(i)].size() != p - i) {
      std::ostringstream msg;
      msg << "diagonal " << i << " has length " << diags_[static_cast<std::size_t>(i)].size()
          << ", expected " << p - i;
      throw InvalidFactor(msg.str());
    }
  }
  for (Eigen::Index k = 0; k < p; ++k) {
    const double v = diags_[0](k);
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "main diagonal entry " << k << " is not strictly positive (" << v << ")";
      throw InvalidFactor(msg.str());
    }
  }
  for (const auto& d : diags_) {
    if (!d.allFinite()) throw InvalidFactor("Cholesky factor has non-finite entries");
  }
}

CholFactor CholFactor::identity(int p) { return from_diagonal(Vector::Ones(p)); }

CholFactor CholFactor::from_diagonal(const Vector& main_diagonal) {
  const auto p = main_diagonal.size();
  std::vector<Vector> d;
  d.reserve(static_cast<std::size_t>(p));
  d.push_back(main_diagonal);
  for (Eigen::Index i = 1; i < p; ++i) d.push_back(Vector::Zero(p - i));
  return CholFactor(std::move(d));
}

CholFactor CholFactor::from_dense(const Matrix& lower) {
  if (lower.rows() != lower.cols()) throw DimensionError("Cholesky factor must be square");
  const auto p = lower.rows();
  std::vector<Vector> d;
  d.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    d.push_back(lower.diagonal(-i));
  }
  return CholFactor(std::move(d));
}

double CholFactor::operator()(int row, int col) const {
  if (col > row) return 0.0;
  return diags_.at(static_cast<std::size_t>(row - col))(col);
}

Matrix CholFactor::dense() const {
  const auto p = static_cast<Eigen::Index>(diags_.size());
  Matrix L = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) L.diagonal(-i) = diags_[static_cast<std::size_t>(i)];
  return L;
}

int CholFactor::bandwidth() const {
  for (int i = dim() - 1; i > 0; --i) {
    if ((diags_[static_cast<std::size_t>(i)].array() != 0.0).any()) return i;
  }
  return 0;
}

ModifiedChol::ModifiedChol(Matrix t, Vector variances) : T(std::move(t)), lambda(std::move(variances)) {
  const auto p = lambda.size();
  if (T.rows() != p || T.cols() != p) throw DimensionError("T must be p x p with p = size of lambda");
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!(lambda(k) > 0.0) || !std::isfinite(lambda(k))) {
      std::ostringstream msg;
      msg << "innovation variance " << k << " is not strictly positive (" << lambda(k) << ")";
      throw InvalidModel(msg.str());
    }
    if (T(k, k) != 1.0) throw InvalidModel("T must have a unit diagonal");
    for (Eigen::Index c = k + 1; c < p; ++c) {
      if (T(k, c) != 0.0) throw InvalidModel("T must be lower triangular");
    }
  }
  if (!T.allFinite()) throw InvalidModel("T has non-finite entries");
}

Vector ModifiedChol::t_diagonal(int i) const { return T.diagonal(-i); }

ModifiedChol to_modified(const CholFactor& L) {
  const int p = L.dim();
  Matrix T = Matrix::Identity(p, p);
  Vector lambda(p);
  for (int r = 0; r < p; ++r) {
    const double lrr = L(r, r);
    lambda(r) = 1.0 / (lrr * lrr);
    for (int c = 0; c < r; ++c) T(r, c) = L(r, c) / lrr;
  }
  return ModifiedChol(std::move(T), std::move(lambda));
}

CholFactor from_modified(const ModifiedChol& tl) {
  const int p = tl.dim();
  std::vector<Vector> d;
  d.reserve(static_cast<std::size_t>(p));
  const Vector inv_sd = tl.lambda.array().rsqrt();
  for (int i = 0; i < p; ++i) {
    // L(k + i, k) = T(k + i, k) / sigma_{k+i}
    d.push_back(tl.T.diagonal(-i).cwiseProduct(inv_sd.tail(p - i)));
  }
  return CholFactor(std::move(d));
}

Matrix precision(const CholFactor& L) {
  const Matrix Ld = L.dense();
  Matrix omega = Ld.transpose() * Ld;
  return 0.5 * (omega + omega.transpose());
}

Matrix covariance(const CholFactor& L) {
  // Sigma = L^{-1} L^{-t}
  const Matrix Ld = L.dense();
  Matrix inv = Ld.triangularView<Eigen::Lower>().solve(Matrix::Identity(L.dim(), L.dim()));
  Matrix sigma = inv * inv.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

SampleCov::SampleCov(Matrix S, std::optional<Matrix> data, std::optional<int> n)
    : S_(std::move(S)), data_(std::move(data)), n_(n) {}

SampleCov SampleCov::from_matrix(const Matrix& S, std::optional<int> n) {
  if (S.rows() != S.cols() || S.rows() == 0) throw DimensionError("sample covariance must be square and nonempty");
  if (!S.allFinite()) throw InvalidCovariance("sample covariance has non-finite entries");
  Matrix sym = 0.5 * (S + S.transpose());
  for (Eigen::Index k = 0; k < sym.rows(); ++k) {
    if (!(sym(k, k) > 0.0)) {
      std::ostringstream msg;
      msg << "sample covariance diagonal entry " << k << " is not positive (" << sym(k, k) << ")";
      throw InvalidCovariance(msg.str());
    }
  }
  if (n && *n < 1) throw UsageError("sample size must be positive");
  return SampleCov(std::move(sym), std::nullopt, n);
}

SampleCov SampleCov::from_data(const Matrix& data) {
  if (data.rows() < 1 || data.cols() < 1) throw DimensionError("data matrix is empty");
  if (!data.allFinite()) throw InvalidCovariance("data matrix has non-finite entries");
  const auto n = data.rows();
  Matrix centered = data.rowwise() - data.colwise().mean();
  Matrix S = (centered.transpose() * centered) / static_cast<double>(n);
  S = 0.5 * (S + S.transpose());
  for (Eigen::Index k = 0; k < S.rows(); ++k) {
    if (!(S(k, k) > 0.0)) {
      std::ostringstream msg;
      msg << "column " << k + 1 << " has zero variance";
      throw ZeroVarianceColumn(static_cast<int>(k), msg.str());
    }
  }
  return SampleCov(std::move(S), std::move(centered), static_cast<int>(n));
}

std::string to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::None: return "none";
    case PenaltyFamily::Fused: return "fused";
    case PenaltyFamily::Trend: return "trend";
    case PenaltyFamily::Hp: return "hp";
    case PenaltyFamily::SparseFused: return "sparse-fused";
  }
  return "unknown";
}

PenaltyFamily parse_penalty_family(const std::string& name) {
  if (name == "none") return PenaltyFamily::None;
  if (name == "fused") return PenaltyFamily::Fused;
  if (name == "trend") return PenaltyFamily::Trend;
  if (name == "hp") return PenaltyFamily::Hp;
  if (name == "sparse-fused") return PenaltyFamily::SparseFused;
  throw UsageError("unknown penalty family '" + name + "'");
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be finite and nonnegative");
  if (!(lambda1 >= 0.0) || !std::isfinite(lambda1)) throw UsageError("lambda1 must be finite and nonnegative");
  if (lambda1 != 0.0 && family != PenaltyFamily::SparseFused) {
    throw UsageError("lambda1 is only meaningful for the sparse-fused family");
  }
}

std::string to_string(CoeffPath path) {
  switch (path) {
    case CoeffPath::Dense: return "dense";
    case CoeffPath::Lowrank: return "lowrank";
    case CoeffPath::Auto: return "auto";
  }
  return "unknown";
}

CoeffPath parse_coeff_path(const std::string& name) {
  if (name == "dense") return CoeffPath::Dense;
  if (name == "lowrank") return CoeffPath::Lowrank;
  if (name == "auto") return CoeffPath::Auto;
  throw UsageError("unknown coefficient path '" + name + "'");
}

void FitConfig::validate(int p) const {
  if (!(epsilon > 0.0)) throw UsageError("tolerance must be positive");
  if (max_iter < 1) throw UsageError("max_iter must be at least 1");
  if (band && p > 1 && (*band < 1 || *band > p - 1)) {
    throw UsageError("band must lie in [1, p - 1]");
  }
  if (init_factor && init_factor->dim() != p) throw DimensionError("initial factor has the wrong dimension");
}

int FitConfig::effective_band(int p) const {
  if (p <= 1) return 0;
  return band ? *band : p - 1;
}

}  // namespace smoothchol
