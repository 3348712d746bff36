#include "smoothchol/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "smoothchol/errors.hpp"

namespace smoothchol {

namespace {

using Rng = std::mt19937_64;

Vector case_a_first(int p, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.3, 0.7);
  return Vector::Constant(p - 1, unif(rng));
}

// Autoregressive coefficients (phi_1, phi_2) of the piecewise AR(2) design;
// T stores their negatives. Row t (1-based) is in regime 1 for t <= p/2, regime 2 for
// p/2 < t <= 3p/4 and regime 3 beyond.
void case_b_coeffs(int p, int t, double* phi1, double* phi2) {
  if (2 * t <= p) {
    *phi1 = -0.7;
    *phi2 = 0.0;
  } else if (4 * t <= 3 * p) {
    *phi1 = 0.4;
    *phi2 = -0.81;
  } else {
    *phi1 = -0.3;
    *phi2 = -0.81;
  }
}

Vector case_b_first(int p) {
  Vector v(p - 1);
  for (int k = 0; k < p - 1; ++k) {
    double phi1 = 0.0, phi2 = 0.0;
    case_b_coeffs(p, k + 2, &phi1, &phi2);
    v(k) = -phi1;
  }
  return v;
}

Vector case_c_first(int p) {
  Vector v(p - 1);
  for (int k = 0; k < p - 1; ++k) {
    const double u = static_cast<double>(k + 1) / p;
    v(k) = 2.0 * u * u - 0.5;
  }
  return v;
}

Vector case_d_first(int p, Rng& rng) {
  constexpr double kStay = 0.8;
  constexpr double kRange = 0.5;
  std::uniform_real_distribution<double> unif(-kRange, kRange);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int len = p - 1;
  Vector x = Vector::Zero(len);
  double v = unif(rng);
  for (int k = 1; k < len; ++k) {
    x(k) = x(k - 1) + v;
    if (coin(rng) >= kStay) v = unif(rng);
  }
  Vector out(len);
  for (int k = 0; k < len; ++k) out(k) = x(k) + normal(rng);
  return out;
}

// Subdiagonal j (1-based) = first subdiagonal with its last j - 1 entries
// dropped.
void fill_truncated(Matrix& T, const Vector& first, int from, int to) {
  const int p = static_cast<int>(T.rows());
  for (int j = from; j <= std::min(to, p - 1); ++j) T.diagonal(-j) = first.head(p - j);
}

Vector log_scale_variances(int p) {
  Vector lambda(p);
  for (int k = 0; k < p; ++k) {
    const double sd = std::log(static_cast<double>(k + 1) / 10.0 + 2.0);
    lambda(k) = sd * sd;
  }
  return lambda;
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::A: return "A";
    case CaseId::B: return "B";
    case CaseId::C: return "C";
    case CaseId::D: return "D";
    case CaseId::Mixed: return "mixed";
    case CaseId::NonHier: return "nonhier";
  }
  return "unknown";
}

CaseId parse_case_id(const std::string& name) {
  if (name == "A") return CaseId::A;
  if (name == "B") return CaseId::B;
  if (name == "C") return CaseId::C;
  if (name == "D") return CaseId::D;
  if (name == "mixed") return CaseId::Mixed;
  if (name == "nonhier") return CaseId::NonHier;
  throw UsageError("unknown case '" + name + "'");
}

int CaseSpec::band() const {
  const int full = std::max(p - 1, 1);
  switch (id) {
    case CaseId::A:
    case CaseId::C:
    case CaseId::D: return std::min(5, full);
    case CaseId::B: return std::min(2, full);
    case CaseId::Mixed:
    case CaseId::NonHier: return full;
  }
  return full;
}

ModifiedChol make_truth(const CaseSpec& spec) {
  const int p = spec.p;
  if (p < 4) throw UsageError("simulation designs need p >= 4");
  Rng rng(spec.seed);
  Matrix T = Matrix::Identity(p, p);
  Vector lambda = Vector::Ones(p);
  switch (spec.id) {
    case CaseId::A:
      T.diagonal(-1) = case_a_first(p, rng);
      break;
    case CaseId::B:
      for (int t = 2; t <= p; ++t) {
        double phi1 = 0.0, phi2 = 0.0;
        case_b_coeffs(p, t, &phi1, &phi2);
        T(t - 1, t - 2) = -phi1;
        if (t >= 3) T(t - 1, t - 3) = -phi2;
      }
      break;
    case CaseId::C:
      fill_truncated(T, case_c_first(p), 1, spec.band());
      lambda = log_scale_variances(p);
      break;
    case CaseId::D:
      fill_truncated(T, case_d_first(p, rng), 1, spec.band());
      lambda = log_scale_variances(p);
      break;
    case CaseId::Mixed: {
      std::uniform_int_distribution<int> pick(0, 3);
      for (int j = 1; j < p; ++j) {
        Vector first;
        switch (pick(rng)) {
          case 0: first = case_a_first(p, rng); break;
          case 1: first = case_b_first(p); break;
          case 2: first = case_c_first(p); break;
          default: first = case_d_first(p, rng); break;
        }
        T.diagonal(-j) = first.head(p - j);
      }
      lambda = log_scale_variances(p);
      break;
    }
    case CaseId::NonHier: {
      const int third = (p - 1) / 3;
      std::uniform_real_distribution<double> mag(0.1, 0.2);
      std::bernoulli_distribution negative(0.5);
      for (int j = 1; j < p; ++j) {
        if (j > third && j < p - third) continue;
        for (int k = 0; k < p - j; ++k) {
          const double v = mag(rng);
          T(k + j, k) = negative(rng) ? -v : v;
        }
      }
      break;
    }
  }
  return ModifiedChol(std::move(T), std::move(lambda));
}

Matrix sample_gaussian(const CholFactor& L, int n, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample size must be positive");
  const int p = L.dim();
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix Z(p, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) Z(c, r) = normal(rng);
  }
  const Matrix Ld = L.dense();
  const Matrix X = Ld.triangularView<Eigen::Lower>().solve(Z);
  return X.transpose();
}

Matrix standardize(const Matrix& data) {
  if (data.rows() < 2) throw UsageError("standardize needs at least two rows");
  const double n = static_cast<double>(data.rows());
  Matrix out = data.rowwise() - data.colwise().mean();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double sd = std::sqrt(out.col(c).squaredNorm() / n);
    const double scale = data.col(c).lpNorm<Eigen::Infinity>();
    if (!(sd > 1e-13 * scale) || sd == 0.0) {
      std::ostringstream msg;
      msg << "column " << c + 1 << " has zero variance";
      throw ZeroVarianceColumn(static_cast<int>(c), msg.str());
    }
    out.col(c) /= sd;
  }
  return out;
}

}  // namespace smoothchol
