#include "smoothchol/prox.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "smoothchol/blockops.hpp"
#include "smoothchol/errors.hpp"

namespace smoothchol {

namespace {

void check_problem(const Vector& C, const Vector& y) {
  if (C.size() != y.size()) throw DimensionError("C and y lengths differ");
  if (!(C.array() > 0.0).all()) throw InvalidCovariance("quadratic weights must be strictly positive");
}

struct Increment {
  double a;
  double b;
};

// Same member names as the map's value type so the solver code serves both.
struct Knot {
  double first;
  Increment second;
};

// Knots ordered by position. Without the l1 term every insertion happens at
// one of the two ends, so a flat buffer that grows outward from its middle
// holds them without per-knot allocation. The dynamic program adds at most two
// knots per step.
class EndInsertKnots {
 public:
  using iterator = Knot*;

  explicit EndInsertKnots(std::size_t steps)
      : size_(4 * steps + 4), buf_(std::make_unique_for_overwrite<Knot[]>(size_)), lo_(size_ / 2), hi_(lo_) {}

  iterator begin() { return buf_.get() + lo_; }
  iterator end() { return buf_.get() + hi_; }
  bool empty() const { return lo_ == hi_; }
  void clear() { lo_ = hi_ = size_ / 2; }

  void erase(iterator first, iterator last) {
    if (first == begin()) {
      lo_ += static_cast<std::size_t>(last - first);
    } else if (last == end()) {
      hi_ -= static_cast<std::size_t>(last - first);
    } else {
      throw NumericalError("fused solver: interior knot removal");
    }
  }

  void emplace(double t, Increment inc) {
    if (empty() || t >= buf_[hi_ - 1].first) {
      if (hi_ == size_) throw NumericalError("fused solver: knot buffer exhausted");
      buf_[hi_++] = Knot{t, inc};
    } else if (t <= buf_[lo_].first) {
      if (lo_ == 0) throw NumericalError("fused solver: knot buffer exhausted");
      buf_[--lo_] = Knot{t, inc};
    } else {
      throw NumericalError("fused solver: interior knot insertion");
    }
  }

 private:
  std::size_t size_;
  std::unique_ptr<Knot[]> buf_;
  std::size_t lo_, hi_;
};

// Derivative of a convex piecewise quadratic function: slope/intercept of the
// leftmost and rightmost pieces plus the (slope, intercept) increments at each
// knot. All jumps a*t + b at a knot t are nonnegative.
template <class Knots>
class PiecewiseDerivative {
 public:
  explicit PiecewiseDerivative(Knots knots) : knots_(std::move(knots)) {}


  void reset_data_term(double c, double y, double lambda1) {
    knots_.clear();
    la_ = 2.0 * c;
    lb_ = 2.0 * y - lambda1;
    ra_ = 2.0 * c;
    rb_ = 2.0 * y + lambda1;
    if (lambda1 > 0.0) knots_.emplace(0.0, Increment{0.0, 2.0 * lambda1});
  }

  void add_data_term(double c, double y, double lambda1) {
    la_ += 2.0 * c;
    lb_ += 2.0 * y - lambda1;
    ra_ += 2.0 * c;
    rb_ += 2.0 * y + lambda1;
    if (lambda1 > 0.0) knots_.emplace(0.0, Increment{0.0, 2.0 * lambda1});
  }

  // Smallest x with derivative >= target. Consumes the knots to its left when
  // `consume` is set and returns the coefficients of the piece containing x.
  double solve_from_left(double target, bool consume, double* a_out, double* b_out) {
    double a = la_, b = lb_;
    double prev = -std::numeric_limits<double>::infinity();
    double next = std::numeric_limits<double>::infinity();
    auto it = knots_.begin();
    for (; it != knots_.end(); ++it) {
      const double t = it->first;
      if (a * t + b >= target) {
        next = t;
        break;
      }
      a += it->second.a;
      b += it->second.b;
      prev = t;
    }
    // Between coincident knots the piece has zero width and its slope is
    // meaningless; the crossing is then the knot itself.
    const double x = a > 0.0 ? std::clamp((target - b) / a, prev, next) : prev;
    if (consume) knots_.erase(knots_.begin(), it);
    if (a_out) *a_out = a;
    if (b_out) *b_out = b;
    return x;
  }

  double solve_from_right(double target, double* a_out, double* b_out) {
    double a = ra_, b = rb_;
    double prev = std::numeric_limits<double>::infinity();
    double next = -std::numeric_limits<double>::infinity();
    auto it = knots_.end();
    while (it != knots_.begin()) {
      auto jt = std::prev(it);
      const double t = jt->first;
      if (a * t + b <= target) {
        next = t;
        break;
      }
      a -= jt->second.a;
      b -= jt->second.b;
      prev = t;
      it = jt;
    }
    const double x = a > 0.0 ? std::clamp((target - b) / a, next, prev) : prev;
    knots_.erase(it, knots_.end());
    *a_out = a;
    *b_out = b;
    return x;
  }

  // Replaces F' by the derivative of min_z F(z) + lambda |x - z|, which equals
  // F' clipped to [-lambda, lambda]. Returns the clip points (tm, tp).
  std::pair<double, double> clip(double lambda) {
    double a_lo = 0.0, b_lo = 0.0, a_hi = 0.0, b_hi = 0.0;
    const double tm = solve_from_left(-lambda, true, &a_lo, &b_lo);
    const double tp = solve_from_right(lambda, &a_hi, &b_hi);
    la_ = 0.0;
    lb_ = -lambda;
    ra_ = 0.0;
    rb_ = lambda;
    if (tp <= tm) {
      // F' jumps across both levels at tm: the clipped derivative is a single step.
      knots_.clear();
      knots_.emplace(tm, Increment{0.0, 2.0 * lambda});
      return {tm, tm};
    }
    knots_.emplace(tm, Increment{a_lo, b_lo + lambda});
    knots_.emplace(tp, Increment{-a_hi, lambda - b_hi});
    return {tm, tp};
  }

 private:
  Knots knots_;
  double la_ = 0.0, lb_ = 0.0, ra_ = 0.0, rb_ = 0.0;
};

template <class Knots>
Knots make_knots(std::size_t steps) {
  if constexpr (std::is_same_v<Knots, EndInsertKnots>) {
    return EndInsertKnots(steps);
  } else {
    return Knots{};
  }
}

template <class Knots>
Vector fused_dynamic_program(const Vector& C, const Vector& y, double lambda, double lambda1) {
  const auto m = C.size();
  Vector x(m);
  if (m == 0) return x;
  std::vector<double> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
  PiecewiseDerivative<Knots> deriv(make_knots<Knots>(static_cast<std::size_t>(m)));
  deriv.reset_data_term(C(0), y(0), lambda1);
  for (Eigen::Index k = 0; k + 1 < m; ++k) {
    const auto [tm, tp] = deriv.clip(lambda);
    lo[static_cast<std::size_t>(k)] = tm;
    hi[static_cast<std::size_t>(k)] = tp;
    deriv.add_data_term(C(k + 1), y(k + 1), lambda1);
  }
  x(m - 1) = deriv.solve_from_left(0.0, false, nullptr, nullptr);
  for (Eigen::Index k = m - 2; k >= 0; --k) {
    x(k) = std::clamp(x(k + 1), lo[static_cast<std::size_t>(k)], hi[static_cast<std::size_t>(k)]);
  }
  return x;
}

// D2 stencil (1, -2, 1).
constexpr double kStencil[3] = {1.0, -2.0, 1.0};

// H restricted to the rows and columns in idx (sorted), still pentadiagonal.
PentaDiagonal restrict_to(const PentaDiagonal& H, const std::vector<int>& idx) {
  const int nf = static_cast<int>(idx.size());
  PentaDiagonal Hf(nf);
  for (int a = 0; a < nf; ++a) {
    for (int c = std::max(0, a - 2); c <= a; ++c) {
      const int ra = idx[static_cast<std::size_t>(a)], rc = idx[static_cast<std::size_t>(c)];
      if (ra - rc <= 2) Hf.add(a, c, H(ra, rc));
    }
  }
  return Hf;
}

Vector banded_gradient(const PentaDiagonal& H, const Vector& b, const Vector& u) { return b + H.multiply(u); }

// Primal-dual active set for min 1/2 u^t H u + b^t u over |u_j| <= lambda.
// Each pass fixes the predicted active bounds and solves for the rest; a
// repeated partition is a KKT point. Gives up (nullopt) if the partition
// cycles, which the caller handles with the monotone method.
std::optional<Vector> box_qp_pdas(const PentaDiagonal& H, const Vector& b, double lambda, double tol,
                                  const Vector* start) {
  const int q = static_cast<int>(b.size());
  constexpr int kMaxPasses = 60;
  std::vector<int> side(static_cast<std::size_t>(q), 0), previous;
  Vector u = Vector::Zero(q);
  Vector g = b;
  if (start) {
    u = start->cwiseMax(-lambda).cwiseMin(lambda);
    g = banded_gradient(H, b, u);
  }
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    for (int j = 0; j < q; ++j) {
      const double probe = u(j) - g(j) / H(j, j);
      side[static_cast<std::size_t>(j)] = probe > lambda ? 1 : (probe < -lambda ? -1 : 0);
    }
    if (side == previous) {
      for (int j = 0; j < q; ++j) {
        const int s = side[static_cast<std::size_t>(j)];
        if (s == 0 && std::abs(u(j)) > lambda + tol) return std::nullopt;
        if (s != 0 && s * g(j) > tol) return std::nullopt;
      }
      return u;
    }
    previous = side;
    std::vector<int> free_idx;
    for (int j = 0; j < q; ++j) {
      const int s = side[static_cast<std::size_t>(j)];
      if (s == 0) {
        free_idx.push_back(j);
      } else {
        u(j) = s * lambda;
      }
    }
    if (!free_idx.empty()) {
      for (const int j : free_idx) u(j) = 0.0;
      const Vector g0 = banded_gradient(H, b, u);
      Vector rhs(static_cast<Eigen::Index>(free_idx.size()));
      for (std::size_t a = 0; a < free_idx.size(); ++a) rhs(static_cast<Eigen::Index>(a)) = -g0(free_idx[a]);
      PentaDiagonal Hf = restrict_to(H, free_idx);
      Hf.factorize();
      const Vector uf = Hf.solve(rhs);
      for (std::size_t a = 0; a < free_idx.size(); ++a) u(free_idx[a]) = uf(static_cast<Eigen::Index>(a));
    }
    g = banded_gradient(H, b, u);
  }
  return std::nullopt;
}

}  // namespace

PentaDiagonal::PentaDiagonal(int n) : d_(Vector::Zero(n)), e_(Vector::Zero(n)), f_(Vector::Zero(n)) {}

void PentaDiagonal::add(int r, int c, double v) {
  if (r < c) std::swap(r, c);
  switch (r - c) {
    case 0: d_(r) += v; break;
    case 1: e_(r) += v; break;
    case 2: f_(r) += v; break;
    default: throw DimensionError("entry outside the pentadiagonal band");
  }
}

double PentaDiagonal::operator()(int r, int c) const {
  if (r < c) std::swap(r, c);
  switch (r - c) {
    case 0: return d_(r);
    case 1: return e_(r);
    case 2: return f_(r);
    default: return 0.0;
  }
}

Matrix PentaDiagonal::dense() const {
  const int n = size();
  Matrix A = Matrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = std::max(0, r - 2); c <= r; ++c) {
      A(r, c) = (*this)(r, c);
      A(c, r) = A(r, c);
    }
  }
  return A;
}

void PentaDiagonal::factorize() {
  const int n = size();
  for (int k = 0; k < n; ++k) {
    double l2 = 0.0, l1 = 0.0;
    if (k >= 2) {
      l2 = f_(k) / d_(k - 2);
      f_(k) = l2;
    }
    if (k >= 1) {
      const double cross = k >= 2 ? l2 * e_(k - 1) : 0.0;
      l1 = (e_(k) - cross) / d_(k - 1);
      e_(k) = l1;
    }
    const double pivot = d_(k) - l1 * l1 - l2 * l2;
    if (!(pivot > 0.0)) throw NotPositiveDefinite("banded system is not positive definite");
    d_(k) = std::sqrt(pivot);
  }
  factored_ = true;
}

Vector PentaDiagonal::multiply(const Vector& v) const {
  if (factored_) throw NumericalError("PentaDiagonal::multiply called after factorize");
  const int n = size();
  if (v.size() != n) throw DimensionError("vector length does not match the banded matrix");
  Vector out = d_.cwiseProduct(v);
  if (n > 1) {
    out.tail(n - 1) += e_.tail(n - 1).cwiseProduct(v.head(n - 1));
    out.head(n - 1) += e_.tail(n - 1).cwiseProduct(v.tail(n - 1));
  }
  if (n > 2) {
    out.tail(n - 2) += f_.tail(n - 2).cwiseProduct(v.head(n - 2));
    out.head(n - 2) += f_.tail(n - 2).cwiseProduct(v.tail(n - 2));
  }
  return out;
}

Vector PentaDiagonal::solve(const Vector& rhs) const {
  if (!factored_) throw NumericalError("PentaDiagonal::solve called before factorize");
  const int n = size();
  Vector z(n);
  for (int k = 0; k < n; ++k) {
    double s = rhs(k);
    if (k >= 1) s -= e_(k) * z(k - 1);
    if (k >= 2) s -= f_(k) * z(k - 2);
    z(k) = s / d_(k);
  }
  Vector x(n);
  for (int k = n - 1; k >= 0; --k) {
    double s = z(k);
    if (k + 1 < n) s -= e_(k + 1) * x(k + 1);
    if (k + 2 < n) s -= f_(k + 2) * x(k + 2);
    x(k) = s / d_(k);
  }
  return x;
}

PentaDiagonal hp_system(const Vector& C, double lambda) {
  const int m = static_cast<int>(C.size());
  PentaDiagonal A(m);
  for (int k = 0; k < m; ++k) A.add(k, k, C(k));
  for (int j = 0; j + 2 < m; ++j) {
    for (int u = 0; u < 3; ++u) {
      for (int v = 0; v <= u; ++v) A.add(j + u, j + v, lambda * kStencil[u] * kStencil[v]);
    }
  }
  return A;
}

Vector solve_diagonal(const Vector& C, const Vector& y) {
  check_problem(C, y);
  const auto m = C.size();
  Vector x(m);
  if (m == 0) return x;
  x(0) = 1.0 / std::sqrt(C(0));
  for (Eigen::Index k = 1; k < m; ++k) {
    const double yk = y(k), ck = C(k);
    const double disc = std::sqrt(yk * yk + 4.0 * ck);
    // Stable form of (-y + sqrt(y^2 + 4c)) / (2c) when y > 0.
    x(k) = yk <= 0.0 ? (-yk + disc) / (2.0 * ck) : 2.0 / (yk + disc);
  }
  return x;
}

Vector solve_fused(const Vector& C, const Vector& y, double lambda) {
  check_problem(C, y);
  if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
  if (lambda == 0.0 || C.size() < 2) return -y.cwiseQuotient(C);
  return fused_dynamic_program<EndInsertKnots>(C, y, lambda, 0.0);
}

Vector solve_sparse_fused(const Vector& C, const Vector& y, double lambda, double lambda1) {
  check_problem(C, y);
  if (!(lambda >= 0.0) || !(lambda1 >= 0.0)) throw UsageError("penalties must be nonnegative");
  if (lambda1 == 0.0) return solve_fused(C, y, lambda);
  return fused_dynamic_program<std::multimap<double, Increment>>(C, y, lambda, lambda1);
}

Vector solve_hp(const Vector& C, const Vector& y, double lambda) {
  check_problem(C, y);
  if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
  if (lambda == 0.0 || C.size() < 3) return -y.cwiseQuotient(C);
  PentaDiagonal A = hp_system(C, lambda);
  A.factorize();
  return A.solve(-y);
}

Vector solve_trend(const Vector& C, const Vector& y, double lambda, Vector* dual) {
  check_problem(C, y);
  if (!(lambda >= 0.0)) throw UsageError("lambda must be nonnegative");
  const int m = static_cast<int>(C.size());
  if (lambda == 0.0 || m < 3) return -y.cwiseQuotient(C);
  const int q = m - 2;
  const Vector cinv = C.cwiseInverse();

  // Dual: minimize 1/2 u^t H u + b^t u over |u_j| <= lambda with
  // H = D2 C^{-1} D2^t / 2 and b = D2 C^{-1} y.
  const Vector b = second_differences(cinv.cwiseProduct(y));
  // H(j, j) = (c_j + 4 c_{j+1} + c_{j+2}) / 2, H(j+1, j) = -(c_{j+1} + c_{j+2}),
  // H(j+2, j) = c_{j+2} / 2 with c = 1 / C.
  PentaDiagonal H(q);
  for (int j = 0; j < q; ++j) {
    H.add(j, j, 0.5 * (cinv(j) + 4.0 * cinv(j + 1) + cinv(j + 2)));
    if (j + 1 < q) H.add(j + 1, j, -(cinv(j + 1) + cinv(j + 2)));
    if (j + 2 < q) H.add(j + 2, j, 0.5 * cinv(j + 2));
  }
  auto primal = [&](const Vector& u) {
    // x = -C^{-1} (y + D2^t u / 2)
    Vector dtu = Vector::Zero(m);
    for (int j = 0; j < q; ++j) {
      for (int s = 0; s < 3; ++s) dtu(j + s) += kStencil[s] * u(j);
    }
    return Vector(-cinv.cwiseProduct(y + 0.5 * dtu));
  };
  const double tol = 1e-12 * (1.0 + b.lpNorm<Eigen::Infinity>() + 8.0 * lambda * cinv.maxCoeff());
  const Vector* start = dual && dual->size() == q ? dual : nullptr;
  if (auto u = box_qp_pdas(H, b, lambda, tol, start)) {
    if (dual) *dual = *u;
    return primal(*u);
  }

  enum class Bound { Free, Lower, Upper };
  std::vector<Bound> status(static_cast<std::size_t>(q), Bound::Free);
  Vector u = Vector::Zero(q);
  const int max_iter = 20 * q + 100;
  bool optimal = false;
  for (int iter = 0; iter < max_iter && !optimal; ++iter) {
    std::vector<int> free_idx;
    for (int j = 0; j < q; ++j) {
      if (status[static_cast<std::size_t>(j)] == Bound::Free) free_idx.push_back(j);
    }
    bool full_step = true;
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      PentaDiagonal Hf = restrict_to(H, free_idx);
      Hf.factorize();
      const Vector g = banded_gradient(H, b, u);
      Vector gf(nf);
      for (int a = 0; a < nf; ++a) gf(a) = g(free_idx[static_cast<std::size_t>(a)]);
      const Vector step = Hf.solve(-gf);
      double alpha = 1.0;
      int blocking = -1;
      for (int a = 0; a < nf; ++a) {
        const int j = free_idx[static_cast<std::size_t>(a)];
        double ratio = std::numeric_limits<double>::infinity();
        if (step(a) > 0.0) ratio = (lambda - u(j)) / step(a);
        if (step(a) < 0.0) ratio = (-lambda - u(j)) / step(a);
        if (ratio < alpha) {
          alpha = ratio;
          blocking = a;
        }
      }
      alpha = std::max(alpha, 0.0);
      for (int a = 0; a < nf; ++a) u(free_idx[static_cast<std::size_t>(a)]) += alpha * step(a);
      if (blocking >= 0) {
        full_step = false;
        const int j = free_idx[static_cast<std::size_t>(blocking)];
        const bool upper = step(blocking) > 0.0;
        u(j) = upper ? lambda : -lambda;
        status[static_cast<std::size_t>(j)] = upper ? Bound::Upper : Bound::Lower;
      }
    }
    if (!full_step) continue;
    // Multipliers of the bound constraints: release the worst violator.
    const Vector g = banded_gradient(H, b, u);
    int worst = -1;
    double worst_val = tol;
    for (int j = 0; j < q; ++j) {
      const auto s = status[static_cast<std::size_t>(j)];
      const double viol = s == Bound::Upper ? g(j) : (s == Bound::Lower ? -g(j) : 0.0);
      if (viol > worst_val) {
        worst_val = viol;
        worst = j;
      }
    }
    if (worst < 0) {
      optimal = true;
    } else {
      status[static_cast<std::size_t>(worst)] = Bound::Free;
    }
  }
  if (!optimal) throw NumericalError("trend filtering active-set solver did not terminate");
  if (dual) *dual = u;
  return primal(u);
}

Vector sparse_threshold(const Vector& x_smooth, const Vector& C, double lambda1) {
  if (x_smooth.size() != C.size()) throw DimensionError("x and C lengths differ");
  if (!(lambda1 >= 0.0)) throw UsageError("lambda1 must be nonnegative");
  Vector out(x_smooth.size());
  for (Eigen::Index k = 0; k < x_smooth.size(); ++k) {
    const double shrink = std::abs(x_smooth(k)) - 0.5 * lambda1 / C(k);
    out(k) = shrink > 0.0 ? std::copysign(shrink, x_smooth(k)) : 0.0;
  }
  return out;
}

Vector solve_block(const Vector& C, const Vector& y, const PenaltySpec& penalty, Vector* trend_dual) {
  switch (penalty.family) {
    case PenaltyFamily::None: check_problem(C, y); return -y.cwiseQuotient(C);
    case PenaltyFamily::Fused: return solve_fused(C, y, penalty.lambda);
    case PenaltyFamily::Trend: return solve_trend(C, y, penalty.lambda, trend_dual);
    case PenaltyFamily::Hp: return solve_hp(C, y, penalty.lambda);
    case PenaltyFamily::SparseFused: return solve_sparse_fused(C, y, penalty.lambda, penalty.lambda1);
  }
  throw UsageError("unknown penalty family");
}

double diagonal_stationarity_residual(const Vector& C, const Vector& y, const Vector& x) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double yk = k == 0 ? 0.0 : y(k);
    worst = std::max(worst, std::abs(-2.0 / x(k) + 2.0 * C(k) * x(k) + 2.0 * yk));
  }
  return worst;
}

double fused_kkt_residual(const Vector& C, const Vector& y, double lambda, const Vector& x) {
  const auto m = x.size();
  const double zero_tol = 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>());
  // u_k = sum_{l <= k} g_l for differences k = 0..m-2, and sum g = 0.
  double worst = 0.0, u = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    u += 2.0 * C(k) * x(k) + 2.0 * y(k);
    if (k + 1 == m) {
      worst = std::max(worst, std::abs(u));
      break;
    }
    worst = std::max(worst, std::abs(u) - lambda);
    const double diff = x(k + 1) - x(k);
    if (std::abs(diff) > zero_tol) worst = std::max(worst, std::abs(u - std::copysign(lambda, diff)));
  }
  return std::max(worst, 0.0);
}

double trend_kkt_residual(const Vector& C, const Vector& y, double lambda, const Vector& x) {
  const auto m = x.size();
  const Vector g = 2.0 * C.cwiseProduct(x) + 2.0 * y;
  if (m < 3) return g.lpNorm<Eigen::Infinity>();
  const auto q = m - 2;
  // (D2^t u)_k = u_k - 2 u_{k-1} + u_{k-2} = -g_k
  Vector u(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    double v = -g(k);
    if (k >= 1) v += 2.0 * u(k - 1);
    if (k >= 2) v -= u(k - 2);
    u(k) = v;
  }
  double worst = 0.0;
  const double r1 = -2.0 * u(q - 1) + (q >= 2 ? u(q - 2) : 0.0) + g(m - 2);
  const double r2 = u(q - 1) + g(m - 1);
  worst = std::max({worst, std::abs(r1), std::abs(r2)});
  const Vector d2 = second_differences(x);
  const double zero_tol = 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>());
  for (Eigen::Index j = 0; j < q; ++j) {
    worst = std::max(worst, std::abs(u(j)) - lambda);
    if (std::abs(d2(j)) > zero_tol) worst = std::max(worst, std::abs(u(j) - std::copysign(lambda, d2(j))));
  }
  return std::max(worst, 0.0);
}

}  // namespace smoothchol
