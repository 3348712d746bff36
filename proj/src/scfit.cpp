#include "smoothchol/scfit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "smoothchol/errors.hpp"
#include "smoothchol/prox.hpp"

namespace smoothchol {

namespace {

constexpr double kDescentSlack = 1e-9;

std::vector<Vector> initial_diagonals(const SampleCov& S, const FitConfig& config, int band) {
  const int p = S.dim();
  std::vector<Vector> diags;
  if (config.init_factor) {
    const auto src = config.init_factor->diagonals();
    diags.assign(src.begin(), src.end());
  } else {
    const Vector main = config.init == InitRule::SqrtDiag ? Vector(S.matrix().diagonal().cwiseSqrt())
                                                          : Vector(Vector::Ones(p));
    diags.push_back(main);
    for (int i = 1; i < p; ++i) diags.push_back(Vector::Zero(p - i));
  }
  // diagonals outside the band are pinned to zero
  for (int i = band + 1; i < p; ++i) diags[static_cast<std::size_t>(i)].setZero();
  return diags;
}

}  // namespace

CoeffPath resolve_path(const SampleCov& S, CoeffPath requested) {
  if (requested == CoeffPath::Lowrank && !S.has_data()) {
    throw UsageError("the low-rank path needs the data matrix, not only S");
  }
  if (requested != CoeffPath::Auto) return requested;
  return S.has_data() && *S.n() < S.dim() ? CoeffPath::Lowrank : CoeffPath::Dense;
}

FitState::FitState(const SampleCov& S, const PenaltySpec& penalty, const FitConfig& config)
    : S_(S), penalty_(penalty) {
  penalty.validate();
  const int p = S.dim();
  config.validate(p);
  band_ = config.effective_band(p);
  path_ = resolve_path(S, config.path);
  diags_ = initial_diagonals(S, config, band_);
  weights_.reserve(static_cast<std::size_t>(band_ + 1));
  for (int i = 0; i <= band_; ++i) weights_.push_back(compute_ci(S, i));
  duals_.resize(static_cast<std::size_t>(band_ + 1));
  if (path_ == CoeffPath::Lowrank) lowrank_.emplace(S, diags_);
  objective_ = smoothchol::objective(S, CholFactor(diags_), penalty_);
}

BlockCoeffs FitState::coeffs(int i) const {
  const auto& current = diags_[static_cast<std::size_t>(i)];
  Vector y = lowrank_ ? lowrank_->yi(i, current) : compute_yi(S_, diags_, i, band_);
  return BlockCoeffs{weights_[static_cast<std::size_t>(i)], std::move(y)};
}

Vector FitState::solve_block_at(int i) const {
  const BlockCoeffs c = coeffs(i);
  return i == 0 ? solve_diagonal(c.C, c.y) : solve_block(c.C, c.y, penalty_);
}

SweepReport FitState::sweep_once() {
  SweepReport report;
  report.objective_before = objective_;
  report.block_deltas.reserve(static_cast<std::size_t>(band_ + 1));
  for (int i = 0; i <= band_; ++i) {
    const BlockCoeffs c = coeffs(i);
    Vector& current = diags_[static_cast<std::size_t>(i)];
    Vector next = i == 0 ? solve_diagonal(c.C, c.y)
                         : solve_block(c.C, c.y, penalty_, &duals_[static_cast<std::size_t>(i)]);
    const double h_old = block_objective(i, c, current, penalty_);
    const double h_new = block_objective(i, c, next, penalty_);
    const double delta = h_new - h_old;
    if (!std::isfinite(h_new) || delta > kDescentSlack * std::max(1.0, std::abs(h_old))) {
      std::ostringstream msg;
      msg << "block " << i << " update increased the objective by " << delta;
      throw ConsistencyError(msg.str());
    }
    const Vector step = next - current;
    report.gap = std::max(report.gap, step.size() ? step.lpNorm<Eigen::Infinity>() : 0.0);
    if (lowrank_) lowrank_->apply_update(i, step);
    current = std::move(next);
    objective_ += delta;
    report.block_deltas.push_back(delta);
  }
  report.objective_after = objective_;
  return report;
}

FitResult fit(const SampleCov& S, const PenaltySpec& penalty, const FitConfig& config) {
  FitState state(S, penalty, config);
  FitResult result{state.factor(), 0, false, {}, 0.0, state.path(), state.band()};
  while (result.iterations < config.max_iter) {
    const SweepReport report = state.sweep_once();
    ++result.iterations;
    result.objective_trace.push_back(report.objective_after);
    result.final_gap = report.gap;
    if (report.gap <= config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.L = state.factor();
  return result;
}

std::vector<ProbeRow> complexity_probe(std::span<const int> ps, int n, const PenaltySpec& penalty, int sweeps,
                                       int repeats, std::uint64_t seed) {
  if (n < 2 || sweeps < 1 || repeats < 1) throw UsageError("complexity probe needs n >= 2, sweeps >= 1, repeats >= 1");
  std::vector<ProbeRow> rows;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (const int p : ps) {
    Matrix data(n, p);
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      for (Eigen::Index r = 0; r < data.rows(); ++r) data(r, c) = normal(rng);
    }
    const SampleCov S = SampleCov::from_data(data);
    for (const CoeffPath path : {CoeffPath::Lowrank, CoeffPath::Dense}) {
      FitConfig config;
      config.path = path;
      std::vector<double> times;
      for (int rep = 0; rep < repeats; ++rep) {
        FitState state(S, penalty, config);
        const auto start = std::chrono::steady_clock::now();
        for (int s = 0; s < sweeps; ++s) state.sweep_once();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        times.push_back(elapsed.count() / sweeps);
      }
      std::nth_element(times.begin(), times.begin() + static_cast<long>(times.size() / 2), times.end());
      rows.push_back(ProbeRow{p, path, times[times.size() / 2]});
    }
  }
  return rows;
}

}  // namespace smoothchol
