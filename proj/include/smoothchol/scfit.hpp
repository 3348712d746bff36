#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smoothchol/blockops.hpp"
#include "smoothchol/covmodel.hpp"

namespace smoothchol {

struct FitResult {
  CholFactor L;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // Q after each full sweep
  double final_gap = 0.0;               // ||L^(k+1) - L^(k)||_inf at exit
  CoeffPath path = CoeffPath::Dense;    // resolved coefficient path
  int band = 0;
};

struct SweepReport {
  std::vector<double> block_deltas;  // change of Q per block, in sweep order
  double gap = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
};

// Mutable state of the block coordinate descent: the diagonals of L, the
// per-diagonal quadratic weights and, on the low-rank path, the residual
// R = X L^t / sqrt(n). Single-threaded by contract.
class FitState {
 public:
  FitState(const SampleCov& S, const PenaltySpec& penalty, const FitConfig& config);

  FitState(const FitState&) = delete;
  FitState& operator=(const FitState&) = delete;

  // One pass over diagonals 0, 1, ..., band. Every block update must not
  // increase Q; a violation raises ConsistencyError.
  SweepReport sweep_once();

  // Minimizer of the block problem for diagonal i given the current state,
  // without applying it.
  Vector solve_block_at(int i) const;
  BlockCoeffs coeffs(int i) const;

  CholFactor factor() const { return CholFactor(diags_); }
  std::span<const Vector> diagonals() const { return diags_; }
  // Q tracked by accumulating block deltas from a direct initial evaluation.
  double objective() const { return objective_; }
  CoeffPath path() const { return path_; }
  int band() const { return band_; }

 private:
  const SampleCov& S_;
  PenaltySpec penalty_;
  int band_;
  CoeffPath path_;
  std::vector<Vector> diags_;
  std::vector<Vector> weights_;
  std::vector<Vector> duals_;  // last trend-filtering dual per diagonal, reused as a warm start
  std::optional<LowRankResidual> lowrank_;
  double objective_ = 0.0;
};

// Resolves CoeffPath::Auto: low-rank when the data matrix is available and
// n < p, dense otherwise.
CoeffPath resolve_path(const SampleCov& S, CoeffPath requested);

// Block coordinate descent over the (sub)diagonals of L. Stops when the
// sweep-to-sweep change is at most config.epsilon or after config.max_iter
// sweeps (converged = false, the estimate is still returned).
FitResult fit(const SampleCov& S, const PenaltySpec& penalty, const FitConfig& config = {});

struct ProbeRow {
  int p = 0;
  CoeffPath path = CoeffPath::Dense;
  double seconds_per_iter = 0.0;  // median over repeats
};

// Per-sweep wall time on random Gaussian data with n rows, for each p and for
// both coefficient paths, with every subdiagonal swept.
std::vector<ProbeRow> complexity_probe(std::span<const int> ps, int n, const PenaltySpec& penalty,
                                       int sweeps = 3, int repeats = 5, std::uint64_t seed = 1);

}  // namespace smoothchol
