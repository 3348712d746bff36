#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles/oracles.hpp"
#include "smoothchol/errors.hpp"
#include "smoothchol/metrics.hpp"
#include "smoothchol/scfit.hpp"
#include "smoothchol/simgen.hpp"
#include "test_support.hpp"

using namespace smoothchol;

namespace {

oracle::Family to_oracle(PenaltyFamily f) {
  switch (f) {
    case PenaltyFamily::None: return oracle::Family::None;
    case PenaltyFamily::Fused: return oracle::Family::Fused;
    case PenaltyFamily::Trend: return oracle::Family::Trend;
    case PenaltyFamily::Hp: return oracle::Family::Hp;
    case PenaltyFamily::SparseFused: return oracle::Family::SparseFused;
  }
  return oracle::Family::None;
}

FitConfig tight() {
  FitConfig c;
  c.epsilon = 1e-11;
  c.max_iter = 100000;
  return c;
}

}  // namespace

TEST_CASE("unpenalized fit recovers the inverse sample covariance") {
  const CaseSpec spec{CaseId::A, 10, 3};
  const Matrix data = sample_gaussian(from_modified(make_truth(spec)), 200, 4);
  const SampleCov S = SampleCov::from_data(data);
  const FitResult r = fit(S, PenaltySpec{PenaltyFamily::None, 0.0, 0.0}, tight());
  CHECK(r.converged);
  const Matrix inv = S.matrix().inverse();
  CHECK((precision(r.L) - inv).norm() / inv.norm() <= 1e-8);
}

TEST_CASE("fit reaches the minimum of the full objective") {
  const PenaltyFamily families[] = {PenaltyFamily::None, PenaltyFamily::Fused, PenaltyFamily::Trend,
                                    PenaltyFamily::Hp, PenaltyFamily::SparseFused};
  for (const PenaltyFamily fam : families) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(8, 5, 40 + seed));
      const double l1 = fam == PenaltyFamily::SparseFused ? 0.2 : 0.0;
      const PenaltySpec pen{fam, 0.3, l1};
      const FitResult r = fit(S, pen, tight());
      const auto ref = oracle::minimize_full(S.matrix(), to_oracle(fam), 0.3, l1, 4);
      const double q = oracle::full_objective(S.matrix(), r.L.dense(), to_oracle(fam), 0.3, l1);
      CAPTURE(to_string(fam));
      CHECK(q == doctest::Approx(objective(S, r.L, pen)).epsilon(1e-12));
      CHECK(std::abs(q - ref.value) <= 1e-8);
    }
  }
}

TEST_CASE("every sweep decreases the objective and the tracked value is exact") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(6, 9, 50));
  for (const PenaltyFamily fam : {PenaltyFamily::Fused, PenaltyFamily::Trend, PenaltyFamily::Hp}) {
    FitState state(S, PenaltySpec{fam, 0.5, 0.0}, FitConfig{});
    double previous = state.objective();
    for (int k = 0; k < 30; ++k) {
      const SweepReport rep = state.sweep_once();
      for (const double d : rep.block_deltas) CHECK(d <= 1e-9 * std::max(1.0, std::abs(previous)));
      CHECK(rep.objective_after <= previous + 1e-9);
      previous = rep.objective_after;
    }
    CHECK(state.objective() ==
          doctest::Approx(objective(S, state.factor(), PenaltySpec{fam, 0.5, 0.0})).epsilon(1e-10));
  }
}

TEST_CASE("dense and low-rank paths agree") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(5, 12, 60));
  FitConfig dense = tight(), lowrank = tight();
  dense.path = CoeffPath::Dense;
  lowrank.path = CoeffPath::Lowrank;
  dense.max_iter = lowrank.max_iter = 200;
  const PenaltySpec pen{PenaltyFamily::Fused, 0.4, 0.0};
  const FitResult a = fit(S, pen, dense);
  const FitResult b = fit(S, pen, lowrank);
  CHECK(a.path == CoeffPath::Dense);
  CHECK(b.path == CoeffPath::Lowrank);
  CHECK((a.L.dense() - b.L.dense()).lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(resolve_path(S, CoeffPath::Auto) == CoeffPath::Lowrank);
  const SampleCov big = SampleCov::from_data(testing_support::gaussian_matrix(30, 5, 61));
  CHECK(resolve_path(big, CoeffPath::Auto) == CoeffPath::Dense);
  CHECK(resolve_path(SampleCov::from_matrix(S.matrix()), CoeffPath::Auto) == CoeffPath::Dense);
  CHECK_THROWS_AS(resolve_path(SampleCov::from_matrix(S.matrix()), CoeffPath::Lowrank), UsageError);
}

TEST_CASE("band restricts the estimate") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(40, 8, 70));
  FitConfig cfg;
  cfg.band = 2;
  const FitResult r = fit(S, PenaltySpec{PenaltyFamily::Trend, 0.2, 0.0}, cfg);
  CHECK(r.band == 2);
  CHECK(r.L.bandwidth() <= 2);
}

TEST_CASE("large lambda makes every penalized subdiagonal constant") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(30, 8, 71));
  const FitResult r = fit(S, PenaltySpec{PenaltyFamily::Fused, 1e3, 0.0});
  for (int i = 1; i < 8; ++i) CHECK(total_variation(r.L.diagonal(i)) <= 1e-6);
}

TEST_CASE("iteration cap returns the current estimate unconverged") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(30, 8, 72));
  FitConfig cfg;
  cfg.max_iter = 1;
  cfg.epsilon = 1e-14;
  const FitResult r = fit(S, PenaltySpec{PenaltyFamily::Fused, 0.1, 0.0}, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.objective_trace.size() == 1);
  CHECK(r.final_gap > cfg.epsilon);
}

TEST_CASE("initialization options") {
  const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(30, 6, 73));
  FitConfig cfg;
  cfg.init = InitRule::Identity;
  const FitState a(S, PenaltySpec{}, cfg);
  CHECK(a.factor().dense().isIdentity());
  cfg.init = InitRule::SqrtDiag;
  const FitState b(S, PenaltySpec{}, cfg);
  CHECK((b.factor().diagonal(0) - S.matrix().diagonal().cwiseSqrt()).norm() == 0.0);
  cfg.init_factor = testing_support::random_factor(6, 74);
  cfg.band = 2;
  const FitState c(S, PenaltySpec{}, cfg);
  CHECK(c.factor().bandwidth() <= 2);
  CHECK(c.factor().diagonal(1) == cfg.init_factor->diagonal(1));
  cfg.init_factor = CholFactor::identity(5);
  CHECK_THROWS_AS(FitState(S, PenaltySpec{}, cfg), DimensionError);
}

TEST_CASE("fitted precision is positive definite") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SampleCov S = SampleCov::from_data(testing_support::gaussian_matrix(4, 10, 80 + seed));
    const FitResult r = fit(S, PenaltySpec{PenaltyFamily::Hp, 0.5, 0.0});
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(precision(r.L));
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("complexity probe reports both paths") {
  const int ps[] = {20, 40};
  const auto rows = complexity_probe(ps, 5, PenaltySpec{PenaltyFamily::Fused, 0.5, 0.0}, 1, 1);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r.seconds_per_iter > 0.0);
  CHECK_THROWS_AS(complexity_probe(ps, 1, PenaltySpec{}), UsageError);
}
