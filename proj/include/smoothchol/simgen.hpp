#pragma once

#include <cstdint>
#include <string>

#include "smoothchol/covmodel.hpp"

namespace smoothchol {

// Ground-truth designs for ordered data.
//   A       stationary AR(1): constant first subdiagonal of T drawn from U[0.3, 0.7]
//   B       piecewise AR(2) with regime changes after rows floor(p/2) and floor(3p/4)
//   C       varying-coefficient AR: T1_k = 2 (k/p)^2 - 0.5
//   D       first subdiagonal = random walk with Markov increments + N(0, 1) noise
//   Mixed   full lower-triangular T, each subdiagonal drawn from one of A-D
//   NonHier first and last third of the subdiagonals nonzero, |entries| in U[0.1, 0.2]
enum class CaseId { A, B, C, D, Mixed, NonHier };

std::string to_string(CaseId id);
CaseId parse_case_id(const std::string& name);

struct CaseSpec {
  CaseId id = CaseId::A;
  int p = 50;
  std::uint64_t seed = 1;

  // Number of subdiagonals swept by the fit for this design: 5 for A, C, D;
  // 2 for B; all for Mixed and NonHier.
  int band() const;
};

// Truth (T, Lambda). Off-diagonal entries of T are stored literally (an AR
// coefficient phi appears as -phi). Lambda^{1/2} = 1 for A, B and NonHier and
// log(k/10 + 2), k = 1..p, for C, D and Mixed.
ModifiedChol make_truth(const CaseSpec& spec);

// n rows drawn i.i.d. from N(0, (L^t L)^{-1}) as x = L^{-1} z, z ~ N(0, I).
Matrix sample_gaussian(const CholFactor& L, int n, std::uint64_t seed);

// Centers each column and scales it to unit variance with denominator n.
// Throws ZeroVarianceColumn naming the first constant column (1-based in the
// message, 0-based in column()).
Matrix standardize(const Matrix& data);

}  // namespace smoothchol
