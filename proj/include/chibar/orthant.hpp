// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "chibar/numkit.hpp"

namespace chibar {

enum class OrthantMethod { exact1, exact2, exact3, qmc, mc };

const char* to_string(OrthantMethod m);

struct OrthantEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 on the exact paths
  OrthantMethod method = OrthantMethod::exact1;
};

// Budget for the randomized QMC path: points per randomization times the
// number of independent randomizations (the std_error source).
struct QmcBudget {
  int log2_points = 13;
  int randomizations = 8;
};

// Pr{ N_d(0, gamma) in R_+^d }. Exact closed forms for d <= 3; d >= 4 uses
// the Genz separation-of-variables transform on a randomly shifted Kronecker
// sequence. Deterministic given (gamma, budget, seed). The input is
// normalized to its correlation matrix first (orthant probabilities are
// scale invariant, and the unit diagonal conditions the transform).
OrthantEstimate orthant_prob(const SymMatrix& gamma, const QmcBudget& budget = {},
                             std::uint64_t seed = 0);

// The raw randomized-QMC engine, usable at any d >= 1 (tests compare it
// against the closed forms below d = 4).
OrthantEstimate orthant_prob_qmc(const SymMatrix& gamma, const QmcBudget& budget,
                                 std::uint64_t seed);

// Plain Monte Carlo: fraction of n Gaussian draws landing in the positive
// orthant; the independent oracle for orthant_prob.
OrthantEstimate orthant_prob_mc(const SymMatrix& gamma, std::size_t n,
                                std::uint64_t seed);

}  // namespace chibar
