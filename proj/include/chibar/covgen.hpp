// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "chibar/numkit.hpp"

namespace chibar {

enum class CovKind { identity, equicorr, uniform_range };

struct CovGenSpec {
  CovKind kind = CovKind::identity;
  int k = 1;
  double rho = 0.0;      // equicorr
  double lo = 0.0;       // uniform_range
  double hi = 0.0;
  std::uint64_t seed = 0;
};

// Equicorrelation matrix (1-rho) I + rho 11^T; requires 0 <= rho < 1.
SymMatrix equicorr(int k, double rho);

// identity/equicorr are exact. uniform_range draws off-diagonals uniformly
// in [lo, hi], then repairs to positive definite by eigenvalue flooring and
// unit-diagonal rescaling; draws are repeated on a fresh substream when an
// off-diagonal leaves [0, hi] after repair (100-attempt cap).
SymMatrix gen_covariance(const CovGenSpec& spec);

}  // namespace chibar
