// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace chibar {

enum class WeightMethod {
  orthogonal,
  exact_face,
  theorem1_approx,
  rank_based,
  mc_oracle,
};

const char* to_string(WeightMethod m);

// Mixture weights indexed by degrees of freedom j = 0..K. Normalized to sum
// to one; raw_sum keeps the pre-normalization total as a diagnostic, and
// clipped the total negative mass removed (theorem1_approx only).
struct WeightVector {
  std::vector<double> weights;
  WeightMethod method = WeightMethod::orthogonal;
  double raw_sum = 1.0;
  double clipped = 0.0;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t j) const { return weights[j]; }
};

// Weight differences Delta_j, summing to zero.
struct DeltaVector {
  std::vector<double> deltas;
};

}  // namespace chibar
