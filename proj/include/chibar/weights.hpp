// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "chibar/cone.hpp"
#include "chibar/numkit.hpp"
#include "chibar/weight_vector.hpp"

namespace chibar {

// Index split into parameters of interest and boundary nuisances.
struct PartitionSpec {
  std::vector<int> poi;       // P, size p >= 1 for rank-based weights
  std::vector<int> nuisance;  // N, size m >= 0
  int k() const { return static_cast<int>(poi.size() + nuisance.size()); }
  int p() const { return static_cast<int>(poi.size()); }
  int m() const { return static_cast<int>(nuisance.size()); }

  FaceId nuisance_mask() const;
  // last m indices demoted, the library-wide default convention
  static PartitionSpec last_m(int k, int m);
};

// Chi-bar mixture: weights[j] pairs with a chi-square of j degrees of
// freedom (j = 0 is the point mass at zero).
struct MixtureDist {
  WeightVector weights;
};

// Point-null weights for k orthogonal constrained parameters:
// w_j = 2^{-k} C(k, j). Exact (dyadic rationals are exact in binary fp).
WeightVector weights_orthogonal_point(int k);

// Mass redistribution from demoting the last m of k orthogonal parameters:
// Delta_j = 2^{-k} [2^m C(k-m, j) - C(k, j)] for j <= k-m, else
// -2^{-k} C(k, j). Sums to zero exactly. m = 1 is the one-nuisance case.
DeltaVector delta_orthogonal(int k, int m);

// Closed-form weights with the last m parameters demoted:
// w_j = 2^{-(k-m)} C(k-m, j) for j <= k-m, zero above. m = 0 gives the
// point-null weights.
WeightVector weights_orthogonal_nuisance(int k, int m);

// Anisotropy index: ||G_unit(Sigma) - I||_op where G_unit is the
// unit-diagonal rescaling of Sigma^{-1}. Zero iff Sigma is diagonal.
double anisotropy_index(const SymMatrix& sigma);

// Orthogonal-difference approximation for one demoted parameter (the last):
// point-null intrinsic volumes plus the closed-form delta, negatives clipped
// and renormalized (clipped total reported on the result).
WeightVector weights_theorem1_approx(const SymMatrix& sigma,
                                     const QmcBudget& budget = {},
                                     std::uint64_t seed = 0);

// Rank-based aggregation of face masses by the effective number of PoI
// degrees of freedom on each face. The effective rank r(S) counts
// eigenvalues > tol of the scale-free collinearity matrix
// M = I_PP^{-1/2} (I_PP - I_PN I_NN^{-1} I_NP) I_PP^{-1/2}, whose spectrum
// lies in (0, 1] and equals {1} exactly when the Fisher information is
// diagonal.
WeightVector rank_based_weights(const SymMatrix& sigma, const PartitionSpec& part,
                                double tol = 0.1, const QmcBudget& budget = {},
                                std::uint64_t seed = 0);

// Same, reusing a precomputed face-mass table for the cone of `sigma`
// (the table does not depend on the partition).
WeightVector rank_based_weights(const SymMatrix& sigma,
                                const std::vector<FaceMass>& masses,
                                const PartitionSpec& part, double tol = 0.1);

double mixture_cdf(const MixtureDist& dist, double t);

// Smallest t with CDF(t) >= q; 0 whenever q <= w_0 (the atom), else
// bisection on [0, 10 + 10K] to |CDF - q| <= 1e-10.
double mixture_quantile(const MixtureDist& dist, double q);

}  // namespace chibar
