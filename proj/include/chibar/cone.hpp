// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "chibar/numkit.hpp"
#include "chibar/orthant.hpp"
#include "chibar/weight_vector.hpp"

namespace chibar {

// Face of the whitened cone, as a bitmask over generator indices 0..K-1.
// Bit i set means generator a_i is active (strictly positive coefficient).
using FaceId = std::uint32_t;

inline int face_dim(FaceId f) { return __builtin_popcount(f); }

// Which covariance blocks feed the internal/external Gaussian angles.
//   classical: alpha from (G_SS)^{-1}, beta from the Schur complement
//              G_TT - G_TS G_SS^{-1} G_ST   (face-conditional argument)
//   paper:     alpha from H_SS, beta from Hhat_TT
// The projection oracle pins `classical`; `paper` is retained for
// comparison (see the convention tests).
enum class AngleConvention { classical, paper };

// The whitened alternative cone C~ = A R_+^K and its derived matrices.
// Immutable after build; freely shareable across threads.
struct Cone {
  int k = 0;
  Matrix generators;    // A = D^{1/2} P^T, columns a_i
  SymMatrix gram;       // G = A^T A  (equals Sigma^{-1})
  SymMatrix h;          // H = G^{-1}
  SymMatrix polar_gram; // Ghat = D_H^{-1/2} H D_H^{-1/2}, unit diagonal
  SymMatrix polar_h;    // Hhat = Ghat^{-1}

  std::vector<int> face_indices(FaceId s) const;  // set bits, ascending
};

// Whitened cone from Sigma = I(theta0)^{-1}. Requires nonnegative entries
// (the chi-bar interpretation needs nonnegative correlation) and K <= 20.
Cone build_cone(const SymMatrix& sigma);

// Whitening map: z~ = A z, taking N(0, Sigma) draws to N(0, I).
std::vector<double> whiten(const Cone& cone, const std::vector<double>& z);

// Internal Gaussian angle alpha(F_S), S nonempty.
OrthantEstimate internal_angle(const Cone& cone, FaceId s,
                               const QmcBudget& budget = {},
                               std::uint64_t seed = 0,
                               AngleConvention conv = AngleConvention::classical);

// External Gaussian angle beta(F_S), S != full mask.
OrthantEstimate external_angle(const Cone& cone, FaceId s,
                               const QmcBudget& budget = {},
                               std::uint64_t seed = 0,
                               AngleConvention conv = AngleConvention::classical);

struct FaceMass {
  FaceId face = 0;
  double internal = 1.0;
  double external = 1.0;
  double mass = 1.0;      // internal * external
  double std_error = 0.0; // propagated from the two angle estimates
};

// All 2^K face masses. Per-face seeds derive from (seed, face, side), so the
// table is independent of evaluation order. K <= 12.
std::vector<FaceMass> face_masses(const Cone& cone, const QmcBudget& budget = {},
                                  std::uint64_t seed = 0,
                                  AngleConvention conv = AngleConvention::classical);

// Intrinsic volumes w_j = sum_{|S|=j} alpha(F_S) beta(F_S), normalized to
// sum to one with the raw sum kept as a diagnostic.
WeightVector intrinsic_volumes(const Cone& cone, const QmcBudget& budget = {},
                               std::uint64_t seed = 0,
                               AngleConvention conv = AngleConvention::classical);
WeightVector intrinsic_volumes(const std::vector<FaceMass>& masses, int k);

struct ConeProjection {
  std::vector<double> point;  // the projected point, in whitened coordinates
  FaceId face = 0;            // generators with strictly positive coefficients
};

// Euclidean projection of z onto the subcone spanned by the `active`
// generators, by Lawson-Hanson NNLS. active = full mask projects onto C~,
// active = 0 returns the origin.
ConeProjection project_cone(const Cone& cone, const std::vector<double>& z,
                            FaceId active);

// Projection oracle: empirical face-dimension frequencies of N(0, I) draws
// projected onto C~. The ground truth the angle conventions are checked
// against.
WeightVector intrinsic_volumes_mc(const Cone& cone, std::size_t n,
                                  std::uint64_t seed);

}  // namespace chibar
