// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "chibar/cone.hpp"
#include "chibar/numkit.hpp"
#include "chibar/weights.hpp"

namespace chibar {

struct ExperimentConfig {
  SymMatrix sigma;
  PartitionSpec partition;
  std::size_t n_draws = 100000;
  std::uint64_t seed = 0;
  int streams = 1;
};

struct DiagnosticsReport {
  double d_inf = 0.0;
  double tail_ratio = 0.0;
  double q50_emp = 0.0;
  double q50_mix = 0.0;
  double q95_emp = 0.0;
  double q95_mix = 0.0;
  std::size_t n_draws = 0;
  std::uint64_t seed = 0;
};

// n i.i.d. N(0, sigma) draws via Cholesky, flattened row-per-draw. The
// stream layout fixes which substream produces which rows, so the output is
// identical no matter how many workers actually run.
std::vector<double> sample_mvn(const SymMatrix& sigma, std::size_t n,
                               std::uint64_t seed, int streams = 1);

// LRS in projection form: |P_C~(z~)|^2 - |P_C0~(z~)|^2 with C0~ the face
// spanned by the nuisance generators. z must already be whitened. Negative
// rounding residue is clamped to zero.
double lrt_statistic(const Cone& cone, const PartitionSpec& part,
                     const std::vector<double>& z_tilde);

// Simulates the LRS sample and compares its empirical CDF to the mixture:
// D_inf is evaluated at every sample jump (both sides) plus the atom at
// zero; tail_ratio is the empirical exceedance of the mixture 95% quantile
// over the nominal 5%.
DiagnosticsReport run_experiment(const ExperimentConfig& cfg,
                                 const MixtureDist& dist);

// The simulated LRS values themselves (sorted), for the ecdf output.
std::vector<double> simulate_lrs(const ExperimentConfig& cfg);

DiagnosticsReport diagnostics_from_sample(const std::vector<double>& sorted_lrs,
                                          const MixtureDist& dist,
                                          std::uint64_t seed);

}  // namespace chibar
