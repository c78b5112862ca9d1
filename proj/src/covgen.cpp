// SPDX-License-Identifier: Apache-2.0
#include "chibar/covgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chibar/errors.hpp"
#include "chibar/rng.hpp"

namespace chibar {

SymMatrix equicorr(int k, double rho) {
  if (k < 1) throw GenerationFailed("k must be >= 1");
  if (!(rho >= 0.0) || !(rho < 1.0) ||
      (k > 1 && !(rho > -1.0 / (k - 1))))
    throw GenerationFailed("equicorr needs 0 <= rho < 1 (and rho > -1/(K-1))");
  SymMatrix m(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    m.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) m.set(i, j, rho);
  }
  return m;
}

namespace {

// floor the spectrum at `floor_at`, then rescale back to unit diagonal
SymMatrix floor_and_rescale(const SymMatrix& m, double floor_at) {
  const std::size_t k = m.dim();
  const SpectralDecomp ed = sym_eig(m);
  std::vector<double> dense(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < k; ++r)
        acc += ed.eigenvectors(i, r) * std::max(ed.eigenvalues[r], floor_at) *
               ed.eigenvectors(j, r);
      dense[i * k + j] = acc;
    }
  SymMatrix f = SymMatrix::from_dense(k, dense);
  std::vector<double> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = std::sqrt(f(i, i));
  SymMatrix r(k);
  for (std::size_t i = 0; i < k; ++i) {
    r.set(i, i, 1.0);
    for (std::size_t j = 0; j < i; ++j) r.set(i, j, f(i, j) / (s[i] * s[j]));
  }
  return r;
}

double min_eigenvalue(const SymMatrix& m) {
  const SpectralDecomp ed = sym_eig(m);
  return ed.eigenvalues.back();
}

}  // namespace

SymMatrix gen_covariance(const CovGenSpec& spec) {
  const int k = spec.k;
  if (k < 1) throw GenerationFailed("k must be >= 1");
  switch (spec.kind) {
    case CovKind::identity:
      return SymMatrix::identity(static_cast<std::size_t>(k));
    case CovKind::equicorr:
      return equicorr(k, spec.rho);
    case CovKind::uniform_range:
      break;
  }
  if (!(0.0 <= spec.lo && spec.lo <= spec.hi && spec.hi < 1.0))
    throw GenerationFailed("uniform_range needs 0 <= lo <= hi < 1");

  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(spec.seed, 0xc07a9u, static_cast<std::uint64_t>(attempt)));
    SymMatrix m(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      m.set(i, i, 1.0);
      for (int j = i + 1; j < k; ++j)
        m.set(i, j, spec.lo + (spec.hi - spec.lo) * rng.next_uniform());
    }
    // escalate the floor until the rescaled matrix clears min eig 1e-3
    SymMatrix repaired = m;
    double floor_at = 1e-3;
    bool ok = false;
    for (int round = 0; round < 8; ++round) {
      repaired = floor_and_rescale(m, floor_at);
      if (min_eigenvalue(repaired) >= 1e-3) {
        ok = true;
        break;
      }
      floor_at *= 2.0;
    }
    if (!ok) continue;
    bool in_range = true;
    for (int i = 0; i < k && in_range; ++i)
      for (int j = i + 1; j < k && in_range; ++j)
        in_range = (repaired(i, j) >= 0.0 && repaired(i, j) <= spec.hi);
    if (in_range) return repaired;
  }
  throw GenerationFailed("no valid draw within 100 attempts (lo=" +
                         std::to_string(spec.lo) + ", hi=" +
                         std::to_string(spec.hi) + ")");
}

}  // namespace chibar
