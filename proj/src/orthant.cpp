// SPDX-License-Identifier: Apache-2.0
#include "chibar/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "chibar/errors.hpp"
#include "chibar/rng.hpp"

namespace chibar {

const char* to_string(OrthantMethod m) {
  switch (m) {
    case OrthantMethod::exact1: return "exact1";
    case OrthantMethod::exact2: return "exact2";
    case OrthantMethod::exact3: return "exact3";
    case OrthantMethod::qmc: return "qmc";
    case OrthantMethod::mc: return "mc";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// unit-diagonal rescale; also the PD gate (diagonal must be positive)
SymMatrix to_correlation(const SymMatrix& gamma) {
  const std::size_t d = gamma.dim();
  std::vector<double> s(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double v = gamma(i, i);
    if (!(v > 0.0)) throw NotPositiveDefinite("nonpositive variance on diagonal");
    s[i] = std::sqrt(v);
  }
  SymMatrix r(d);
  for (std::size_t i = 0; i < d; ++i) {
    r.set(i, i, 1.0);
    for (std::size_t j = 0; j < i; ++j) r.set(i, j, gamma(i, j) / (s[i] * s[j]));
  }
  return r;
}

// frac(sqrt(p)) for the first primes: Richtmyer generators for the
// Kronecker sequence used by the randomized QMC rule
std::vector<double> kronecker_alphas(std::size_t d) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  std::vector<double> a(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double s = std::sqrt(static_cast<double>(primes[i % 20] + 20 * (i / 20)));
    a[i] = s - std::floor(s);
  }
  return a;
}

double clamp_prob(double p) { return std::min(std::max(p, 1e-300), 1.0 - 1e-16); }

}  // namespace

OrthantEstimate orthant_prob_qmc(const SymMatrix& gamma, const QmcBudget& budget,
                                 std::uint64_t seed) {
  const SymMatrix corr = to_correlation(gamma);
  const std::size_t d = corr.dim();

  // identity correlation: the Genz integrand is the constant 2^-d at every
  // point (all conditional limits sit at zero), so the loop collapses
  if (corr.is_diagonal()) {
    OrthantEstimate e;
    e.value = std::ldexp(1.0, -static_cast<int>(d));
    e.std_error = 0.0;
    e.method = OrthantMethod::qmc;
    return e;
  }

  const Matrix l = cholesky(corr);
  const std::size_t n_points = std::size_t{1} << budget.log2_points;
  const int reps = budget.randomizations;

  // Genz transform: integrate prod_i (1 - Phi(lo_i)) over the unit cube,
  // where lo_i = -sum_{j<i} L_ij y_j / L_ii and y_j = Phi^{-1}(d_j + x (1-d_j)).
  const std::vector<double> alpha = kronecker_alphas(d > 0 ? d - 1 : 0);
  std::vector<double> shift(d > 0 ? d - 1 : 0);
  std::vector<double> y(d);
  std::vector<double> rep_mean(reps, 0.0);

  for (int r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, 0x51c0u, static_cast<std::uint64_t>(r)));
    for (auto& sh : shift) sh = rng.next_uniform();
    double acc = 0.0;
    for (std::size_t k = 1; k <= n_points; ++k) {
      double f = 0.5;  // first coordinate: lo = 0, so e - d = 1 - Phi(0)
      y[0] = 0.0;
      // y_0 is needed only when d > 1
      if (d > 1) {
        double x0 = static_cast<double>(k) * alpha[0] + shift[0];
        x0 -= std::floor(x0);
        y[0] = normal_quantile(clamp_prob(0.5 + x0 * 0.5));
      }
      for (std::size_t i = 1; i < d; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < i; ++j) dot += l(i, j) * y[j];
        const double lo = -dot / l(i, i);
        const double di = normal_cdf(lo);
        const double wi = 1.0 - di;
        f *= wi;
        if (f <= 0.0) break;
        if (i + 1 < d) {
          double xi = static_cast<double>(k) * alpha[i] + shift[i];
          xi -= std::floor(xi);
          y[i] = normal_quantile(clamp_prob(di + xi * wi));
        }
      }
      acc += f;
    }
    rep_mean[r] = acc / static_cast<double>(n_points);
  }

  double mean = 0.0;
  for (double v : rep_mean) mean += v;
  mean /= reps;
  double var = 0.0;
  for (double v : rep_mean) var += (v - mean) * (v - mean);
  var = (reps > 1) ? var / (reps - 1) / reps : 0.0;

  OrthantEstimate e;
  e.value = std::min(std::max(mean, 0.0), 1.0);
  e.std_error = std::sqrt(var);
  e.method = OrthantMethod::qmc;
  return e;
}

OrthantEstimate orthant_prob(const SymMatrix& gamma, const QmcBudget& budget,
                             std::uint64_t seed) {
  const std::size_t d = gamma.dim();
  if (d == 1) {
    to_correlation(gamma);  // PD gate
    return {0.5, 0.0, OrthantMethod::exact1};
  }
  if (d == 2) {
    const SymMatrix r = to_correlation(gamma);
    cholesky(r);  // PD gate
    return {0.25 + std::asin(r(0, 1)) / (2.0 * kPi), 0.0, OrthantMethod::exact2};
  }
  if (d == 3) {
    const SymMatrix r = to_correlation(gamma);
    cholesky(r);  // PD gate
    const double v = 0.125 + (std::asin(r(0, 1)) + std::asin(r(0, 2)) +
                              std::asin(r(1, 2))) /
                                 (4.0 * kPi);
    return {v, 0.0, OrthantMethod::exact3};
  }
  return orthant_prob_qmc(gamma, budget, seed);
}

OrthantEstimate orthant_prob_mc(const SymMatrix& gamma, std::size_t n,
                                std::uint64_t seed) {
  const std::size_t d = gamma.dim();
  const Matrix l = cholesky(gamma);
  Rng rng(derive_seed(seed, 0x0ac1eu));
  std::vector<double> g(d);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (auto& v : g) v = rng.next_normal();
    bool in = true;
    for (std::size_t i = 0; i < d && in; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * g[j];
      in = (s >= 0.0);
    }
    if (in) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  OrthantEstimate e;
  e.value = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  e.method = OrthantMethod::mc;
  return e;
}

}  // namespace chibar
