// SPDX-License-Identifier: Apache-2.0
#include "chibar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "chibar/errors.hpp"
#include "chibar/rng.hpp"

namespace chibar {

namespace {

constexpr double kZeroAtom = 1e-10;  // NNLS termination noise counts as 0

}  // namespace

std::vector<double> sample_mvn(const SymMatrix& sigma, std::size_t n,
                               std::uint64_t seed, int streams) {
  const std::size_t k = sigma.dim();
  const Matrix l = cholesky(sigma);
  std::vector<double> out(n * k);
  if (streams < 1) streams = 1;

  auto fill = [&](int s, std::size_t lo, std::size_t hi) {
    Rng rng(derive_seed(seed, 0x3a621eu, static_cast<std::uint64_t>(s)));
    std::vector<double> g(k);
    for (std::size_t i = lo; i < hi; ++i) {
      for (auto& v : g) v = rng.next_normal();
      for (std::size_t r = 0; r < k; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c <= r; ++c) acc += l(r, c) * g[c];
        out[i * k + r] = acc;
      }
    }
  };

  // fixed block partition: draw i belongs to stream i / block regardless of
  // how many threads execute, so the sample is reproducible under any
  // parallelism
  const std::size_t block = (n + static_cast<std::size_t>(streams) - 1) /
                            static_cast<std::size_t>(streams);
  if (streams == 1) {
    fill(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    for (int s = 0; s < streams; ++s) {
      const std::size_t lo = static_cast<std::size_t>(s) * block;
      const std::size_t hi = std::min(n, lo + block);
      if (lo >= hi) break;
      pool.emplace_back(fill, s, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

double lrt_statistic(const Cone& cone, const PartitionSpec& part,
                     const std::vector<double>& z_tilde) {
  const FaceId full = (FaceId{1} << cone.k) - 1;
  const ConeProjection p1 = project_cone(cone, z_tilde, full);
  double n1 = 0.0;
  for (double v : p1.point) n1 += v * v;
  double n0 = 0.0;
  const FaceId nmask = part.nuisance_mask();
  if (nmask != 0) {
    const ConeProjection p0 = project_cone(cone, z_tilde, nmask);
    for (double v : p0.point) n0 += v * v;
  }
  return std::max(n1 - n0, 0.0);
}

std::vector<double> simulate_lrs(const ExperimentConfig& cfg) {
  const std::size_t k = cfg.sigma.dim();
  const Cone cone = build_cone(cfg.sigma);
  const std::vector<double> draws =
      sample_mvn(cfg.sigma, cfg.n_draws, cfg.seed, cfg.streams);

  std::vector<double> lrs(cfg.n_draws);
  const int streams = std::max(cfg.streams, 1);
  auto work = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> z(k);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t r = 0; r < k; ++r) z[r] = draws[i * k + r];
      double v = lrt_statistic(cone, cfg.partition, whiten(cone, z));
      if (v < kZeroAtom) v = 0.0;
      lrs[i] = v;
    }
  };
  if (streams == 1) {
    work(0, cfg.n_draws);
  } else {
    const std::size_t block =
        (cfg.n_draws + static_cast<std::size_t>(streams) - 1) /
        static_cast<std::size_t>(streams);
    std::vector<std::thread> pool;
    for (int s = 0; s < streams; ++s) {
      const std::size_t lo = static_cast<std::size_t>(s) * block;
      const std::size_t hi = std::min(cfg.n_draws, lo + block);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  std::sort(lrs.begin(), lrs.end());
  return lrs;
}

DiagnosticsReport diagnostics_from_sample(const std::vector<double>& s,
                                          const MixtureDist& dist,
                                          std::uint64_t seed) {
  const std::size_t n = s.size();
  const double dn = static_cast<double>(n);

  // sup over jump points, both sides, with t = 0 always included (the
  // mixture atom lives there even when the sample has no zeros)
  double d_inf = std::fabs(mixture_cdf(dist, 0.0) -
                           static_cast<double>(std::upper_bound(s.begin(), s.end(), 0.0) -
                                               s.begin()) /
                               dn);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && s[j] == s[i]) ++j;
    const double fm = mixture_cdf(dist, s[i]);
    const double hi = std::fabs(static_cast<double>(j) / dn - fm);
    const double lo = std::fabs(static_cast<double>(i) / dn - fm);
    d_inf = std::max(d_inf, std::max(hi, lo));
    i = j;
  }

  DiagnosticsReport rep;
  rep.d_inf = d_inf;
  rep.q50_mix = mixture_quantile(dist, 0.5);
  rep.q95_mix = mixture_quantile(dist, 0.95);
  // nearest-rank order statistics
  rep.q50_emp = s[static_cast<std::size_t>(std::ceil(0.5 * dn)) - 1];
  rep.q95_emp = s[static_cast<std::size_t>(std::ceil(0.95 * dn)) - 1];
  const std::size_t exceed =
      n - static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), rep.q95_mix) -
                                   s.begin());
  rep.tail_ratio = static_cast<double>(exceed) / dn / 0.05;
  rep.n_draws = n;
  rep.seed = seed;
  return rep;
}

DiagnosticsReport run_experiment(const ExperimentConfig& cfg,
                                 const MixtureDist& dist) {
  return diagnostics_from_sample(simulate_lrs(cfg), dist, cfg.seed);
}

}  // namespace chibar
