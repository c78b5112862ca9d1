// SPDX-License-Identifier: Apache-2.0
#include "chibar/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chibar/errors.hpp"

namespace chibar {

const char* to_string(WeightMethod m) {
  switch (m) {
    case WeightMethod::orthogonal: return "orthogonal";
    case WeightMethod::exact_face: return "exact";
    case WeightMethod::theorem1_approx: return "theorem1";
    case WeightMethod::rank_based: return "rank";
    case WeightMethod::mc_oracle: return "mc";
  }
  return "?";
}

FaceId PartitionSpec::nuisance_mask() const {
  FaceId m = 0;
  for (int i : nuisance) m |= FaceId{1} << i;
  return m;
}

PartitionSpec PartitionSpec::last_m(int k, int m) {
  PartitionSpec p;
  for (int i = 0; i < k - m; ++i) p.poi.push_back(i);
  for (int i = k - m; i < k; ++i) p.nuisance.push_back(i);
  return p;
}

namespace {

// Pascal row; entries are integers < 2^53 for k <= 30, so doubles are exact
std::vector<double> binomial_row(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  c[0] = 1.0;
  for (int i = 1; i <= k; ++i)
    for (int j = i; j >= 1; --j) c[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(j) - 1];
  return c;
}

}  // namespace

WeightVector weights_orthogonal_point(int k) {
  if (k < 1 || k > 30) throw InvalidPartition("k must be in [1, 30]");
  const std::vector<double> c = binomial_row(k);
  WeightVector w;
  w.weights.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) w.weights[j] = std::ldexp(c[j], -k);
  w.method = WeightMethod::orthogonal;
  w.raw_sum = 1.0;
  return w;
}

DeltaVector delta_orthogonal(int k, int m) {
  if (k < 1 || k > 30) throw InvalidPartition("k must be in [1, 30]");
  if (m < 1 || m > k - 1)
    throw InvalidPartition("m must be in [1, k-1], got m=" + std::to_string(m));
  const std::vector<double> ck = binomial_row(k);
  const std::vector<double> ckm = binomial_row(k - m);
  DeltaVector d;
  d.deltas.resize(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    const double top = (j <= k - m)
                           ? std::ldexp(ckm[static_cast<std::size_t>(j)], m) -
                                 ck[static_cast<std::size_t>(j)]
                           : -ck[static_cast<std::size_t>(j)];
    d.deltas[static_cast<std::size_t>(j)] = std::ldexp(top, -k);
  }
  return d;
}

WeightVector weights_orthogonal_nuisance(int k, int m) {
  if (k < 1 || k > 30) throw InvalidPartition("k must be in [1, 30]");
  if (m < 0 || m > k - 1)
    throw InvalidPartition("m must be in [0, k-1], got m=" + std::to_string(m));
  const std::vector<double> c = binomial_row(k - m);
  WeightVector w;
  w.weights.assign(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k - m; ++j)
    w.weights[static_cast<std::size_t>(j)] =
        std::ldexp(c[static_cast<std::size_t>(j)], -(k - m));
  w.method = WeightMethod::orthogonal;
  w.raw_sum = 1.0;
  return w;
}

double anisotropy_index(const SymMatrix& sigma) {
  const SymMatrix info = inv_pd(sigma);
  const std::size_t k = sigma.dim();
  std::vector<double> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = std::sqrt(info(i, i));
  SymMatrix dev(k);
  for (std::size_t i = 0; i < k; ++i) {
    dev.set(i, i, 0.0);
    for (std::size_t j = 0; j < i; ++j)
      dev.set(i, j, info(i, j) / (s[i] * s[j]));
  }
  return op_norm(dev);
}

WeightVector weights_theorem1_approx(const SymMatrix& sigma,
                                     const QmcBudget& budget,
                                     std::uint64_t seed) {
  const int k = static_cast<int>(sigma.dim());
  const Cone cone = build_cone(sigma);
  const WeightVector point = intrinsic_volumes(cone, budget, seed);
  const DeltaVector delta = delta_orthogonal(k, 1);

  WeightVector w;
  w.weights.resize(point.size());
  w.method = WeightMethod::theorem1_approx;
  w.raw_sum = point.raw_sum;
  double clipped = 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double v = point.weights[j] + delta.deltas[j];
    if (v < 0.0) {
      clipped -= v;
      v = 0.0;
    }
    w.weights[j] = v;
    sum += v;
  }
  for (double& v : w.weights) v /= sum;
  w.clipped = clipped;
  return w;
}

WeightVector rank_based_weights(const SymMatrix& sigma,
                                const std::vector<FaceMass>& masses,
                                const PartitionSpec& part, double tol) {
  const int k = static_cast<int>(sigma.dim());
  if (part.k() != k) throw InvalidPartition("partition size != dim(sigma)");
  if (part.p() < 1) throw InvalidPartition("need at least one PoI");
  {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int i : part.poi) {
      if (i < 0 || i >= k || seen[static_cast<std::size_t>(i)])
        throw InvalidPartition("bad PoI index");
      seen[static_cast<std::size_t>(i)] = true;
    }
    for (int i : part.nuisance) {
      if (i < 0 || i >= k || seen[static_cast<std::size_t>(i)])
        throw InvalidPartition("bad nuisance index");
      seen[static_cast<std::size_t>(i)] = true;
    }
  }

  const SymMatrix info = inv_pd(sigma);
  const FaceId nmask = part.nuisance_mask();

  WeightVector w;
  w.weights.assign(static_cast<std::size_t>(part.p()) + 1, 0.0);
  w.method = WeightMethod::rank_based;
  double raw = 0.0;
  for (const FaceMass& fm : masses) {
    const FaceId sp = fm.face & ~nmask;
    const FaceId sn = fm.face & nmask;
    int r = 0;
    if (sp != 0) {
      std::vector<int> pidx, nidx;
      for (int i = 0; i < k; ++i) {
        if (sp & (FaceId{1} << i)) pidx.push_back(i);
        if (sn & (FaceId{1} << i)) nidx.push_back(i);
      }
      const SymMatrix iface = schur_complement(info, pidx, nidx);
      // scale-free collinearity spectrum: M = I_PP^{-1/2} iface I_PP^{-1/2}
      const SymMatrix ipp = info.submatrix(pidx);
      const SpectralDecomp ed = sym_eig(ipp);
      const std::size_t np = pidx.size();
      Matrix root_inv(np, np);
      for (std::size_t i = 0; i < np; ++i) {
        const double s = 1.0 / std::sqrt(ed.eigenvalues[i]);
        for (std::size_t j = 0; j < np; ++j)
          root_inv(j, i) = ed.eigenvectors(j, i) * s;  // P D^{-1/2}
      }
      SymMatrix m(np);
      for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          double acc = 0.0;
          for (std::size_t a = 0; a < np; ++a)
            for (std::size_t b = 0; b < np; ++b)
              acc += root_inv(a, i) * iface(a, b) * root_inv(b, j);
          m.set(i, j, acc);
        }
      r = numerical_rank(m, 1.0, tol);
    }
    w.weights[static_cast<std::size_t>(r)] += fm.mass;
    raw += fm.mass;
  }
  w.raw_sum = raw;
  for (double& v : w.weights) v /= raw;
  return w;
}

WeightVector rank_based_weights(const SymMatrix& sigma, const PartitionSpec& part,
                                double tol, const QmcBudget& budget,
                                std::uint64_t seed) {
  const Cone cone = build_cone(sigma);
  return rank_based_weights(sigma, face_masses(cone, budget, seed), part, tol);
}

double mixture_cdf(const MixtureDist& dist, double t) {
  if (t < 0.0) return 0.0;
  double f = 0.0;
  for (std::size_t j = 0; j < dist.weights.size(); ++j)
    f += dist.weights[j] * chi2_cdf(t, static_cast<int>(j));
  return f;
}

double mixture_quantile(const MixtureDist& dist, double q) {
  if (q <= dist.weights[0]) return 0.0;
  const int k = static_cast<int>(dist.weights.size()) - 1;
  double lo = 0.0, hi = 10.0 + 10.0 * k;
  double mid = 0.5 * hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = mixture_cdf(dist, mid);
    if (std::fabs(f - q) <= 1e-10) break;
    if (f < q)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace chibar
