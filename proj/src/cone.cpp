// SPDX-License-Identifier: Apache-2.0
#include "chibar/cone.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chibar/errors.hpp"
#include "chibar/rng.hpp"

namespace chibar {

namespace {

constexpr int kMaxBuildDim = 20;
constexpr int kMaxEnumDim = 12;      // 2^K face enumeration cap
constexpr double kPosThreshold = 1e-10;  // coefficient > 0 decision

SymMatrix unit_diagonal_rescale(const SymMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sqrt(m(i, i));
  SymMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.set(i, i, 1.0);
    for (std::size_t j = 0; j < i; ++j) r.set(i, j, m(i, j) / (s[i] * s[j]));
  }
  return r;
}

}  // namespace

std::vector<int> Cone::face_indices(FaceId s) const {
  std::vector<int> idx;
  for (int i = 0; i < k; ++i)
    if (s & (FaceId{1} << i)) idx.push_back(i);
  return idx;
}

Cone build_cone(const SymMatrix& sigma) {
  const int k = static_cast<int>(sigma.dim());
  if (k < 1) throw DimensionTooLarge("empty covariance");
  if (k > kMaxBuildDim)
    throw DimensionTooLarge("K=" + std::to_string(k) + " exceeds build cap 20");
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j)
      if (sigma(i, j) < 0.0)
        throw NegativeCorrelation("sigma[" + std::to_string(i) + "," +
                                  std::to_string(j) + "] < 0");

  const SymMatrix info = inv_pd(sigma);  // I(theta0); PD gate
  const SpectralDecomp ed = sym_eig(info);

  Cone c;
  c.k = k;
  c.generators = Matrix(k, k);  // A = D^{1/2} P^T
  for (int i = 0; i < k; ++i) {
    const double sq = std::sqrt(ed.eigenvalues[i]);
    for (int j = 0; j < k; ++j) c.generators(i, j) = sq * ed.eigenvectors(j, i);
  }
  SymMatrix g(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int r = 0; r < k; ++r) s += c.generators(r, i) * c.generators(r, j);
      g.set(i, j, s);
    }
  c.gram = g;
  c.h = inv_pd(g);
  c.polar_gram = unit_diagonal_rescale(c.h);
  c.polar_h = inv_pd(c.polar_gram);
  return c;
}

std::vector<double> whiten(const Cone& cone, const std::vector<double>& z) {
  return cone.generators.mul(z);
}

OrthantEstimate internal_angle(const Cone& cone, FaceId s, const QmcBudget& budget,
                               std::uint64_t seed, AngleConvention conv) {
  const std::vector<int> idx = cone.face_indices(s);
  if (idx.empty()) return {1.0, 0.0, OrthantMethod::exact1};
  SymMatrix block =
      (conv == AngleConvention::paper)
          ? cone.h.submatrix(idx)
          : inv_pd(cone.gram.submatrix(idx));
  return orthant_prob(block, budget, derive_seed(seed, s, 1));
}

OrthantEstimate external_angle(const Cone& cone, FaceId s, const QmcBudget& budget,
                               std::uint64_t seed, AngleConvention conv) {
  const FaceId full = (cone.k >= 32) ? ~FaceId{0} : ((FaceId{1} << cone.k) - 1);
  const FaceId t = full & ~s;
  const std::vector<int> tdx = cone.face_indices(t);
  if (tdx.empty()) return {1.0, 0.0, OrthantMethod::exact1};
  SymMatrix block = (conv == AngleConvention::paper)
                        ? cone.polar_h.submatrix(tdx)
                        : schur_complement(cone.gram, tdx, cone.face_indices(s));
  return orthant_prob(block, budget, derive_seed(seed, s, 2));
}

std::vector<FaceMass> face_masses(const Cone& cone, const QmcBudget& budget,
                                  std::uint64_t seed, AngleConvention conv) {
  if (cone.k > kMaxEnumDim)
    throw DimensionTooLarge("face enumeration needs K <= 12, got K=" +
                            std::to_string(cone.k));
  const FaceId n_faces = FaceId{1} << cone.k;
  std::vector<FaceMass> out(n_faces);
  for (FaceId s = 0; s < n_faces; ++s) {
    const OrthantEstimate a = internal_angle(cone, s, budget, seed, conv);
    const OrthantEstimate b = external_angle(cone, s, budget, seed, conv);
    FaceMass fm;
    fm.face = s;
    fm.internal = a.value;
    fm.external = b.value;
    fm.mass = a.value * b.value;
    // first-order error propagation for the product
    fm.std_error = std::sqrt(b.value * b.value * a.std_error * a.std_error +
                             a.value * a.value * b.std_error * b.std_error);
    out[s] = fm;
  }
  return out;
}

WeightVector intrinsic_volumes(const std::vector<FaceMass>& masses, int k) {
  WeightVector w;
  w.weights.assign(static_cast<std::size_t>(k) + 1, 0.0);
  double raw = 0.0;
  for (const FaceMass& fm : masses) {
    w.weights[static_cast<std::size_t>(face_dim(fm.face))] += fm.mass;
    raw += fm.mass;
  }
  w.raw_sum = raw;
  w.method = WeightMethod::exact_face;
  for (double& v : w.weights) v /= raw;
  return w;
}

WeightVector intrinsic_volumes(const Cone& cone, const QmcBudget& budget,
                               std::uint64_t seed, AngleConvention conv) {
  return intrinsic_volumes(face_masses(cone, budget, seed, conv), cone.k);
}

ConeProjection project_cone(const Cone& cone, const std::vector<double>& z,
                            FaceId active) {
  const int k = cone.k;
  ConeProjection out;
  out.point.assign(k, 0.0);
  out.face = 0;
  const std::vector<int> act = cone.face_indices(active);
  if (act.empty()) return out;  // null cone {0}: projection is the origin

  const Matrix a = cone.generators.select_cols(act);
  const int na = static_cast<int>(act.size());

  // Lawson-Hanson active set. Small dense problems: normal equations with
  // a fresh Cholesky per solve are accurate enough and simple.
  std::vector<double> x(na, 0.0);
  std::vector<bool> passive(na, false);
  const std::vector<double> atz = a.tmul(z);
  double gtol = 0.0;
  for (double v : atz) gtol = std::max(gtol, std::fabs(v));
  gtol = 1e-12 * std::max(gtol, 1.0);

  const int cap = 10 * k;
  int iters = 0;
  std::vector<double> w(na), s(na);
  while (true) {
    // gradient w = A^T (z - A x)
    std::vector<double> resid(z);
    {
      const std::vector<double> ax = a.mul(x);
      for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= ax[i];
    }
    w = a.tmul(resid);

    int best = -1;
    double best_w = gtol;
    for (int i = 0; i < na; ++i)
      if (!passive[i] && w[i] > best_w) {
        best_w = w[i];
        best = i;
      }
    if (best < 0) break;
    passive[best] = true;

    while (true) {
      if (++iters > cap) throw NoConvergence("nnls iteration cap 10*K");
      // least squares on the passive set
      std::vector<int> pset;
      for (int i = 0; i < na; ++i)
        if (passive[i]) pset.push_back(i);
      if (pset.empty()) {
        std::fill(x.begin(), x.end(), 0.0);
        break;
      }
      SymMatrix gp(pset.size());
      std::vector<double> rhs(pset.size());
      for (std::size_t i = 0; i < pset.size(); ++i) {
        rhs[i] = atz[static_cast<std::size_t>(pset[i])];
        for (std::size_t j = 0; j <= i; ++j)
          gp.set(i, j, cone.gram(static_cast<std::size_t>(act[pset[i]]),
                                 static_cast<std::size_t>(act[pset[j]])));
      }
      const Matrix lp = cholesky(gp);
      std::vector<double> y(pset.size());
      for (std::size_t i = 0; i < pset.size(); ++i) {
        double v = rhs[i];
        for (std::size_t kk = 0; kk < i; ++kk) v -= lp(i, kk) * y[kk];
        y[i] = v / lp(i, i);
      }
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t i = pset.size(); i-- > 0;) {
        double v = y[i];
        for (std::size_t kk = i + 1; kk < pset.size(); ++kk)
          v -= lp(kk, i) * s[static_cast<std::size_t>(pset[kk])];
        s[static_cast<std::size_t>(pset[i])] = v / lp(i, i);
      }

      double smin = s[static_cast<std::size_t>(pset.front())];
      for (int i : pset) smin = std::min(smin, s[static_cast<std::size_t>(i)]);
      if (smin > 0.0) {
        for (int i = 0; i < na; ++i) x[i] = passive[i] ? s[i] : 0.0;
        break;
      }
      // step back to the feasibility boundary and drop the zeroed variables
      double alpha = 1.0;
      for (int i : pset) {
        const double si = s[static_cast<std::size_t>(i)];
        const double xi = x[static_cast<std::size_t>(i)];
        if (si <= 0.0) alpha = std::min(alpha, xi / (xi - si));
      }
      for (int i : pset) {
        const std::size_t ii = static_cast<std::size_t>(i);
        x[ii] += alpha * (s[ii] - x[ii]);
        if (s[ii] <= 0.0 && x[ii] <= kPosThreshold) {
          x[ii] = 0.0;
          passive[ii] = false;
        }
      }
    }
  }

  for (int i = 0; i < na; ++i)
    if (x[static_cast<std::size_t>(i)] > kPosThreshold)
      out.face |= FaceId{1} << act[static_cast<std::size_t>(i)];
  std::vector<double> coef_full(act.size());
  for (std::size_t i = 0; i < act.size(); ++i) coef_full[i] = x[i];
  out.point = a.mul(coef_full);
  return out;
}

WeightVector intrinsic_volumes_mc(const Cone& cone, std::size_t n,
                                  std::uint64_t seed) {
  const FaceId full = (FaceId{1} << cone.k) - 1;
  std::vector<double> counts(static_cast<std::size_t>(cone.k) + 1, 0.0);
  Rng rng(derive_seed(seed, 0xfacedu));
  std::vector<double> z(cone.k);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : z) v = rng.next_normal();
    const ConeProjection p = project_cone(cone, z, full);
    counts[static_cast<std::size_t>(face_dim(p.face))] += 1.0;
  }
  WeightVector w;
  w.weights.resize(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j)
    w.weights[j] = counts[j] / static_cast<double>(n);
  w.raw_sum = 1.0;
  w.method = WeightMethod::mc_oracle;
  return w;
}

}  // namespace chibar
