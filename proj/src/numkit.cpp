// SPDX-License-Identifier: Apache-2.0
#include "chibar/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "chibar/errors.hpp"

namespace chibar {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::mul(const std::vector<double>& x) const {
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> Matrix::tmul(const std::vector<double>& x) const {
  std::vector<double> y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[j] += data_[i * cols_ + j] * x[i];
  return y;
}

Matrix Matrix::select_cols(const std::vector<int>& cols) const {
  Matrix m(rows_, cols.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      m(i, j) = (*this)(i, static_cast<std::size_t>(cols[j]));
  return m;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
  return m;
}

SymMatrix SymMatrix::from_dense(std::size_t dim, const std::vector<double>& a) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      m.set(i, j, 0.5 * (a[i * dim + j] + a[j * dim + i]));
  return m;
}

SymMatrix SymMatrix::submatrix(const std::vector<int>& idx) const {
  SymMatrix m(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      m.set(i, j, (*this)(static_cast<std::size_t>(idx[i]),
                          static_cast<std::size_t>(idx[j])));
  return m;
}

std::vector<double> SymMatrix::mul(const std::vector<double>& x) const {
  std::vector<double> y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

double SymMatrix::max_abs_diag() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    m = std::max(m, std::fabs((*this)(i, i)));
  return m;
}

bool SymMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i + 1; j < dim_; ++j)
      if ((*this)(i, j) != 0.0) return false;
  return true;
}

Matrix cholesky(const SymMatrix& m) {
  const std::size_t n = m.dim();
  const double pivot_floor = 1e-12 * std::max(m.max_abs_diag(), 0.0);
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= pivot_floor || !(d > 0.0))
      throw NotPositiveDefinite("cholesky pivot " + std::to_string(d) +
                                " at column " + std::to_string(j));
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

SpectralDecomp sym_eig(const SymMatrix& m) {
  const std::size_t n = m.dim();
  // work on a dense copy; accumulate rotations in v
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  Matrix v = Matrix::identity(n);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a[i * n + j]));
  const double stop = (scale > 0.0) ? 1e-15 * scale : 0.0;

  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a[p * n + q]));
    if (off <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) <= stop) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a[p * n + q]));
    if (off > stop) throw NoConvergence("jacobi sweeps exhausted");
  }

  // descending eigenvalue order, stable on ties
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  SpectralDecomp d;
  d.eigenvalues.resize(n);
  d.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    d.eigenvalues[j] = a[src * n + src];
    // sign convention: largest-magnitude component positive
    std::size_t imax = 0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double av = std::fabs(v(i, src));
      if (av > vmax) {
        vmax = av;
        imax = i;
      }
    }
    const double flip = (v(imax, src) < 0.0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) d.eigenvectors(i, j) = flip * v(i, src);
  }
  return d;
}

SymMatrix inv_pd(const SymMatrix& m) {
  const std::size_t n = m.dim();
  const Matrix l = cholesky(m);
  // solve L L^T X = I column by column
  std::vector<double> inv(n * n, 0.0);
  std::vector<double> y(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
      y[i] = s / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * inv[k * n + c];
      inv[i * n + c] = s / l(i, i);
    }
  }
  return SymMatrix::from_dense(n, inv);
}

SymMatrix schur_complement(const SymMatrix& m, const std::vector<int>& keep,
                           const std::vector<int>& out) {
  if (keep.empty()) return SymMatrix(0);
  const SymMatrix m_kk = m.submatrix(keep);
  if (out.empty()) return m_kk;
  const SymMatrix m_oo_inv = inv_pd(m.submatrix(out));
  // cross block m_ko, row-major keep x out
  const std::size_t nk = keep.size(), no = out.size();
  std::vector<double> cross(nk * no);
  for (std::size_t i = 0; i < nk; ++i)
    for (std::size_t j = 0; j < no; ++j)
      cross[i * no + j] = m(static_cast<std::size_t>(keep[i]),
                            static_cast<std::size_t>(out[j]));
  SymMatrix r(nk);
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m_kk(i, j);
      for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
          s -= cross[i * no + a] * m_oo_inv(a, b) * cross[j * no + b];
      r.set(i, j, s);
    }
  }
  return r;
}

double op_norm(const SymMatrix& m) {
  if (m.dim() == 0) return 0.0;
  const SpectralDecomp d = sym_eig(m);
  double r = 0.0;
  for (double e : d.eigenvalues) r = std::max(r, std::fabs(e));
  return r;
}

int numerical_rank(const SymMatrix& m, double reference_scale, double tol) {
  if (m.dim() == 0) return 0;
  const SpectralDecomp d = sym_eig(m);
  int r = 0;
  for (double e : d.eigenvalues)
    if (e > tol * reference_scale) ++r;
  return r;
}

namespace {

// lower incomplete gamma, series branch (x < a + 1)
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// upper incomplete gamma via Lentz continued fraction (x >= a + 1)
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(double t, int dof) {
  if (t < 0.0) return 0.0;
  if (dof == 0) return 1.0;  // point mass at zero
  return gamma_p(0.5 * dof, 0.5 * t);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Wichura's algorithm AS241 (PPND16), |error| ~ 1e-16 over (0,1).
double normal_quantile(double p) {
  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(p < 1.0)) return std::numeric_limits<double>::infinity();
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace chibar
