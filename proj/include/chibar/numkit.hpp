// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace chibar {

// Dense row-major rectangular matrix. Small dimensions only (the whole
// library operates on K <= ~20); no attempt at blocking or sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  // y = M x
  std::vector<double> mul(const std::vector<double>& x) const;
  // y = M^T x
  std::vector<double> tmul(const std::vector<double>& x) const;
  // columns restricted to `cols` (in the given order)
  Matrix select_cols(const std::vector<int>& cols) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Symmetric matrix, symmetrized on construction: set(i,j) writes both
// mirror entries, so |a_ij - a_ji| = 0 holds by storage.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(const std::vector<double>& d);
  // builds (a + a^T)/2 from a row-major dense buffer
  static SymMatrix from_dense(std::size_t dim, const std::vector<double>& rowmajor);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }

  // principal submatrix on the given indices, in the given order
  SymMatrix submatrix(const std::vector<int>& idx) const;
  std::vector<double> mul(const std::vector<double>& x) const;
  double max_abs_diag() const;
  bool is_diagonal() const;  // off-diagonals exactly zero

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// Eigenvalues descending; eigenvectors stored as columns of P, with the
// deterministic sign convention that the largest-magnitude component of
// each eigenvector is positive (first such index on ties).
struct SpectralDecomp {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // P, column j pairs with eigenvalues[j]
};

// Lower-triangular Cholesky factor, L L^T = m. Throws NotPositiveDefinite
// when a pivot drops to <= 1e-12 * max diagonal of m (the single source of
// "is PD" truth in this library).
Matrix cholesky(const SymMatrix& m);

// Cyclic Jacobi eigensolver, 100-sweep cap. Throws NoConvergence past the cap.
SpectralDecomp sym_eig(const SymMatrix& m);

SymMatrix inv_pd(const SymMatrix& m);

// Schur complement of the `out` block within m restricted to keep ∪ out:
// m_kk - m_ko m_oo^{-1} m_ok. keep empty gives a 0x0 matrix.
SymMatrix schur_complement(const SymMatrix& m, const std::vector<int>& keep,
                           const std::vector<int>& out);

// Spectral norm = max |eigenvalue|.
double op_norm(const SymMatrix& m);

// Count of eigenvalues > tol * reference_scale (m PSD).
int numerical_rank(const SymMatrix& m, double reference_scale, double tol);

// chi-square CDF; dof = 0 is the point mass at zero (CDF = 1 for t >= 0).
double chi2_cdf(double t, int dof);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Standard normal CDF and quantile (Wichura's AS241 for the inverse).
double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace chibar
