#pragma once

#include <complex>
#include <span>
#include <vector>

#include "sparse.hpp"

namespace dleig {

// Pivot acceptance threshold, relative to the largest input diagonal magnitude.
inline constexpr double kPivotTol = 1e-14;

// Profile (skyline) LDL^T factorization without pivoting. Scalar is double or
// std::complex<double>; complex matrices are transpose-symmetric, not
// Hermitian, which is what the shifted systems M - A/z produce. A pivot whose
// magnitude drops below pivot_tol * max|diag| raises a near-singular error
// carrying the pivot row.
template <class Scalar>
class SkylineFactorization {
 public:
  // Factors alpha*B + beta*C over the union sparsity pattern.
  static SkylineFactorization factor(const Csr& b_mat, const Csr& c_mat, Scalar alpha, Scalar beta,
                                     double pivot_tol = kPivotTol);
  static SkylineFactorization factor(const Csr& matrix, double pivot_tol = kPivotTol);

  int dim() const { return n_; }
  bool all_pivots_positive() const { return positive_pivots_; }
  std::size_t bytes() const;

  template <class Rhs>
  std::vector<Rhs> solve(std::span<const Rhs> rhs) const;

  template <class Rhs>
  std::vector<Rhs> solve(const std::vector<Rhs>& rhs) const {
    return solve(std::span<const Rhs>(rhs));
  }

 private:
  SkylineFactorization() = default;
  void factorize_in_place(double pivot_tol, double max_diag);

  int n_ = 0;
  std::vector<int> first_;          // first profile column of each row
  std::vector<std::size_t> offset_; // start of each row segment in lower_
  std::vector<Scalar> lower_;       // strictly-lower envelope, row-major
  std::vector<Scalar> diag_;        // D
  bool positive_pivots_ = false;
};

struct GeneralizedEig {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // M-orthonormal columns; empty unless requested
};

// Dense symmetric generalized eigensolver A v = lambda M v: Cholesky reduction
// to standard form, then cyclic Jacobi sweeps to off-diagonal Frobenius norm
// below 1e-12 of the matrix norm. Oracle-scale only (n <= 2000).
GeneralizedEig dense_generalized_eig(const Csr& a_mat, const Csr& m_mat, bool want_vectors = false);
GeneralizedEig dense_generalized_eig(std::vector<double> a_dense, std::vector<double> m_dense, int n,
                                     bool want_vectors = false);

std::vector<double> to_dense(const Csr& matrix);

}  // namespace dleig
