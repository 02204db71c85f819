#include "linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace dleig {

namespace {

template <class Scalar>
double magnitude(Scalar v) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return std::abs(v);
  } else {
    return std::abs(v);
  }
}

}  // namespace

template <class Scalar>
SkylineFactorization<Scalar> SkylineFactorization<Scalar>::factor(const Csr& b_mat, const Csr& c_mat,
                                                                  Scalar alpha, Scalar beta, double pivot_tol) {
  if (b_mat.n != c_mat.n) fail(Status::DimensionMismatch, "skyline factor: operand dimensions differ");
  const int n = b_mat.n;

  SkylineFactorization f;
  f.n_ = n;
  f.first_.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int first = i;
    const auto scan = [&](const Csr& m) {
      const int begin = m.row_ptr[static_cast<std::size_t>(i)];
      const int end = m.row_ptr[static_cast<std::size_t>(i) + 1];
      if (begin < end) first = std::min(first, m.cols[static_cast<std::size_t>(begin)]);
    };
    scan(b_mat);
    scan(c_mat);
    f.first_[static_cast<std::size_t>(i)] = first;
  }
  f.offset_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    f.offset_[static_cast<std::size_t>(i) + 1] =
        f.offset_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(i - f.first_[static_cast<std::size_t>(i)]);
  }
  f.lower_.assign(f.offset_[static_cast<std::size_t>(n)], Scalar{});
  f.diag_.assign(static_cast<std::size_t>(n), Scalar{});

  // The pivot threshold is scaled by the pre-cancellation diagonal magnitude,
  // so a shifted combination that annihilates its diagonal still registers as
  // near-singular.
  std::vector<double> diag_scale(static_cast<std::size_t>(n), 0.0);
  const auto spread = [&](const Csr& m, Scalar weight) {
    for (int i = 0; i < n; ++i) {
      for (int k = m.row_ptr[static_cast<std::size_t>(i)]; k < m.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
        const int j = m.cols[static_cast<std::size_t>(k)];
        const Scalar v = weight * m.vals[static_cast<std::size_t>(k)];
        if (j < i) {
          f.lower_[f.offset_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - f.first_[static_cast<std::size_t>(i)])] += v;
        } else if (j == i) {
          f.diag_[static_cast<std::size_t>(i)] += v;
          diag_scale[static_cast<std::size_t>(i)] += magnitude(v);
        }
      }
    }
  };
  spread(b_mat, alpha);
  spread(c_mat, beta);
  double max_diag = 0.0;
  for (double s : diag_scale) max_diag = std::max(max_diag, s);

  f.factorize_in_place(pivot_tol, max_diag);
  return f;
}

template <class Scalar>
SkylineFactorization<Scalar> SkylineFactorization<Scalar>::factor(const Csr& matrix, double pivot_tol) {
  Csr empty;
  empty.n = matrix.n;
  empty.row_ptr.assign(static_cast<std::size_t>(matrix.n) + 1, 0);
  return factor(matrix, empty, Scalar{1}, Scalar{}, pivot_tol);
}

template <class Scalar>
void SkylineFactorization<Scalar>::factorize_in_place(double pivot_tol, double max_diag) {
  const double threshold = pivot_tol * max_diag;
  std::vector<Scalar> scaled_row(static_cast<std::size_t>(n_));  // L_ik * D_k for the active row
  positive_pivots_ = true;

  for (int i = 0; i < n_; ++i) {
    const int fi = first_[static_cast<std::size_t>(i)];
    Scalar* row_i = lower_.data() + offset_[static_cast<std::size_t>(i)];
    Scalar diag_acc = diag_[static_cast<std::size_t>(i)];
    for (int j = fi; j < i; ++j) {
      const int fj = first_[static_cast<std::size_t>(j)];
      const Scalar* row_j = lower_.data() + offset_[static_cast<std::size_t>(j)];
      const int kmin = std::max(fi, fj);
      Scalar s = row_i[j - fi];
      const Scalar* a = scaled_row.data() + (kmin - fi);
      const Scalar* b = row_j + (kmin - fj);
      for (int k = 0; k < j - kmin; ++k) s -= a[k] * b[k];
      const Scalar lij = s / diag_[static_cast<std::size_t>(j)];
      row_i[j - fi] = lij;
      scaled_row[static_cast<std::size_t>(j - fi)] = s;  // = L_ij * D_j
      diag_acc -= lij * s;
    }
    if (!(magnitude(diag_acc) > threshold)) {
      fail(Status::NearSingular, "skyline factor: pivot " + std::to_string(i) + " below threshold", i);
    }
    if constexpr (std::is_same_v<Scalar, double>) {
      if (!(diag_acc > 0.0)) positive_pivots_ = false;
    } else {
      positive_pivots_ = false;  // sign undefined for complex pivots
    }
    diag_[static_cast<std::size_t>(i)] = diag_acc;
  }
}

template <class Scalar>
std::size_t SkylineFactorization<Scalar>::bytes() const {
  return lower_.size() * sizeof(Scalar) + diag_.size() * sizeof(Scalar) + first_.size() * sizeof(int) +
         offset_.size() * sizeof(std::size_t);
}

template <class Scalar>
template <class Rhs>
std::vector<Rhs> SkylineFactorization<Scalar>::solve(std::span<const Rhs> rhs) const {
  if (static_cast<int>(rhs.size()) != n_) fail(Status::DimensionMismatch, "skyline solve: rhs dimension mismatch");
  std::vector<Rhs> x(rhs.begin(), rhs.end());

  for (int i = 0; i < n_; ++i) {
    const int fi = first_[static_cast<std::size_t>(i)];
    const Scalar* row_i = lower_.data() + offset_[static_cast<std::size_t>(i)];
    Rhs acc{};
    for (int k = fi; k < i; ++k) acc += row_i[k - fi] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] -= acc;
  }
  for (int i = 0; i < n_; ++i) {
    x[static_cast<std::size_t>(i)] = static_cast<Rhs>(x[static_cast<std::size_t>(i)] / diag_[static_cast<std::size_t>(i)]);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    const int fi = first_[static_cast<std::size_t>(i)];
    const Scalar* row_i = lower_.data() + offset_[static_cast<std::size_t>(i)];
    const Rhs xi = x[static_cast<std::size_t>(i)];
    for (int k = fi; k < i; ++k) x[static_cast<std::size_t>(k)] -= row_i[k - fi] * xi;
  }
  return x;
}

template class SkylineFactorization<double>;
template class SkylineFactorization<std::complex<double>>;
template std::vector<double> SkylineFactorization<double>::solve(std::span<const double>) const;
template std::vector<std::complex<double>> SkylineFactorization<double>::solve(std::span<const std::complex<double>>) const;
template std::vector<std::complex<double>> SkylineFactorization<std::complex<double>>::solve(std::span<const std::complex<double>>) const;

std::vector<double> to_dense(const Csr& matrix) {
  std::vector<double> dense(static_cast<std::size_t>(matrix.n) * static_cast<std::size_t>(matrix.n), 0.0);
  for (int i = 0; i < matrix.n; ++i) {
    for (int k = matrix.row_ptr[static_cast<std::size_t>(i)]; k < matrix.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      dense[static_cast<std::size_t>(i) * static_cast<std::size_t>(matrix.n) + static_cast<std::size_t>(matrix.cols[static_cast<std::size_t>(k)])] =
          matrix.vals[static_cast<std::size_t>(k)];
    }
  }
  return dense;
}

namespace {

// Dense lower-triangular Cholesky, in place.
void cholesky(std::vector<double>& m, int n) {
  for (int j = 0; j < n; ++j) {
    double d = m[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) d -= m[static_cast<std::size_t>(j) * n + k] * m[static_cast<std::size_t>(j) * n + k];
    if (!(d > 0.0)) fail(Status::InvalidArgument, "dense_generalized_eig: mass matrix not positive definite");
    const double ljj = std::sqrt(d);
    m[static_cast<std::size_t>(j) * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = m[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) s -= m[static_cast<std::size_t>(i) * n + k] * m[static_cast<std::size_t>(j) * n + k];
      m[static_cast<std::size_t>(i) * n + j] = s / ljj;
    }
  }
}

void forward_solve_column(const std::vector<double>& l, int n, double* col) {
  for (int i = 0; i < n; ++i) {
    double s = col[i];
    for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * n + k] * col[k];
    col[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
}

void backward_solve_column(const std::vector<double>& l, int n, double* col) {
  for (int i = n - 1; i >= 0; --i) {
    double s = col[i];
    for (int k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k) * n + i] * col[k];
    col[i] = s / l[static_cast<std::size_t>(i) * n + i];
  }
}

double off_diagonal_norm(const std::vector<double>& c, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) s += c[static_cast<std::size_t>(i) * n + j] * c[static_cast<std::size_t>(i) * n + j];
    }
  }
  return std::sqrt(s);
}

double frobenius_norm(const std::vector<double>& c, int n) {
  double s = 0.0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(n) * n; ++k) s += c[k] * c[k];
  return std::sqrt(s);
}

}  // namespace

GeneralizedEig dense_generalized_eig(std::vector<double> a_dense, std::vector<double> m_dense, int n,
                                     bool want_vectors) {
  if (n < 1 || a_dense.size() != static_cast<std::size_t>(n) * n || m_dense.size() != a_dense.size()) {
    fail(Status::InvalidArgument, "dense_generalized_eig: dimension mismatch");
  }
  if (n > 2000) fail(Status::InvalidArgument, "dense_generalized_eig: problem too large for the dense oracle (n > 2000)");

  cholesky(m_dense, n);
  const std::vector<double>& l = m_dense;

  // C = L^-1 A L^-T, via two sweeps of forward solves on columns.
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = a_dense[static_cast<std::size_t>(i) * n + j];
    forward_solve_column(l, n, col.data());
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i) * n + j] = col[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) col[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(i) * n + j];
    forward_solve_column(l, n, col.data());
    for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i) * n + j] = col[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (c[static_cast<std::size_t>(i) * n + j] + c[static_cast<std::size_t>(j) * n + i]);
      c[static_cast<std::size_t>(i) * n + j] = avg;
      c[static_cast<std::size_t>(j) * n + i] = avg;
    }
  }

  std::vector<double> v;
  if (want_vectors) {
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
  }

  // Cyclic Jacobi sweeps.
  const int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(c, n) <= 1e-12 * frobenius_norm(c, n)) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double cpq = c[static_cast<std::size_t>(p) * n + q];
        if (cpq == 0.0) continue;
        const double cpp = c[static_cast<std::size_t>(p) * n + p];
        const double cqq = c[static_cast<std::size_t>(q) * n + q];
        const double tau = (cqq - cpp) / (2.0 * cpq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;
        for (int k = 0; k < n; ++k) {
          const double ckp = c[static_cast<std::size_t>(k) * n + p];
          const double ckq = c[static_cast<std::size_t>(k) * n + q];
          c[static_cast<std::size_t>(k) * n + p] = cs * ckp - sn * ckq;
          c[static_cast<std::size_t>(k) * n + q] = sn * ckp + cs * ckq;
        }
        for (int k = 0; k < n; ++k) {
          const double cpk = c[static_cast<std::size_t>(p) * n + k];
          const double cqk = c[static_cast<std::size_t>(q) * n + k];
          c[static_cast<std::size_t>(p) * n + k] = cs * cpk - sn * cqk;
          c[static_cast<std::size_t>(q) * n + k] = sn * cpk + cs * cqk;
        }
        if (want_vectors) {
          for (int k = 0; k < n; ++k) {
            const double vkp = v[static_cast<std::size_t>(k) * n + p];
            const double vkq = v[static_cast<std::size_t>(k) * n + q];
            v[static_cast<std::size_t>(k) * n + p] = cs * vkp - sn * vkq;
            v[static_cast<std::size_t>(k) * n + q] = sn * vkp + cs * vkq;
          }
        }
      }
    }
  }
  if (sweep == max_sweeps) fail(Status::Internal, "dense_generalized_eig: Jacobi sweeps did not converge");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return c[static_cast<std::size_t>(a) * n + a] < c[static_cast<std::size_t>(b) * n + b];
  });

  GeneralizedEig out;
  out.values.reserve(static_cast<std::size_t>(n));
  for (int k : order) out.values.push_back(c[static_cast<std::size_t>(k) * n + k]);

  if (want_vectors) {
    out.vectors.resize(static_cast<std::size_t>(n));
    for (int idx = 0; idx < n; ++idx) {
      const int k = order[static_cast<std::size_t>(idx)];
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i) * n + k];
      backward_solve_column(l, n, x.data());  // eigenvector = L^-T (Jacobi column)
      out.vectors[static_cast<std::size_t>(idx)] = std::move(x);
    }
  }
  return out;
}

GeneralizedEig dense_generalized_eig(const Csr& a_mat, const Csr& m_mat, bool want_vectors) {
  if (a_mat.n != m_mat.n) fail(Status::InvalidArgument, "dense_generalized_eig: dimension mismatch");
  if (a_mat.n > 2000) fail(Status::InvalidArgument, "dense_generalized_eig: problem too large for the dense oracle (n > 2000)");
  return dense_generalized_eig(to_dense(a_mat), to_dense(m_mat), a_mat.n, want_vectors);
}

}  // namespace dleig
