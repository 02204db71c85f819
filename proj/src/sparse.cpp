#include "sparse.hpp"

#include <algorithm>
#include <cmath>

namespace dleig {

double Csr::at(int i, int j) const {
  const auto begin = cols.begin() + row_ptr[static_cast<std::size_t>(i)];
  const auto end = cols.begin() + row_ptr[static_cast<std::size_t>(i) + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return vals[static_cast<std::size_t>(it - cols.begin())];
}

template <class T>
static std::vector<T> multiply_impl(const Csr& m, std::span<const T> x) {
  std::vector<T> y(static_cast<std::size_t>(m.n), T{});
  for (int i = 0; i < m.n; ++i) {
    T acc{};
    for (int k = m.row_ptr[static_cast<std::size_t>(i)]; k < m.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      acc += m.vals[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(m.cols[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> Csr::multiply(std::span<const double> x) const { return multiply_impl(*this, x); }

std::vector<std::complex<double>> Csr::multiply(std::span<const std::complex<double>> x) const {
  return multiply_impl(*this, x);
}

double Csr::sum_entries() const {
  double s = 0.0;
  for (double v : vals) s += v;
  return s;
}

double Csr::max_abs_diagonal() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(at(i, i)));
  return m;
}

Csr CsrBuilder::build() const {
  Csr out;
  out.n = n_;
  out.row_ptr.assign(static_cast<std::size_t>(n_) + 1, 0);
  std::size_t nnz = 0;
  for (const auto& row : rows_) nnz += row.size();
  out.cols.reserve(nnz);
  out.vals.reserve(nnz);
  for (int i = 0; i < n_; ++i) {
    for (const auto& [j, v] : rows_[static_cast<std::size_t>(i)]) {
      out.cols.push_back(j);
      out.vals.push_back(v);
    }
    out.row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<int>(out.cols.size());
  }
  return out;
}

}  // namespace dleig
