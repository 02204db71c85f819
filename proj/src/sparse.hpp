#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

namespace dleig {

// Square sparse matrix in compressed-row form with sorted column indices.
struct Csr {
  int n = 0;
  std::vector<int> row_ptr;  // size n + 1
  std::vector<int> cols;
  std::vector<double> vals;

  int nnz() const { return static_cast<int>(cols.size()); }

  // Entry lookup; absent entries read as 0.
  double at(int i, int j) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<std::complex<double>> multiply(std::span<const std::complex<double>> x) const;

  double sum_entries() const;
  double max_abs_diagonal() const;
};

// Accumulates duplicate (i, j) contributions; build() emits sorted rows.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) : n_(n), rows_(static_cast<std::size_t>(n)) {}

  void add(int i, int j, double value) { rows_[static_cast<std::size_t>(i)][j] += value; }

  Csr build() const;

 private:
  int n_;
  std::vector<std::map<int, double>> rows_;
};

}  // namespace dleig
