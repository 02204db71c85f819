#pragma once

#include <complex>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "assembly.hpp"
#include "linsolve.hpp"

namespace dleig {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr std::uint64_t kDefaultProbeSeed = 20240601;

// Discrete solution operator T_h and the operator function F_h(z) = T_h - z^{-1} I
// on interior coefficient vectors, with the M inner product playing the role of
// the L2 inner product. T_h is applied through the cached stiffness
// factorization (A u = M f); F_h(z)^{-1} f is obtained from (M - A/z) w = A f.
class OperatorFunction {
 public:
  explicit OperatorFunction(AssembledSystem system, std::size_t shift_cache_bytes = std::size_t{1} << 26);

  const AssembledSystem& system() const { return system_; }
  int dim() const { return system_.n_dof; }

  std::vector<double> apply_Th(std::span<const double> f) const;
  ComplexVector apply_Th(std::span<const Complex> f) const;

  // F_h(z) x; z must be nonzero.
  ComplexVector apply_F(Complex z, std::span<const Complex> x) const;

  // Solves F_h(z) w = f. Raises an eigenvalue-proximity error when z is
  // numerically a discrete eigenvalue (pivot collapse in the shifted factor).
  ComplexVector solve_resolvent(Complex z, std::span<const Complex> f) const;

  double norm_M(std::span<const double> x) const;
  double norm_M(std::span<const Complex> x) const;

  // Estimate of the M-operator norm of F_h(z): the max over num_probes seeded
  // starts, each refined by a locally optimal 3-term iteration on the real
  // M-self-adjoint operator F*F = T^2 - 2 Re(1/z) T + |z|^{-2} I.
  double operator_norm_estimate(Complex z, int num_probes = 20, std::uint64_t seed = kDefaultProbeSeed) const;

 private:
  using ShiftFactor = std::shared_ptr<const SkylineFactorization<Complex>>;

  ShiftFactor shifted_factorization(Complex z) const;

  AssembledSystem system_;
  SkylineFactorization<double> stiffness_;

  // Bounded thread-safe memo of shifted factorizations keyed by the exact z.
  struct CacheKey {
    std::uint64_t re_bits, im_bits;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const noexcept;
  };
  mutable std::mutex cache_mutex_;
  mutable std::list<std::pair<CacheKey, ShiftFactor>> cache_order_;  // front = most recent
  mutable std::unordered_map<CacheKey, std::list<std::pair<CacheKey, ShiftFactor>>::iterator, CacheKeyHash> cache_;
  mutable std::size_t cache_bytes_ = 0;
  std::size_t cache_capacity_bytes_;
};

}  // namespace dleig
