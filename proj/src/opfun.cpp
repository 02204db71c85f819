#include "opfun.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace dleig {

OperatorFunction::OperatorFunction(AssembledSystem system, std::size_t shift_cache_bytes)
    : system_(std::move(system)),
      stiffness_(SkylineFactorization<double>::factor(system_.stiffness)),
      cache_capacity_bytes_(shift_cache_bytes) {}

std::vector<double> OperatorFunction::apply_Th(std::span<const double> f) const {
  return stiffness_.solve(std::span<const double>(system_.mass.multiply(f)));
}

ComplexVector OperatorFunction::apply_Th(std::span<const Complex> f) const {
  return stiffness_.solve(std::span<const Complex>(system_.mass.multiply(f)));
}

ComplexVector OperatorFunction::apply_F(Complex z, std::span<const Complex> x) const {
  if (z == Complex{}) fail(Status::InvalidArgument, "apply_F: z must be nonzero");
  ComplexVector u = apply_Th(x);
  const Complex inv_z = 1.0 / z;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= inv_z * x[i];
  return u;
}

std::size_t OperatorFunction::CacheKeyHash::operator()(const CacheKey& k) const noexcept {
  std::uint64_t h = k.re_bits * 0x9E3779B97F4A7C15ULL;
  h ^= k.im_bits + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

OperatorFunction::ShiftFactor OperatorFunction::shifted_factorization(Complex z) const {
  const CacheKey key{std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      cache_order_.splice(cache_order_.begin(), cache_order_, it->second);
      return it->second->second;
    }
  }

  // Factor outside the lock; a duplicate factorization of the same key by a
  // concurrent caller is benign.
  ShiftFactor factor;
  try {
    factor = std::make_shared<const SkylineFactorization<Complex>>(
        SkylineFactorization<Complex>::factor(system_.mass, system_.stiffness, Complex{1.0}, -1.0 / z));
  } catch (const Error& e) {
    if (e.code() == Status::NearSingular) {
      fail(Status::EigenvalueProximity,
           "solve_resolvent: z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
               ") is numerically a discrete eigenvalue (" + e.what() + ")",
           e.index());
    }
    throw;
  }

  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second->second;
  cache_order_.emplace_front(key, factor);
  cache_.emplace(key, cache_order_.begin());
  cache_bytes_ += factor->bytes();
  while (cache_bytes_ > cache_capacity_bytes_ && cache_order_.size() > 1) {
    const auto& victim = cache_order_.back();
    cache_bytes_ -= victim.second->bytes();
    cache_.erase(victim.first);
    cache_order_.pop_back();
  }
  return factor;
}

ComplexVector OperatorFunction::solve_resolvent(Complex z, std::span<const Complex> f) const {
  if (z == Complex{}) fail(Status::InvalidArgument, "solve_resolvent: z must be nonzero");
  if (static_cast<int>(f.size()) != dim()) fail(Status::DimensionMismatch, "solve_resolvent: dimension mismatch");
  const ShiftFactor factor = shifted_factorization(z);
  const ComplexVector rhs = system_.stiffness.multiply(f);
  return factor->solve(std::span<const Complex>(rhs));
}

double OperatorFunction::norm_M(std::span<const double> x) const {
  const auto mx = system_.mass.multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) s += x[i] * mx[i];
  return std::sqrt(std::max(s, 0.0));
}

double OperatorFunction::norm_M(std::span<const Complex> x) const {
  const auto mx = system_.mass.multiply(x);
  double s = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) s += (std::conj(x[i]) * mx[i]).real();
  return std::sqrt(std::max(s, 0.0));
}

double OperatorFunction::operator_norm_estimate(Complex z, int num_probes, std::uint64_t seed) const {
  if (z == Complex{}) fail(Status::InvalidArgument, "operator_norm_estimate: z must be nonzero");
  if (num_probes < 1) fail(Status::InvalidArgument, "operator_norm_estimate: need at least one probe");
  const int n = dim();
  const double two_re_inv_z = 2.0 * (1.0 / z).real();
  const double inv_abs2 = 1.0 / std::norm(z);

  const auto mdot = [&](std::span<const double> a, std::span<const double> b) {
    const auto mb = system_.mass.multiply(b);
    double s = 0.0;
    for (std::size_t i = 0; i < mb.size(); ++i) s += a[i] * mb[i];
    return s;
  };
  // G = F(z)* F(z) = T^2 - 2 Re(1/z) T + |z|^{-2} I, a real operator.
  const auto apply_G = [&](const std::vector<double>& x) {
    const auto tx = apply_Th(std::span<const double>(x));
    auto ttx = apply_Th(std::span<const double>(tx));
    for (std::size_t i = 0; i < ttx.size(); ++i) ttx[i] += -two_re_inv_z * tx[i] + inv_abs2 * x[i];
    return ttx;
  };

  SplitMix64 rng(seed);
  double best = 0.0;
  for (int probe = 0; probe < num_probes; ++probe) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& c : v) c = rng.next_symmetric();
    const double nv = norm_M(std::span<const double>(v));
    if (!(nv > 0.0)) continue;
    for (auto& c : v) c /= nv;

    std::vector<double> prev;
    double value = 0.0;
    for (int it = 0; it < 400; ++it) {
      const auto gv = apply_G(v);

      // Rayleigh-Ritz over span{v, Gv, previous iterate}, M-orthonormalized.
      std::vector<std::vector<double>> basis;
      const std::vector<double>* candidates[] = {&v, &gv, &prev};
      for (const std::vector<double>* cand : candidates) {
        if (cand->empty()) continue;
        std::vector<double> w = *cand;
        for (const auto& q : basis) {
          const double proj = mdot(w, q);
          for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * q[i];
        }
        const double nw = norm_M(std::span<const double>(w));
        if (nw > 1e-12) {
          for (auto& c : w) c /= nw;
          basis.push_back(std::move(w));
        }
      }
      const int m = static_cast<int>(basis.size());
      std::vector<std::vector<double>> g_basis;
      g_basis.reserve(static_cast<std::size_t>(m));
      for (const auto& q : basis) g_basis.push_back(apply_G(q));
      std::vector<double> h(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
      std::vector<double> identity(h.size(), 0.0);
      for (int a = 0; a < m; ++a) {
        identity[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)] = 1.0;
        for (int b = 0; b < m; ++b) {
          h[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] = mdot(basis[static_cast<std::size_t>(a)], g_basis[static_cast<std::size_t>(b)]);
        }
      }
      for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
          const double avg = 0.5 * (h[static_cast<std::size_t>(a) * m + b] + h[static_cast<std::size_t>(b) * m + a]);
          h[static_cast<std::size_t>(a) * m + b] = avg;
          h[static_cast<std::size_t>(b) * m + a] = avg;
        }
      }
      const auto small = dense_generalized_eig(h, identity, m, true);
      const double mu = small.values.back();
      const auto& coeff = small.vectors.back();
      std::vector<double> next(static_cast<std::size_t>(n), 0.0);
      for (int a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += coeff[static_cast<std::size_t>(a)] * basis[static_cast<std::size_t>(a)][i];
      }
      const double nn = norm_M(std::span<const double>(next));
      for (auto& c : next) c /= nn;
      prev = std::move(v);
      v = std::move(next);

      const double new_value = std::sqrt(std::max(mu, 0.0));
      if (it > 0 && std::abs(new_value - value) <= 1e-13 * std::max(new_value, 1e-300)) {
        value = new_value;
        break;
      }
      value = new_value;
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace dleig
