#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "opfun.hpp"
#include "rng.hpp"

using namespace dleig;

namespace {

const Rect kUnit{0.0, 0.0, 1.0, 1.0};

OperatorFunction make_op(int n) { return OperatorFunction(assemble(generate_uniform_mesh(n, kUnit))); }

ComplexVector to_complex(std::span<const double> v) {
  ComplexVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Complex(v[i], 0.0);
  return out;
}

ComplexVector random_complex(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ComplexVector v(static_cast<std::size_t>(n));
  for (auto& c : v) c = Complex(rng.next_symmetric(), rng.next_symmetric());
  return v;
}

}  // namespace

TEST_CASE("solution operator on the scalar system") {
  const OperatorFunction op = make_op(2);
  const std::vector<double> f{1.0};
  CHECK(op.apply_Th(std::span<const double>(f))[0] == doctest::Approx(1.0 / 32.0).epsilon(1e-14));

  const std::vector<double> zero{0.0};
  CHECK(op.apply_Th(std::span<const double>(zero))[0] == 0.0);
}

TEST_CASE("solution operator inverts oracle eigenpairs") {
  const OperatorFunction op = make_op(4);
  const auto eig = dense_generalized_eig(op.system().stiffness, op.system().mass, true);
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const auto u = op.apply_Th(std::span<const double>(eig.vectors[k]));
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - eig.vectors[k][i] / eig.values[k];
    CHECK(op.norm_M(std::span<const double>(r)) <= 1e-8 * op.norm_M(std::span<const double>(eig.vectors[k])));
  }
}

TEST_CASE("operator function on the scalar system") {
  const OperatorFunction op = make_op(2);
  const ComplexVector x{Complex{1.0, 0.0}};
  CHECK(std::abs(op.apply_F(Complex{32.0}, std::span<const Complex>(x))[0]) <= 1e-16);
  CHECK(op.apply_F(Complex{16.0}, std::span<const Complex>(x))[0].real() == doctest::Approx(-1.0 / 32.0).epsilon(1e-14));
  CHECK_THROWS_AS(op.apply_F(Complex{}, std::span<const Complex>(x)), Error);
}

TEST_CASE("operator function is linear") {
  const OperatorFunction op = make_op(6);
  const Complex z{12.0, 3.0};
  const auto x = random_complex(op.dim(), 11);
  const auto y = random_complex(op.dim(), 12);
  const Complex a{0.7, -0.3}, b{-1.2, 0.45};
  ComplexVector combo(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) combo[i] = a * x[i] + b * y[i];

  const auto lhs = op.apply_F(z, std::span<const Complex>(combo));
  const auto fx = op.apply_F(z, std::span<const Complex>(x));
  const auto fy = op.apply_F(z, std::span<const Complex>(y));
  ComplexVector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = lhs[i] - a * fx[i] - b * fy[i];
  CHECK(op.norm_M(std::span<const Complex>(diff)) <= 1e-12 * op.norm_M(std::span<const Complex>(lhs)));
}

TEST_CASE("operator function annihilates oracle eigenpairs") {
  const OperatorFunction op = make_op(4);
  const auto eig = dense_generalized_eig(op.system().stiffness, op.system().mass, true);
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const auto x = to_complex(eig.vectors[k]);
    const auto fx = op.apply_F(Complex{eig.values[k], 0.0}, std::span<const Complex>(x));
    CHECK(op.norm_M(std::span<const Complex>(fx)) <= 1e-8 * op.norm_M(std::span<const Complex>(x)));
  }
}

TEST_CASE("resolvent on the scalar system") {
  const OperatorFunction op = make_op(2);
  const ComplexVector f{Complex{1.0, 0.0}};
  CHECK(op.solve_resolvent(Complex{16.0}, std::span<const Complex>(f))[0].real() == doctest::Approx(-32.0).epsilon(1e-13));

  const ComplexVector zero{Complex{}};
  CHECK(std::abs(op.solve_resolvent(Complex{16.0}, std::span<const Complex>(zero))[0]) == 0.0);

  CHECK_THROWS_AS(op.solve_resolvent(Complex{}, std::span<const Complex>(f)), Error);
  for (const Complex z : {Complex{32.0, 0.0}, Complex{32.0, 1e-13}, Complex{32.0, -1e-13}}) {
    try {
      op.solve_resolvent(z, std::span<const Complex>(f));
      FAIL("expected eigenvalue-proximity at z near 32");
    } catch (const Error& e) {
      CHECK(e.code() == Status::EigenvalueProximity);
    }
  }
}

TEST_CASE("resolvent inverts the operator function") {
  const OperatorFunction op = make_op(8);
  const auto f = random_complex(op.dim(), 21);
  for (const Complex z : {Complex{10.0, 0.0}, Complex{33.3, 2.0}, Complex{90.0, -4.0}}) {
    const auto w = op.solve_resolvent(z, std::span<const Complex>(f));
    const auto back = op.apply_F(z, std::span<const Complex>(w));
    ComplexVector diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = back[i] - f[i];
    CHECK(op.norm_M(std::span<const Complex>(diff)) <= 1e-8 * op.norm_M(std::span<const Complex>(f)));
  }
}

TEST_CASE("M norm basics") {
  const OperatorFunction op = make_op(4);
  const std::vector<double> zero(static_cast<std::size_t>(op.dim()), 0.0);
  CHECK(op.norm_M(std::span<const double>(zero)) == 0.0);

  const std::vector<double> ones(static_cast<std::size_t>(op.dim()), 1.0);
  const double norm = op.norm_M(std::span<const double>(ones));
  CHECK(norm > 0.0);
  CHECK(norm < 1.0);  // interior hats cover less than the unit area
}

TEST_CASE("resolvent components satisfy Cauchy-Riemann finite differences") {
  const OperatorFunction op = make_op(6);
  const auto f = random_complex(op.dim(), 33);
  SplitMix64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex z{5.0 + 10.0 * rng.next_unit(), 1.0 + 2.0 * rng.next_unit()};
    const double delta = 1e-4 * std::abs(z);
    const auto at = [&](Complex zz) { return op.solve_resolvent(zz, std::span<const Complex>(f)); };
    const auto xp = at(z + delta), xm = at(z - delta);
    const auto yp = at(z + Complex{0.0, delta}), ym = at(z - Complex{0.0, delta});
    ComplexVector dbar(f.size()), dz(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Complex fd_x = (xp[i] - xm[i]) / (2.0 * delta);
      const Complex fd_y = (yp[i] - ym[i]) / (2.0 * delta);
      dbar[i] = 0.5 * (fd_x + Complex{0.0, 1.0} * fd_y);
      dz[i] = 0.5 * (fd_x - Complex{0.0, 1.0} * fd_y);
    }
    CHECK(op.norm_M(std::span<const Complex>(dbar)) <= 1e-6 * op.norm_M(std::span<const Complex>(dz)));
  }
}

TEST_CASE("operator norm estimate matches the spectral formula") {
  const OperatorFunction op = make_op(10);
  const auto eig = dense_generalized_eig(op.system().stiffness, op.system().mass);
  for (const Complex z : {Complex{10.0, 0.0}, Complex{20.0, 5.0}, Complex{100.0, 0.0}}) {
    double exact = 0.0;
    for (double lambda : eig.values) exact = std::max(exact, std::abs(1.0 / lambda - 1.0 / z));
    const double est = op.operator_norm_estimate(z);
    CHECK(est == doctest::Approx(exact).epsilon(1e-6));
    CHECK(est <= (1.0 / eig.values.front() + 1.0 / std::abs(z)) * (1.0 + 1e-9));
  }
}

TEST_CASE("operator norm estimate is stable under probe doubling") {
  const OperatorFunction op = make_op(10);
  for (const Complex z : {Complex{10.0, 0.0}, Complex{20.0, 5.0}}) {
    const double e20 = op.operator_norm_estimate(z, 20);
    const double e40 = op.operator_norm_estimate(z, 40);
    CHECK(e40 >= e20 - 1e-12);
    CHECK(e40 - e20 <= 1e-6);
  }
}

TEST_CASE("norm estimate rejects bad input") {
  const OperatorFunction op = make_op(4);
  CHECK_THROWS_AS(op.operator_norm_estimate(Complex{}), Error);
  CHECK_THROWS_AS(op.operator_norm_estimate(Complex{10.0, 0.0}, 0), Error);
}
