#include "susy/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace susy::quad;

TEST_CASE("Gauss-Legendre integrates polynomials up to degree 2n-1") {
  for (int n : {1, 2, 5, 16, 64}) {
    const Rule r = gauss_legendre(n, -1.0, 2.0);
    for (int d = 0; d < 2 * n; d += std::max(1, n / 4)) {
      const double got = integrate(r, [&](double x) { return std::pow(x, d); });
      const double exact = (std::pow(2.0, d + 1) - std::pow(-1.0, d + 1)) / (d + 1);
      CHECK(std::abs(got - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("Gauss-Hermite and Gauss-Laguerre moments") {
  const Rule h = gauss_hermite(30);
  CHECK(std::abs(integrate(h, [](double) { return 1.0; }) - std::sqrt(std::numbers::pi)) < 1e-13);
  CHECK(std::abs(integrate(h, [](double x) { return x * x; }) - std::sqrt(std::numbers::pi) / 2) < 1e-13);
  CHECK(std::abs(integrate(h, [](double x) { return std::cos(x); }) -
                 std::sqrt(std::numbers::pi) * std::exp(-0.25)) < 1e-13);
  const Rule l = gauss_laguerre(30);
  CHECK(std::abs(integrate(l, [](double x) { return x * x * x; }) - 6.0) < 1e-11);
  const Rule la = gauss_laguerre(20, 0.5);
  CHECK(std::abs(integrate(la, [](double) { return 1.0; }) - std::tgamma(1.5)) < 1e-13);
}

TEST_CASE("composite and periodic rules converge") {
  const double exact = 2.0;
  const Rule c = composite_legendre(0.0, std::numbers::pi, 8, 10);
  CHECK(std::abs(integrate(c, [](double x) { return std::sin(x); }) - exact) < 1e-14);
  const Rule p = periodic_trapezoid(32, 2 * std::numbers::pi);
  // int_0^{2pi} exp(cos t) dt = 2 pi I0(1)
  CHECK(std::abs(integrate(p, [](double t) { return std::exp(std::cos(t)); }) -
                 2 * std::numbers::pi * std::cyl_bessel_i(0.0, 1.0)) < 1e-13);
  // node doubling does not change a converged periodic result
  const Rule p2 = periodic_trapezoid(64, 2 * std::numbers::pi);
  CHECK(std::abs(integrate(p, [](double t) { return std::exp(std::cos(t)); }) -
                 integrate(p2, [](double t) { return std::exp(std::cos(t)); })) < 1e-13);
}
