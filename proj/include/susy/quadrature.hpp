#pragma once

// Fixed quadrature rules. Nodes come from the Golub-Welsch eigenproblem,
// polished by Newton steps on the Legendre recurrence for the Legendre case.

#include <complex>
#include <functional>
#include <vector>

namespace susy::quad {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre with n nodes mapped to [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Hermite for weight exp(-x^2) on the real line.
Rule gauss_hermite(int n);

// Generalized Gauss-Laguerre for weight x^alpha exp(-x) on [0, inf).
Rule gauss_laguerre(int n, double alpha = 0.0);

// `panels` equal Gauss-Legendre panels of `order` nodes each on [a, b].
Rule composite_legendre(double a, double b, int panels, int order);

// Composite rule over explicit breakpoints (sorted), same order on every panel.
Rule composite_legendre(const std::vector<double>& breaks, int order);

// Trapezoid rule for a periodic integrand on [0, period) with n nodes.
Rule periodic_trapezoid(int n, double period);

// Tensor product of two rules; nodes flattened row-major (first rule outer).
struct Rule2 {
  std::vector<double> x, y, w;
};
Rule2 tensor(const Rule& a, const Rule& b);

template <class F>
auto integrate(const Rule& r, F&& f) -> decltype(f(0.0) * 1.0) {
  using T = decltype(f(0.0) * 1.0);
  T acc{};
  for (std::size_t i = 0; i < r.size(); ++i) acc += f(r.x[i]) * r.w[i];
  return acc;
}

}  // namespace susy::quad
