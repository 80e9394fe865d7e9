#include "susy/quadrature.hpp"

#include "susy/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace susy::quad {

namespace {

// Jacobi matrix eigenproblem: diag alpha, off-diag sqrt(beta); weights mu0 * v0^2.
Rule golub_welsch(const std::vector<double>& alpha, const std::vector<double>& offdiag, double mu0) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) j(i, i) = alpha[i];
  for (int i = 0; i + 1 < n; ++i) j(i, i + 1) = j(i + 1, i) = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  if (es.info() != Eigen::Success) throw ConvergenceError("Golub-Welsch eigen solve failed");
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0;
  }
  return r;
}

void require_positive(int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
}

}  // namespace

Rule gauss_legendre(int n, double a, double b) {
  require_positive(n);
  std::vector<double> alpha(n, 0.0), off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Rule r = golub_welsch(alpha, off, 2.0);
  // Newton polish on P_n; weights from the derivative are more accurate than v0^2.
  for (int i = 0; i < n; ++i) {
    double x = r.x[i];
    double dp = 1.0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / dp;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = mid + half * r.x[i];
    r.w[i] *= half;
  }
  return r;
}

Rule gauss_hermite(int n) {
  require_positive(n);
  std::vector<double> alpha(n, 0.0), off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(alpha, off, std::sqrt(std::numbers::pi));
}

Rule gauss_laguerre(int n, double alpha) {
  require_positive(n);
  if (alpha <= -1.0) throw DomainError("Laguerre alpha must exceed -1");
  std::vector<double> a(n), off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) a[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + alpha));
  return golub_welsch(a, off, std::tgamma(alpha + 1.0));
}

Rule composite_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("need at least one panel");
  std::vector<double> breaks(panels + 1);
  for (int i = 0; i <= panels; ++i) breaks[i] = a + (b - a) * i / panels;
  return composite_legendre(breaks, order);
}

Rule composite_legendre(const std::vector<double>& breaks, int order) {
  if (breaks.size() < 2) throw DomainError("need at least two breakpoints");
  const Rule ref = gauss_legendre(order);
  Rule r;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    const double mid = 0.5 * (breaks[p + 1] + breaks[p]);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      r.x.push_back(mid + half * ref.x[i]);
      r.w.push_back(half * ref.w[i]);
    }
  }
  return r;
}

Rule periodic_trapezoid(int n, double period) {
  require_positive(n);
  Rule r;
  r.x.resize(n);
  r.w.assign(n, period / n);
  for (int i = 0; i < n; ++i) r.x[i] = period * i / n;
  return r;
}

Rule2 tensor(const Rule& a, const Rule& b) {
  Rule2 r;
  r.x.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      r.x.push_back(a.x[i]);
      r.y.push_back(b.x[j]);
      r.w.push_back(a.w[i] * b.w[j]);
    }
  }
  return r;
}

}  // namespace susy::quad
