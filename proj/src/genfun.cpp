#include "susy/genfun.hpp"

#include "susy/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace susy {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

SuperMatrix one_one(int pairs, const Grassmann& a, const Grassmann& mu, const Grassmann& nu, const Grassmann& b) {
  return SuperMatrix::from_blocks(pairs, 1, 1, {a}, {mu}, {nu}, {b});
}

SuperMatrix to_pool(const SuperMatrix& m, int pairs) {
  SuperMatrix r(pairs, m.r0(), m.r1(), m.c0(), m.c1());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) r.set(i, j, m(i, j).in_pool(pairs));
  }
  return r;
}

void require_one_one(const SuperMatrix& m, const char* what) {
  if (!m.is_square() || m.r0() != 1 || m.r1() != 1) {
    throw DimensionError(std::string(what) + " needs a 1/1 supermatrix");
  }
}

void require_k1_unitary(const SourceConfig& src) {
  src.validate();
  if (src.k() != 1 || src.beta != 2) throw DomainError("only k = 1, beta = 2 is implemented");
}

Grassmann gpow_int(const Grassmann& g, int n) {
  Grassmann r(g.pairs(), Complex(1.0));
  for (int i = 0; i < n; ++i) r = r * g;
  return r;
}

// Breakpoints for a real-axis rule that resolves a Lorentzian of width w at c.
std::vector<double> graded_breaks(double c, double w, double lo, double hi) {
  std::vector<double> b{lo, hi};
  for (double d = w; d < hi - lo; d *= 3.0) {
    b.push_back(c - d);
    b.push_back(c + d);
  }
  b.push_back(c);
  std::erase_if(b, [&](double v) { return v < lo || v > hi; });
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------

SourceConfig SourceConfig::k1(double x, double J, double eps, int L) {
  SourceConfig s;
  s.x = {x};
  s.J = {J};
  s.L = {L};
  s.eps = eps;
  return s;
}

Complex SourceConfig::x_pm(int p) const { return {x.at(p), -L.at(p) * eps}; }

SourceConfig SourceConfig::with_J(int p, double value) const {
  SourceConfig s = *this;
  s.J.at(p) = value;
  return s;
}

void SourceConfig::validate() const {
  if (beta != 1 && beta != 2 && beta != 4) throw DomainError("beta must be 1, 2 or 4");
  if (!(eps > 0.0)) throw DomainError("the increment eps must be positive");
  if (x.empty() || J.size() != x.size() || L.size() != x.size()) {
    throw DimensionError("x, J and L need one entry per source");
  }
  for (int l : L) {
    if (l != 1 && l != -1) throw DomainError("metric entries must be +1 or -1");
  }
}

double c_beta(int beta, int k) {
  if (beta == 2) return std::pow(2.0, k * (k - 1));
  if (beta == 1 || beta == 4) return std::pow(2.0, k * (4 * k - 3) / 2.0);
  throw DomainError("beta must be 1, 2 or 4");
}

// ---------------------------------------------------------------------------
// Hubbard-Stratonovich

HSReport hs_verify(const SuperMatrix& B, const HSConfig& cfg) {
  require_one_one(B, "hs_verify");
  if (!cfg.wick_rotation) {
    // str sigma^2 = a^2 - b^2 + ...: the b integral grows like exp(+b^2).
    throw DivergenceError("without the Wick rotation the fermion-fermion Gaussian diverges");
  }
  const int P = B.pairs(), Q = P + 1;
  HSReport rep;
  rep.lhs = gexp(supertrace(B * B) * Complex(-0.25));

  const SuperMatrix Bq = to_pool(B, Q);
  const Grassmann alpha = Grassmann::zeta(Q, P), eta = Grassmann::zeta_star(Q, P);
  // Shift both commuting contours to the body-level saddle so the integrand is
  // Gaussian times a polynomial; the shift is legitimate because it is entire.
  const Complex a0 = kI * B.body(0, 0) / 2.0, b0 = B.body(1, 1) / 2.0;
  const std::vector<int> order{zeta_id(P), zeta_star_id(P)};

  auto run = [&](int n) {
    const auto gh = quad::gauss_hermite(n);
    Grassmann acc(Q);
    for (std::size_t i = 0; i < gh.size(); ++i) {
      for (std::size_t j = 0; j < gh.size(); ++j) {
        const Complex a = a0 + gh.x[i], b = b0 + gh.x[j];
        const SuperMatrix sigma = one_one(Q, Grassmann(Q, a), alpha, eta, Grassmann(Q, kI * b));
        // exp(-str sigma^2) exp(i str sigma B), divided by the Gauss-Hermite weight
        Grassmann e = supertrace(sigma * sigma) * Complex(-1.0) + supertrace(sigma * Bq) * kI;
        e += Grassmann(Q, Complex(gh.x[i] * gh.x[i] + gh.x[j] * gh.x[j]));
        acc += gexp(e) * Complex(gh.w[i] * gh.w[j]);
      }
    }
    return (berezin_integrate(acc, order, default_berezin_norm()) * Complex(c_beta(2, 1))).in_pool(P);
  };

  const Grassmann coarse = run(cfg.nodes);
  rep.rhs = run(2 * cfg.nodes);
  rep.nodes = 2 * cfg.nodes;
  rep.doubling_residual = max_abs_diff(coarse, rep.rhs);
  if (rep.doubling_residual > cfg.tol) {
    throw ConvergenceError("Hubbard-Stratonovich quadrature: node doubling changed the result by " +
                           std::to_string(rep.doubling_residual));
  }
  rep.max_deviation = max_abs_diff(rep.lhs, rep.rhs);
  rep.pass = rep.max_deviation <= cfg.compare_tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Gaussian superintegral

Grassmann sdet_power_rhs(const SuperMatrix& sigma, const SourceConfig& src, int N) {
  require_one_one(sigma, "sdet_power_rhs");
  require_k1_unitary(src);
  const int P = sigma.pairs();
  const double l = src.L[0];
  const Complex xpm = src.x_pm(0);
  const double J = src.J[0];
  // sigma L - x^+- - J with J = diag(-J, +J)
  const SuperMatrix X = one_one(P, sigma(0, 0) * Complex(l) + Grassmann(P, -xpm + J), sigma(0, 1) * Complex(l),
                                sigma(1, 0) * Complex(l), sigma(1, 1) * Complex(l) + Grassmann(P, -xpm - J));
  const Grassmann inv = ginverse(sdet(X));
  return N <= 3 ? gpow_int(inv, N) : gpow(inv, Complex(N));
}

SuperintegralReport gaussian_superintegral_check(const SuperMatrix& sigma, const SourceConfig& src, int N,
                                                 const SuperintegralOptions& opt) {
  require_one_one(sigma, "gaussian_superintegral_check");
  require_k1_unitary(src);
  if (N < 1 || N > 3) throw DomainError("direct superintegral supports 1 <= N <= 3");
  const int P = sigma.pairs(), Q = P + N;
  const double l = src.L[0], J = src.J[0];
  const Complex xb = opt.flip_boson_increment ? Complex(src.x[0], l * src.eps) : src.x_pm(0);
  const Complex xf = src.x_pm(0);

  // M = L^1/2 (L^1/2 sigma L^1/2 - x^+- - J) L^1/2 = L (L sigma - x^+- - J) for scalar L.
  const SuperMatrix sq = to_pool(sigma, Q);
  const Grassmann M00 = (sq(0, 0) * Complex(l) + Grassmann(Q, -xb + J)) * Complex(l);
  const Grassmann M01 = sq(0, 1);
  const Grassmann M10 = sq(1, 0);
  const Grassmann M11 = (sq(1, 1) * Complex(l) + Grassmann(Q, -xf - J)) * Complex(l);

  // exp(i M00 |z|^2) = exp(-c u) with u = |z|^2
  const Complex c = -kI * M00.body();
  if (!(c.real() > 0.0)) {
    throw DivergenceError("bosonic Gaussian diverges: the increment sits on the wrong side for metric L = " +
                          std::to_string(static_cast<int>(l)));
  }

  const auto lag = quad::gauss_laguerre(opt.u_nodes);
  const auto trap = quad::periodic_trapezoid(opt.phi_nodes, 2.0 * kPi);
  // One-component node list: rotated contour u = t / c.
  struct Node {
    Complex z, zbar;
    double t;
    double w;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < lag.size(); ++i) {
    const Complex r = std::sqrt(Complex(lag.x[i]) / c);
    for (std::size_t j = 0; j < trap.size(); ++j) {
      const Complex e = std::exp(kI * trap.x[j]);
      nodes.push_back({r * e, r / e, lag.x[i], lag.w[i] * trap.w[j]});
    }
  }

  std::vector<Grassmann> zeta, zeta_s;
  for (int n = 0; n < N; ++n) {
    zeta.push_back(Grassmann::zeta(Q, P + n));
    zeta_s.push_back(Grassmann::zeta_star(Q, P + n));
  }
  // Fermion-only part of the exponent is node independent.
  Grassmann fixed(Q);
  for (int n = 0; n < N; ++n) fixed += zeta_s[n] * M11 * zeta[n];
  const Grassmann M00_soul = M00.soul();

  Grassmann acc(Q);
  std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
  while (true) {
    Grassmann e = fixed;
    double w = 1.0;
    for (int n = 0; n < N; ++n) {
      const Node& nd = nodes[idx[n]];
      e += M00_soul * (nd.zbar * nd.z);
      e += M01 * zeta[n] * nd.zbar;
      e += zeta_s[n] * M10 * nd.z;
      w *= nd.w;
    }
    // body of i M00 |z|^2 is -t and is carried by the Laguerre weight
    acc += gexp(e * kI) * Complex(w);
    int n = 0;
    while (n < N && ++idx[n] == nodes.size()) idx[n++] = 0;
    if (n == N) break;
  }
  std::vector<int> order;
  for (int n = 0; n < N; ++n) {
    order.push_back(zeta_id(P + n));
    order.push_back(zeta_star_id(P + n));
  }
  // per component: d^2z = du dphi / 2, du = dt / c, times 1/(i pi) and 2 pi / i
  const Complex kappa = -1.0 / c;
  Grassmann lhs = berezin_integrate(acc, order, default_berezin_norm());
  for (int n = 0; n < N; ++n) lhs = lhs * kappa;

  SuperintegralReport rep;
  rep.N = N;
  rep.lhs = lhs.in_pool(P);
  rep.rhs = sdet_power_rhs(sigma, src, N);
  rep.max_deviation = max_abs_diff(rep.lhs, rep.rhs);
  rep.pass = rep.max_deviation <= opt.tol * std::max(1.0, max_abs_coeff(rep.rhs));
  return rep;
}

// ---------------------------------------------------------------------------
// Z_1 from the sigma integral

ZResult z_super_k1_detailed(const SourceConfig& src, int N, const ZOptions& opt) {
  require_k1_unitary(src);
  if (N < 1) throw DomainError("N must be positive");
  const double x = src.x[0], J = src.J[0], l = src.L[0];
  ZResult res;
  // Boson-boson entry: pole of sdet^-N at s1 = L (x - J) - i eps, always below the axis.
  // The default contour runs through the saddle of exp(-s1^2) (s1 - x)^-N.
  const double disc = 2.0 * N - x * x;
  res.s1_shift = opt.s1_shift.value_or(std::max(1.0, disc > 0 ? std::sqrt(disc) / 2.0 : 0.0));
  const double pole_distance = res.s1_shift + src.eps;
  if (res.s1_shift < 0.0 || pole_distance < opt.min_pole_distance) {
    throw ResolutionError("sigma contour passes within " + std::to_string(pole_distance) +
                          " of the sdet pole; increase eps or shift the contour");
  }
  // Fermion-fermion entry enters polynomially; the shift only tames cancellations.
  res.s2_shift = -l * (x + J) / 2.0;
  const double s1_center = l * (x - J) / 2.0;

  const Grassmann alpha = Grassmann::zeta(1, 0), eta = Grassmann::zeta_star(1, 0);
  const Grassmann odd_gauss = gexp(alpha * eta * Complex(-2.0));
  const std::vector<int> order{zeta_id(0), zeta_star_id(0)};

  auto run = [&](int n) {
    const auto gh = quad::gauss_hermite(n);
    // one-dimensional factors exp(-s^2) / exp(-t^2) on the shifted lines
    std::vector<Complex> s1(gh.size()), s2(gh.size()), f1(gh.size()), f2(gh.size());
    for (std::size_t i = 0; i < gh.size(); ++i) {
      s1[i] = Complex(s1_center + gh.x[i], res.s1_shift);
      s2[i] = Complex(gh.x[i], res.s2_shift);
      f1[i] = gh.w[i] * std::exp(-s1[i] * s1[i] + gh.x[i] * gh.x[i]);  // s1 - t is a constant shift
      f2[i] = gh.w[i] * std::exp(-s2[i] * s2[i] + gh.x[i] * gh.x[i]);
    }
    Complex total = 0.0;
    for (std::size_t i = 0; i < gh.size(); ++i) {
      for (std::size_t j = 0; j < gh.size(); ++j) {
        // Wick rotation: the fermion-fermion entry is i s2.
        const SuperMatrix sigma = one_one(1, Grassmann(1, s1[i]), alpha, eta, Grassmann(1, kI * s2[j]));
        const Grassmann integrand = odd_gauss * sdet_power_rhs(sigma, src, N);
        total += f1[i] * f2[j] * berezin_integrate(integrand, order, default_berezin_norm()).body();
      }
    }
    return total * c_beta(2, 1);
  };

  const Complex coarse = run(opt.nodes);
  res.value = opt.check_convergence ? run(2 * opt.nodes) : coarse;
  if (opt.check_convergence) {
    res.doubling_residual = std::abs(res.value - coarse);
    if (res.doubling_residual > opt.tol * std::max(1.0, std::abs(res.value))) {
      throw ConvergenceError("sigma quadrature did not converge: doubling residual " +
                             std::to_string(res.doubling_residual));
    }
  }
  return res;
}

Complex z_super_k1(const SourceConfig& src, int N, const ZOptions& opt) {
  return z_super_k1_detailed(src, N, opt).value;
}

Complex z_quadrature_n1(const SourceConfig& src) {
  require_k1_unitary(src);
  const double x = src.x[0], J = src.J[0];
  const Complex inc(0.0, src.L[0] * src.eps);
  auto br = graded_breaks(x - J, src.eps, -14.0, 14.0);
  const auto rule = quad::composite_legendre(br, 20);
  Complex s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double h = rule.x[i];
    s += rule.w[i] * std::exp(-h * h) * (h - x + inc - J) / (h - x + inc + J);
  }
  return s / std::sqrt(kPi);
}

double r1_lorentzian_n1(double x, double eps) {
  const auto rule = quad::composite_legendre(graded_breaks(x, eps, -14.0, 14.0), 20);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double h = rule.x[i];
    s += rule.w[i] * std::exp(-h * h) * eps / ((x - h) * (x - h) + eps * eps);
  }
  return s / (kPi * std::sqrt(kPi));
}

// ---------------------------------------------------------------------------
// derivatives

CorrelationK1 correlations_from_sources(const ZEvaluator& zfun, const SourceConfig& src,
                                        const DerivativeOptions& opt) {
  src.validate();
  if (src.k() != 1) throw DomainError("correlations_from_sources handles k = 1");
  auto central = [&](double h) { return (zfun(src.with_J(0, h)) - zfun(src.with_J(0, -h))) / (2.0 * h); };
  const Complex d1 = central(opt.h), d2 = central(opt.h / 2.0);
  const Complex d = (4.0 * d2 - d1) / 3.0;
  CorrelationK1 r;
  r.richardson_gap = std::abs(d1 - d2) / std::max(1.0, std::abs(d));
  if (!(r.richardson_gap <= opt.max_gap)) {
    throw DifferentiationError("source derivative unstable: Richardson gap " + std::to_string(r.richardson_gap));
  }
  r.Rhat = d / (2.0 * kPi);
  r.R1 = src.L[0] * r.Rhat.imag();
  return r;
}

double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.empty()) throw DimensionError("need matching, nonempty samples");
  std::vector<double> p = values;
  const std::size_t n = eps.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      p[i] = (eps[i + m] * p[i] - eps[i] * p[i + 1]) / (eps[i + m] - eps[i]);
    }
  }
  return p[0];
}

// ---------------------------------------------------------------------------
// delta-function identity

DeltaIdentityReport delta_identity_check(const SuperMatrix& B, const SuperFunction& f, double tau, int nodes,
                                         double tol) {
  require_one_one(B, "delta_identity_check");
  if (!(tau > 0.0)) throw DomainError("regulator tau must be positive");
  const int P = B.pairs(), Q = P + 2;
  const SuperMatrix Bq = to_pool(B, Q);
  const Grassmann rho01 = Grassmann::zeta(Q, P), rho10 = Grassmann::zeta_star(Q, P);
  const Grassmann alpha = Grassmann::zeta(Q, P + 1), eta = Grassmann::zeta_star(Q, P + 1);
  const auto gh = quad::gauss_hermite(nodes);
  const double st = std::sqrt(tau);

  // int ds exp(-tau s^2 - i s X), contour through the body saddle
  auto fourier = [&](const Grassmann& X) {
    const Complex s0 = -kI * X.body() / (2.0 * tau);
    Grassmann acc(Q);
    for (std::size_t i = 0; i < gh.size(); ++i) {
      const Complex s = s0 + gh.x[i] / st;
      Grassmann e = X * (-kI * s) + Grassmann(Q, -tau * s * s + gh.x[i] * gh.x[i]);
      acc += gexp(e) * Complex(gh.w[i] / st);
    }
    return acc;
  };

  Grassmann acc(Q);
  for (std::size_t i = 0; i < gh.size(); ++i) {
    for (std::size_t j = 0; j < gh.size(); ++j) {
      const Complex r1 = B.body(0, 0) + 2.0 * st * gh.x[i];
      const Complex r2 = B.body(1, 1) + 2.0 * st * gh.x[j];
      const SuperMatrix rho = one_one(Q, Grassmann(Q, r1), rho01, rho10, Grassmann(Q, r2));
      const SuperMatrix X = rho - Bq;
      // -i str sigma X = -i (s1 X00 + alpha X10 - eta X01 - s2 X11)
      const Grassmann odd = gexp((alpha * X(1, 0) - eta * X(0, 1)) * (-kI));
      const Grassmann g = fourier(X(0, 0)) * fourier(X(1, 1) * Complex(-1.0)) * odd * f(rho);
      const double w = gh.w[i] * gh.w[j] * 4.0 * tau * std::exp(gh.x[i] * gh.x[i] + gh.x[j] * gh.x[j]);
      acc += g * Complex(w);
    }
  }
  // d[rho] d[sigma]: the sigma differentials sit next to the integrand.
  const std::vector<int> order{zeta_id(P + 1), zeta_star_id(P + 1), zeta_id(P), zeta_star_id(P)};
  const double c = c_beta(2, 1);
  DeltaIdentityReport rep;
  rep.round_trip = (berezin_integrate(acc, order, default_berezin_norm()) * Complex(c * c)).in_pool(P);
  rep.f_of_B = f(B);
  rep.max_deviation = max_abs_diff(rep.round_trip, rep.f_of_B);
  rep.pass = rep.max_deviation <= tol * std::max(1.0, max_abs_coeff(rep.f_of_B));
  return rep;
}

// ---------------------------------------------------------------------------
// Ingham-Siegel

double ingham_siegel_integral(const std::vector<Complex>& R, int N, int m) {
  if (m < 0) throw DomainError("Ingham-Siegel power m must be non-negative");
  if (N == 1) {
    if (R.size() != 1 || !(R[0].real() > 0.0)) throw DomainError("R must be a positive 1x1 matrix");
    const double r = R[0].real();
    const auto lag = quad::gauss_laguerre(24);
    double s = 0.0;
    for (std::size_t i = 0; i < lag.size(); ++i) {
      const double v = lag.x[i] / r;
      s += lag.w[i] * std::pow(v, m) / r;
    }
    return s;
  }
  if (N != 2 || R.size() != 4) throw DomainError("Ingham-Siegel integral implemented for N = 1, 2");
  Eigen::Matrix2cd Rm;
  Rm << R[0], R[1], R[2], R[3];
  if (!Rm.isApprox(Rm.adjoint(), 1e-12)) throw DomainError("R must be Hermitean");
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(Rm);
  const double lmin = es.eigenvalues()(0);
  if (!(lmin > 0.0)) throw DomainError("R must be positive definite");
  const double r11 = R[0].real(), r22 = R[3].real(), r12 = std::abs(R[1]);

  // S = [[p^2, c], [c*, q^2]], c = p q rho e^{i phi}; phi done with I_0.
  const double pmax = std::sqrt(80.0 / lmin);
  const auto pr = quad::composite_legendre(0.0, pmax, 8, 16);
  const auto rr = quad::gauss_legendre(20, 0.0, 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    const double p = pr.x[i];
    for (std::size_t j = 0; j < pr.size(); ++j) {
      const double q = pr.x[j];
      const double pq = p * q;
      const double base = -r11 * p * p - r22 * q * q;
      double inner = 0.0;
      for (std::size_t k = 0; k < rr.size(); ++k) {
        const double rho = rr.x[k];
        const double kap = 2.0 * pq * rho * r12;
        const double i0e = kap == 0.0 ? 1.0 : std::cyl_bessel_i(0.0, kap) * std::exp(-kap);
        inner += rr.w[k] * std::pow(1.0 - rho * rho, m) * rho * i0e * std::exp(base + kap);
      }
      total += pr.w[i] * pr.w[j] * 4.0 * pq * std::pow(pq, 2 * m + 2) * 2.0 * kPi * inner;
    }
  }
  return total;
}

InghamSiegelReport ingham_siegel_check(int N, int m, double tol) {
  std::vector<std::vector<Complex>> shapes;
  if (N == 1) {
    shapes = {{1.0}, {2.3}};
  } else if (N == 2) {
    const Complex c1(0.6, 0.4), c2(0.0, -0.3);
    shapes = {{1.0, 0.0, 0.0, 1.0},
              {1.0, 0.0, 0.0, 2.5},
              {2.0, c1, std::conj(c1), 1.3},
              {1.5, c2, std::conj(c2), 0.8}};
  } else {
    throw DomainError("Ingham-Siegel check implemented for N = 1, 2");
  }
  std::vector<double> lx, ly;
  for (const auto& s : shapes) {
    for (double lam : {0.6, 1.0, 1.7}) {
      std::vector<Complex> R = s;
      for (auto& v : R) v *= lam;
      const double det = N == 1 ? R[0].real() : (R[0] * R[3] - R[1] * R[2]).real();
      lx.push_back(std::log(det));
      ly.push_back(std::log(ingham_siegel_integral(R, N, m)));
    }
  }
  // least squares  log I = log C - p log det R
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  InghamSiegelReport rep;
  rep.N = N;
  rep.m = m;
  rep.samples = static_cast<int>(lx.size());
  rep.expected_exponent = m + N;
  rep.fitted_exponent = -slope;
  rep.fitted_constant = std::exp(icpt);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    rep.max_log_residual = std::max(rep.max_log_residual, std::abs(ly[i] - icpt - slope * lx[i]));
  }
  rep.pass = std::abs(rep.fitted_exponent - rep.expected_exponent) < tol && rep.max_log_residual < tol;
  return rep;
}

IdentitySuiteReport identity_suite(std::uint64_t seed) {
  IdentitySuiteReport rep;
  const auto bundle = random_bundle<Complex>(2, 1, 1, seed);
  const SuperMatrix B = build_dual_pair(bundle, AdjointLayout::Physics).B;
  const std::vector<SuperFunction> fs{
      [](const SuperMatrix& r) { return supertrace(r); },
      [](const SuperMatrix& r) { return supertrace(r * r); },
      [](const SuperMatrix& r) { return r(0, 0) * Complex(3.0) - r(1, 1) + Grassmann(r.pairs(), 1.0); },
  };
  rep.pass = true;
  for (const auto& f : fs) {
    rep.delta.push_back(delta_identity_check(B, f));
    rep.pass = rep.pass && rep.delta.back().pass;
  }
  for (int N : {1, 2}) {
    for (int m : {0, 1}) {
      rep.ingham_siegel.push_back(ingham_siegel_check(N, m));
      rep.pass = rep.pass && rep.ingham_siegel.back().pass;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::pair<Complex, Complex> pastur_saddle(double xbar, int N, int gamma) {
  if (N < 1 || (gamma != 1 && gamma != 2)) throw DomainError("pastur_saddle needs N >= 1 and gamma in {1, 2}");
  double disc = 2.0 * N / gamma - xbar * xbar;
  if (std::abs(disc) < 1e-12 * (2.0 * N / gamma)) disc = 0.0;  // at the edge
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    return {Complex(xbar / 2.0, r / 2.0), Complex(xbar / 2.0, -r / 2.0)};
  }
  const double r = std::sqrt(-disc);
  return {Complex((xbar + r) / 2.0, 0.0), Complex((xbar - r) / 2.0, 0.0)};
}

double semicircle_density(double x, int N, int gamma) {
  return 2.0 * gamma / kPi * pastur_saddle(x, N, gamma).first.imag();
}

}  // namespace susy
