#pragma once

// Supersymmetric representation of the Gaussian generating function for one
// source (k = 1, beta = 2): Hubbard-Stratonovich check, the superspace
// Gaussian integral, the sigma integral for Z_1, source derivatives, and the
// delta-function / Ingham-Siegel identities.
//
// Conventions: P(H) ~ exp(-beta tr H^2 / 2); x^+- = x - i L eps;
// J = diag(-J, +J) in boson/fermion order; Z is normalized at J = 0.
// Flat measures throughout: d(re) d(im) for commuting variables and the
// default Berezin normalization for anticommuting ones, which makes the
// constant c^(2) = 1 for k = 1. Where a different normalization is needed
// the factor is spelled out next to the integral.

#include "susy/duality.hpp"
#include "susy/errors.hpp"
#include "susy/grassmann.hpp"
#include "susy/superlinalg.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace susy {

class DifferentiationError : public NumericError {
 public:
  using NumericError::NumericError;
};

struct SourceConfig {
  int beta = 2;
  std::vector<double> x{0.0};
  std::vector<double> J{0.0};
  std::vector<int> L{1};
  double eps = 0.1;

  static SourceConfig k1(double x, double J = 0.0, double eps = 0.1, int L = 1);

  int k() const { return static_cast<int>(x.size()); }
  int gamma() const { return beta == 4 ? 2 : 1; }
  // x_p^+- = x_p - i L_p eps
  Complex x_pm(int p) const;
  SourceConfig with_J(int p, double value) const;
  void validate() const;
};

// Normalization constant in front of the sigma integral.
double c_beta(int beta, int k);

// ---------------------------------------------------------------------------
// keystone

template <class C>
KeystoneReport keystone_check(const BasicVectorBundle<C>& bundle) {
  return verify_keystone(bundle, AdjointLayout::Physics);
}

// ---------------------------------------------------------------------------
// Hubbard-Stratonovich, k = 1, beta = 2, L = 1

struct HSConfig {
  bool wick_rotation = true;
  int nodes = 24;          // Gauss-Hermite nodes per commuting sigma entry
  double tol = 1e-7;       // node-doubling residual that counts as converged
  double compare_tol = 1e-6;
};

struct HSReport {
  Grassmann lhs, rhs;
  int nodes = 0;
  double doubling_residual = 0.0;
  double max_deviation = 0.0;
  bool pass = false;
};

// B: 1/1 supermatrix (Grassmann entries in B's pool).
HSReport hs_verify(const SuperMatrix& B, const HSConfig& cfg = {});

// ---------------------------------------------------------------------------
// Gaussian superintegral over Psi = (z_n, zeta_n), n = 1..N

struct SuperintegralOptions {
  int u_nodes = 16;    // Gauss-Laguerre on the rotated |z|^2 contour
  int phi_nodes = 16;  // periodic trapezoid in arg z
  bool flip_boson_increment = false;  // places the boson increment on the wrong side
  double tol = 1e-6;
};

struct SuperintegralReport {
  Grassmann lhs, rhs;
  int N = 1;
  double max_deviation = 0.0;
  bool pass = false;
};

// Compares  int exp(i Psi^dag (M (x) 1_N) Psi) d[Psi]  with  sdet^{-N}(sigma L - x^+- - J),
// M = L^1/2 (L^1/2 sigma L^1/2 - x^+- - J) L^1/2. Measure per component:
// d^2z / (i pi) times (2 pi / i) d zeta d zeta*.
SuperintegralReport gaussian_superintegral_check(const SuperMatrix& sigma, const SourceConfig& src, int N,
                                                 const SuperintegralOptions& opt = {});

// Just the right-hand side, sdet^{-N}(sigma L - x^+- - J).
Grassmann sdet_power_rhs(const SuperMatrix& sigma, const SourceConfig& src, int N);

// ---------------------------------------------------------------------------
// Z_1(x + J) from the sigma integral

struct ZOptions {
  int nodes = 96;
  bool check_convergence = true;
  double tol = 1e-7;
  std::optional<double> s1_shift;    // Im of the boson-boson contour; default through the saddle
  double min_pole_distance = 0.05;
};

struct ZResult {
  Complex value;
  double doubling_residual = 0.0;
  double s1_shift = 0.0, s2_shift = 0.0;
  int boundary_terms = 0;  // Cartesian coordinates: none arise
};

ZResult z_super_k1_detailed(const SourceConfig& src, int N, const ZOptions& opt = {});
Complex z_super_k1(const SourceConfig& src, int N, const ZOptions& opt = {});

// Brute-force oracle for N = 1: int dH exp(-H^2)/sqrt(pi) det ratio, on the real axis.
Complex z_quadrature_n1(const SourceConfig& src);
// (1/pi) <Im tr 1/(x - i eps - H)> for N = 1, same weight.
double r1_lorentzian_n1(double x, double eps);

// ---------------------------------------------------------------------------
// source derivatives

struct DerivativeOptions {
  double h = 1e-3;           // Richardson pair uses h and h/2
  double max_gap = 1e-4;     // relative disagreement that flags instability
};

struct CorrelationK1 {
  Complex Rhat;              // (1/2pi) dZ/dJ at J = 0
  double R1 = 0.0;           // L Im Rhat
  double richardson_gap = 0.0;
};

using ZEvaluator = std::function<Complex(const SourceConfig&)>;
CorrelationK1 correlations_from_sources(const ZEvaluator& zfun, const SourceConfig& src,
                                        const DerivativeOptions& opt = {});

// Polynomial extrapolation of f(eps) to eps = 0 through all given points (Neville).
double extrapolate_to_zero(const std::vector<double>& eps, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// delta-function and Ingham-Siegel identities

struct DeltaIdentityReport {
  Grassmann f_of_B, round_trip;
  double max_deviation = 0.0;
  bool pass = false;
};

using SuperFunction = std::function<Grassmann(const SuperMatrix&)>;

// f(B) = c^2 int d[rho] f(rho) int d[sigma] exp(-i str sigma (rho - B)), 1/1 case, L = 1.
// The sigma integral carries the regulator exp(-tau (s1^2 + s2^2)), which smears the
// commuting delta functions into Gaussians of variance 2 tau; polynomials of degree <= 1
// in each commuting entry, and supersymmetric combinations like str rho^2, are unaffected.
DeltaIdentityReport delta_identity_check(const SuperMatrix& B, const SuperFunction& f, double tau = 1.0,
                                         int nodes = 16, double tol = 1e-8);

struct InghamSiegelReport {
  int N = 1, m = 0;
  double expected_exponent = 0.0;
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;     // I(R) = const * det^-p R
  double max_log_residual = 0.0;
  int samples = 0;
  bool pass = false;
};

// Integral over positive Hermitian S for the given R (N = 1 or 2).
double ingham_siegel_integral(const std::vector<Complex>& R, int N, int m);
InghamSiegelReport ingham_siegel_check(int N, int m, double tol = 1e-6);

struct IdentitySuiteReport {
  std::vector<DeltaIdentityReport> delta;
  std::vector<InghamSiegelReport> ingham_siegel;
  bool pass = false;
};

IdentitySuiteReport identity_suite(std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// saddle point

// Both roots of s (xbar - s) = N / (2 gamma); first has the non-negative imaginary part.
std::pair<Complex, Complex> pastur_saddle(double xbar, int N, int gamma);

// Large-N level density built from the saddle, (2 gamma / pi) Im s0, which integrates to N.
double semicircle_density(double x, int N, int gamma);

}  // namespace susy
