#pragma once

// Crossover ensembles H(t) = H0 + sqrt(2t) H, t = alpha^2 / 2, and the
// diffusion of the k = 1, beta = 2 generating function in the radial space.
//
// Radial points s = diag(s1, s2): s1 is the boson entry, s2 the fermion entry.
// With sources, r1 = -x + J + i eps and r2 = -x - J + i eps, so that
//   Z(r, t) = < prod_n (r2 + lambda_n(t)) / (r1 + lambda_n(t)) >,
// which is Z_1 with L = 1. Both increments sit on the same side.
//
// Radial integrals run over s1 = r1 + a, s2 = r2 + i b with a, b real and the
// measure da db; the fermion-fermion entry is Wick rotated as in genfun.

#include "susy/ensembles.hpp"
#include "susy/grassmann.hpp"
#include "susy/superlinalg.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace susy {

class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

// ---------------------------------------------------------------------------
// crossover sampling

enum class InitialKind { Fixed, Zero, PoissonDiagonal };

struct CrossoverSpec {
  InitialKind initial = InitialKind::Zero;
  Eigen::MatrixXcd H0;         // used for Fixed
  double poisson_width = 0.0;  // PoissonDiagonal: iid uniform on [-w/2, w/2]; 0 means width N (unit spacing)
  double t = 0.0;
  EnsembleClass target = EnsembleClass::GUE;
  int N = 2;
  std::uint64_t seed = 1;
  int samples = 100;

  static CrossoverSpec from_alpha(double alpha);
  double alpha() const;  // sqrt(2t)
  void validate() const;
};

SpectrumBatch evolve(const CrossoverSpec& spec, int threads = 0);

// Fraction-free crossover measure: variance of the unfolded nearest-neighbour spacing
// (1 for Poisson, about 0.178 for GUE).
double spacing_variance(const SpectrumBatch& unfolded);

// ---------------------------------------------------------------------------
// radial space, k = 1

struct RadialPoint {
  Complex s1, s2;
};

RadialPoint radial_from_sources(double x, double J, double eps);

// prod_n (s2 + lambda_n) / (s1 + lambda_n): sdet^-1(s (x) 1 + 1 (x) H0) at k = 1.
Complex z0_initial(const RadialPoint& s, const std::vector<double>& h0_levels, double min_distance = 1e-10);
Complex z0_initial(const RadialPoint& s, const Eigen::MatrixXcd& H0, double min_distance = 1e-10);

// sigma = u^-1 s u with u = exp([[0, alpha], [beta, 0]]), in a one-pair pool.
SuperMatrix radial_sigma(const RadialPoint& s);
// Berezinian of (s1, s2 | alpha, beta) -> (sigma11, sigma22 | sigma12, sigma21),
// computed with berezin_linear from the symbolic Jacobian.
Grassmann radial_berezinian_k1(const RadialPoint& s);
// Its body; the soul vanishes.
Complex B1(const RadialPoint& s);

// Normalization constant of the Cartesian Gaussian exp(-str rho^2 / 2t):
// the Berezin-integrated value of int exp(-str rho^2 / 2t) d[rho] is 1 / c.
Complex gaussian_constant(double t);

struct PropagatorValue {
  Complex value;           // Gamma_1(s, r, t)
  Complex group_integral;  // int dmu(u) exp((1/t) str u^-1 s u r), Berezin part only
};

// Gamma_1(s, r, t) = c exp(-(1/2t) str(s^2 + r^2)) int dmu(u) exp((1/t) str u^-1 s u r).
// The group integral is done symbolically: the phases drop out of str u^-1 s u r for
// diagonal s and r, and the Grassmann pair is Berezin-integrated exactly.
PropagatorValue propagator_k1(const RadialPoint& s, const RadialPoint& r, double t);

// Efetov-Wegner boundary weight exp(-(r1 - r2)^2 / 2t); multiplies f at s1 = s2.
Complex boundary_weight_k1(const RadialPoint& r, double t);

struct RadialOptions {
  int nodes = 64;           // Gauss-Hermite per direction; doubled for the convergence check
  int polar_radial = 48;    // Legendre nodes per panel in the polar patch
  int polar_angle = 128;
  double tol = 1e-6;
  double min_s1_imag = 1.5;  // boson contour is lifted to at least this height
};

struct RadialIntegral {
  Complex value;
  Complex f_diag;        // f on the diagonal s1 = s2
  Complex boundary;      // Efetov-Wegner weight
  Complex singular_part; // int Gamma B d[s], polar coordinates around s1 = s2
  Complex regular_part;  // int Gamma B (f - f_diag) d[s]
  double doubling_residual = 0.0;
};

using RadialFunction = std::function<Complex(const RadialPoint&)>;

// f_diag (boundary + int Gamma B) + int Gamma B (f - f_diag). f must be constant on the
// diagonal s1 = s2, as every sdet^-1 of a supersymmetric argument is.
RadialIntegral radial_convolution(const RadialFunction& f, const RadialPoint& r, double t,
                                  const RadialOptions& opt = {});

// boundary + int Gamma B d[s]; should be 1.
RadialIntegral propagator_normalization(const RadialPoint& r, double t, const RadialOptions& opt = {});

struct SemigroupReport {
  Complex lhs, rhs;
  double residual = 0.0;
};

// int Gamma(s, q, t1) Gamma(q, r, t2) B(q) d[q] against Gamma(s, r, t1 + t2).
SemigroupReport semigroup_check(const RadialPoint& s, const RadialPoint& r, double t1, double t2, int nodes = 48);

// Z(r, t) = int d[rho] g_t(rho) Z0(r + rho) in Cartesian coordinates, which have no
// boundary terms; an independent check of the radial route and its boundary weight.
Complex cartesian_convolution(const std::vector<double>& h0_levels, const RadialPoint& r, double t, int nodes = 48);

struct ConvolutionReport {
  double t = 0.0;
  RadialIntegral radial;
  Complex cartesian;
  ZkDirectResult monte_carlo;
  double radial_vs_mc = 0.0;
  double radial_vs_cartesian = 0.0;
  bool pass = false;
};

// Route (a) radial convolution against route (b) Monte Carlo over H(t) = H0 + sqrt(2t) H.
ConvolutionReport convolution_check(const Eigen::MatrixXcd& H0, double x, double J, double eps, double t,
                                    int samples = 400000, std::uint64_t seed = 1, double tol = 1e-2);

}  // namespace susy
