#pragma once

// Color-flavor transformation for U(1) with one + and one - flavor, as a
// comparison of formal series in the sources, and the CUE generating function
// by Haar Monte Carlo.
//
// Sources: Psi_+ = (b+, f+), Psi_- = (b-, f-) with commuting b and odd f.
// The commuting components are formal symbols b+*, b+, b-*, b- tracked by
// powers; the odd ones live in a two-pair Grassmann pool, pair 0 = (f+, f+*),
// pair 1 = (f-, f-*).
//
//   lhs = int dtheta/2pi exp(e^{i theta} Psi_+^* Psi_+ + e^{-i theta} Psi_-^* Psi_-)
//   rhs = int d[Lambda] d[Lambda~] sdet^N(1 - Lambda~ Lambda)
//           exp(Psi_+^* Lambda Psi_- + Psi_-^* Lambda~ Psi_+)
//
// Lambda = [[a, sigma], [tau, b]], Lambda~ = [[a*, sigma~], [tau~, -b*]] with
// |a| < 1 (non-compact boson sector) and b in the whole plane (compact fermion
// sector). The measure constant is fixed by requiring rhs = 1 at Psi = 0.

#include "susy/ensembles.hpp"
#include "susy/grassmann.hpp"

#include <array>
#include <map>
#include <vector>

namespace susy {

struct CFTConfig {
  int N = 1;
  int kplus = 1, kminus = 1;
  int M = 4;               // highest power of any bilinear kept; total commuting degree <= 2M
  int r_nodes = 16;        // Gauss-Legendre in |a|
  int theta_nodes = 24;    // Gauss-Legendre in atan |b|
  int angle_nodes = 16;    // trapezoid in arg a, arg b; exact for the trigonometric degrees that occur
  double tol = 1e-10;      // node-doubling residual on the rhs

  void validate() const;
};

// Powers of (b+*, b+, b-*, b-).
using CFTKey = std::array<int, 4>;
// Grassmann coefficients in the two-pair source pool.
using CFTSeries = std::map<CFTKey, Grassmann>;

int cft_degree(const CFTKey& k);

CFTSeries cft_lhs(const CFTConfig& cfg);

struct CFTRhsResult {
  CFTSeries series;
  Complex raw_normalization;  // rhs integral at Psi = 0 before fixing the constant
  double doubling_residual = 0.0;
};
CFTRhsResult cft_rhs_detailed(const CFTConfig& cfg);
CFTSeries cft_rhs(const CFTConfig& cfg);

// Coefficient of (b+* b+)^p (b-* b-)^q on the left side by Gauss-Legendre phase quadrature.
Grassmann cft_lhs_phase_quadrature(int p, int q, int nodes = 40);

// Series evaluated at numeric commuting sources, split by total degree: result[d] is the
// degree-d part (a Grassmann element in the source pool).
std::vector<Grassmann> cft_evaluate(const CFTSeries& s, const std::array<Complex, 4>& b, int M);

struct CFTComparison {
  int seeds = 0;
  double max_coefficient_diff = 0.0;   // over all keys
  double max_evaluated_diff = 0.0;     // over seeds and degrees
  Complex normalization;               // rhs at Psi = 0 (1 by construction)
  double doubling_residual = 0.0;
  bool pass = false;
};

CFTComparison compare_cft(const CFTConfig& cfg, int seeds = 20, std::uint64_t seed = 1, double tol = 1e-8);

// ---------------------------------------------------------------------------
// CUE generating function

struct CUEAngles {
  std::vector<Complex> theta_plus, phi_plus;    // det(1 - e^{i phi} U) / det(1 - e^{i theta} U)
  std::vector<Complex> theta_minus, phi_minus;  // same with U^dagger
  void validate() const;
};

// Haar average of the determinant-ratio product; factors with phi == theta are exactly 1.
ZkDirectResult cue_genfun_mc(const EnsembleSpec& spec, const CUEAngles& angles, double rel_tol = 0.0);
ZkDirectResult cue_genfun_from_batch(const SpectrumBatch& batch, const CUEAngles& angles, double rel_tol = 0.0);
// N = 1 oracle: Gauss-Legendre over the single phase.
Complex cue_genfun_quadrature_n1(const CUEAngles& angles, int nodes = 200);

struct CUEDensity {
  double value = 0.0, stderr_ = 0.0;
};
// Level density at angle theta from the k+ = k- = 1 generating function: with increment eps,
// (1/2pi) (N + 2 Re i dZ/dphi_+) is the Poisson-smoothed density; derivative by central
// differences of the Monte Carlo estimator on common samples.
CUEDensity cue_r1(const SpectrumBatch& batch, double theta, double eps, double h = 1e-4);

}  // namespace susy
