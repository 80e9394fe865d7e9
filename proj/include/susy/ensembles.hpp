#pragma once

// Monte Carlo side: Gaussian and circular ensembles, one- and two-point
// statistics, unfolding, and the generating function averaged directly over H.
//
// Gaussian weight P(H) ~ exp(-beta tr H^2 / 2), trace in the complex
// representation (2N x 2N for GSE). Entry variances:
//   GOE  diagonal 1,   off-diagonal 1/2
//   GUE  diagonal 1/2, off-diagonal Re and Im 1/4 each
//   GSE  diagonal 1/8, off-diagonal quaternion components 1/16 each
// The semicircle radius is sqrt(2N / gamma) in every class.

#include "susy/errors.hpp"
#include "susy/genfun.hpp"
#include "susy/scalar.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace susy {

class UnfoldingError : public NumericError {
 public:
  using NumericError::NumericError;
};

enum class EnsembleClass { GOE, GUE, GSE, COE, CUE, CSE };

std::string to_string(EnsembleClass c);
EnsembleClass ensemble_from_string(const std::string& s);

struct EnsembleSpec {
  EnsembleClass cls = EnsembleClass::GUE;
  int N = 10;
  std::uint64_t seed = 1;
  int samples = 100;

  int beta() const;
  int gamma() const { return beta() == 4 ? 2 : 1; }
  bool circular() const;
  int matrix_dim() const { return beta() == 4 ? 2 * N : N; }
  void validate() const;
};

struct SpectrumBatch {
  EnsembleSpec spec;
  // Sorted eigenvalues (Gaussian) or phases in [0, 2 pi) (circular), one row per sample.
  // Kramers pairs of the symplectic classes are collapsed to a single level.
  std::vector<std::vector<double>> levels;
  bool degeneracy_verified = true;
  double max_degeneracy_split = 0.0;
  bool unfolded = false;
  std::string unfolding;  // method tag when unfolded
  double window_lo = 0.0, window_hi = 0.0;  // kept range on the unfolded scale
};

struct CorrelationEstimate {
  std::string kind;                 // "R1", "spacing", "Y2"
  std::vector<double> edges;        // bin edges, size = values + 1
  std::vector<double> grid;         // bin centers
  std::vector<double> values;
  std::vector<double> stderr_;
  std::string binning;
  bool low_statistics = false;
};

// Independent stream for sample `index` of a run with master seed `seed`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index);

// Gaussian classes: Hermitean (self-dual for GSE, in the 2N representation).
Eigen::MatrixXcd sample_gaussian(EnsembleClass cls, int N, std::mt19937_64& rng);
// Haar unitary via QR of a complex Ginibre matrix with the diagonal phase fix.
Eigen::MatrixXcd sample_haar_unitary(int n, std::mt19937_64& rng);
// Circular classes: CUE U, COE U^T U, CSE U^D U (2N representation).
Eigen::MatrixXcd sample_circular(EnsembleClass cls, int N, std::mt19937_64& rng);

// The quaternion dual Z M^T Z^-1, Z = [[0, 1], [-1, 0]] (x) 1_N in block layout.
Eigen::MatrixXcd quaternion_dual(const Eigen::MatrixXcd& m);

// Levels of one sampled matrix; collapses Kramers pairs for beta = 4.
std::vector<double> levels_of(const EnsembleSpec& spec, const Eigen::MatrixXcd& m, double* split = nullptr);

SpectrumBatch sample(const EnsembleSpec& spec, int threads = 0);

// ---------------------------------------------------------------------------
// one-point function

// Freedman-Diaconis edges for the pooled levels.
std::vector<double> freedman_diaconis_edges(const SpectrumBatch& batch);
CorrelationEstimate estimate_R1(const SpectrumBatch& batch, std::vector<double> edges = {});
double integrate_estimate(const CorrelationEstimate& e);

struct ResolventEstimate {
  double value = 0.0, stderr_ = 0.0;
};
ResolventEstimate resolvent_R1(const SpectrumBatch& batch, double x, double eps);

// Support edge from a least-squares fit R1^2 = a - b x^2 over |x| <= frac * radius.
double fitted_support_edge(const CorrelationEstimate& r1, double radius, double frac = 0.8);

// ---------------------------------------------------------------------------
// unfolding and local statistics

enum class UnfoldMethod { SemicircleCDF, Polynomial };

struct UnfoldingMap {
  UnfoldMethod method = UnfoldMethod::SemicircleCDF;
  int degree = 7;           // polynomial fit
  double keep_fraction = 0.8;
};

SpectrumBatch unfold(const SpectrumBatch& batch, const UnfoldingMap& map = {});
double mean_spacing(const SpectrumBatch& unfolded);

struct LocalStatistics {
  CorrelationEstimate spacing;
  CorrelationEstimate y2;
};

// Y2 = 1 - R2 on the unfolded scale; errors from batch means over `blocks` sample groups.
LocalStatistics local_statistics(const SpectrumBatch& unfolded, double xi_max = 3.0, double bin = 0.1,
                                 int blocks = 20);
std::vector<double> pooled_spacings(const SpectrumBatch& unfolded);

// Extrapolation of Y2 to xi = 0 with a + b xi^2 over xi <= xi_fit.
double y2_at_zero(const CorrelationEstimate& y2, double xi_fit = 0.35);

// Sine-kernel cluster function (sin pi xi / pi xi)^2.
double sine_kernel_y2(double xi);
// Y2 at the band center of the finite-N GUE, from the Hermite kernel (exact for that N).
double gue_kernel_y2(int N, double xi);

// ---------------------------------------------------------------------------
// tests of distributions

double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_uniform(std::vector<double> u);  // against U(0, 1)
// Asymptotic Kolmogorov survival function P(D sqrt(n_eff) > lambda).
double kolmogorov_pvalue(double d, double n_eff);

// ---------------------------------------------------------------------------
// generating function, direct average

struct ZkDirectResult {
  Complex mean;
  double stderr_ = 0.0;
  double variance = 0.0;
  int samples = 0;
};

// Average of prod_p (det(H - x_p + i L_p eps - J_p) / det(H - x_p + i L_p eps + J_p))^gamma.
// Factors with J_p = 0 are exactly 1 and skipped.
ZkDirectResult zk_direct(const EnsembleSpec& spec, const SourceConfig& src, double rel_tol = 0.0);
ZkDirectResult zk_from_batch(const SpectrumBatch& batch, const SourceConfig& src, double rel_tol = 0.0);

}  // namespace susy
