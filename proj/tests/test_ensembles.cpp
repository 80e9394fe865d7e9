#include "susy/ensembles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace susy;

namespace {

EnsembleSpec spec(EnsembleClass c, int N, int samples, std::uint64_t seed = 11) {
  EnsembleSpec s;
  s.cls = c;
  s.N = N;
  s.samples = samples;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("class bookkeeping") {
  CHECK(ensemble_from_string("gue") == EnsembleClass::GUE);
  CHECK(ensemble_from_string("CSE") == EnsembleClass::CSE);
  CHECK_THROWS_AS(ensemble_from_string("poisson"), DomainError);
  CHECK(spec(EnsembleClass::GSE, 3, 1).matrix_dim() == 6);
  CHECK(spec(EnsembleClass::COE, 3, 1).beta() == 1);
  CHECK_THROWS_AS(spec(EnsembleClass::GUE, 5000, 1).validate(), ResourceError);
}

TEST_CASE("sampled matrices have the class symmetry") {
  auto rng = sample_rng(3, 0);
  const auto h = sample_gaussian(EnsembleClass::GUE, 6, rng);
  CHECK((h - h.adjoint()).norm() == 0.0);
  const auto o = sample_gaussian(EnsembleClass::GOE, 6, rng);
  CHECK(o.imag().norm() == 0.0);
  CHECK((o - o.transpose()).norm() == 0.0);
  const auto q = sample_gaussian(EnsembleClass::GSE, 3, rng);
  CHECK((q - q.adjoint()).norm() == 0.0);
  CHECK((q - quaternion_dual(q)).norm() == 0.0);

  const auto u = sample_haar_unitary(5, rng);
  CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-13);
  const auto c = sample_circular(EnsembleClass::COE, 4, rng);
  CHECK((c - c.transpose()).norm() < 1e-13);
  const auto s = sample_circular(EnsembleClass::CSE, 3, rng);
  CHECK((s - quaternion_dual(s)).norm() < 1e-13);
  CHECK((s.adjoint() * s - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-13);
}

TEST_CASE("circular phases agree with a general eigensolver") {
  auto rng = sample_rng(9, 1);
  const auto sp = spec(EnsembleClass::CUE, 12, 1);
  for (int i = 0; i < 5; ++i) {
    Eigen::MatrixXcd u = sample_haar_unitary(12, rng);
    if (i == 4) {
      // force an eigenvalue at -1 to exercise the rotated transform
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
      Eigen::VectorXcd d = es.eigenvalues();
      d(0) = -1.0;
      u = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().inverse();
    }
    const auto fast = levels_of(sp, u);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
    std::vector<double> ref;
    for (int k = 0; k < 12; ++k) {
      double a = std::arg(es.eigenvalues()(k));
      if (a < 0) a += 2.0 * std::numbers::pi;
      ref.push_back(a);
    }
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < 12; ++k) {
      double d = std::abs(fast[k] - ref[k]);
      d = std::min(d, 2.0 * std::numbers::pi - d);
      CHECK(d < 1e-10);
    }
  }
}

TEST_CASE("symplectic spectra are doubly degenerate") {
  for (auto c : {EnsembleClass::GSE, EnsembleClass::CSE}) {
    const auto b = sample(spec(c, 2, 300));
    CHECK(b.degeneracy_verified);
    CHECK(b.max_degeneracy_split < 1e-10);
    for (const auto& row : b.levels) CHECK(row.size() == 2);
  }
}

TEST_CASE("seed determinism, independent of the thread count") {
  const auto a = sample(spec(EnsembleClass::GUE, 8, 40, 99), 1);
  const auto b = sample(spec(EnsembleClass::GUE, 8, 40, 99), 3);
  CHECK(a.levels == b.levels);
  const auto c = sample(spec(EnsembleClass::GUE, 8, 40, 100), 1);
  CHECK(a.levels != c.levels);
}

TEST_CASE("variance convention: <tr H^2> = (real degrees of freedom) / beta") {
  const int N = 4, S = 20000;
  for (auto c : {EnsembleClass::GOE, EnsembleClass::GUE, EnsembleClass::GSE}) {
    const auto sp = spec(c, N, 1);
    const double dof = c == EnsembleClass::GOE ? N * (N + 1) / 2.0
                       : c == EnsembleClass::GUE ? double(N * N)
                                                 : N * (2.0 * N - 1.0);
    const double expect = dof / sp.beta();
    double m = 0.0, m2 = 0.0;
    for (int s = 0; s < S; ++s) {
      auto rng = sample_rng(5, s);
      const double t = sample_gaussian(c, N, rng).squaredNorm();  // tr H^2 for Hermitean H
      m += t;
      m2 += t * t;
    }
    m /= S;
    const double se = std::sqrt((m2 / S - m * m) / S);
    CHECK(std::abs(m - expect) < 4.0 * se);
  }
}

TEST_CASE("CUE N = 1 phase is uniform") {
  const auto b = sample(spec(EnsembleClass::CUE, 1, 4000, 21));
  std::vector<double> u;
  for (const auto& r : b.levels) u.push_back(r[0] / (2.0 * std::numbers::pi));
  const double d = ks_uniform(u);
  CHECK(kolmogorov_pvalue(d, u.size()) > 0.01);
}

TEST_CASE("naive orthonormalization without the phase fix is not Haar") {
  // Checks the test can see the difference: Q from QR without phase correction has a
  // biased diagonal for n = 1 (always real positive times the Householder sign).
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> u;
  for (int i = 0; i < 2000; ++i) {
    Eigen::MatrixXcd z(1, 1);
    z(0, 0) = Complex(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    const Eigen::MatrixXcd q = qr.householderQ();
    double a = std::arg(q(0, 0));
    if (a < 0) a += 2.0 * std::numbers::pi;
    u.push_back(a / (2.0 * std::numbers::pi));
  }
  CHECK(kolmogorov_pvalue(ks_uniform(u), u.size()) < 0.01);
}

TEST_CASE("KS helpers") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({0, 0, 0}, {1, 1}) == 1.0);
  CHECK(kolmogorov_pvalue(0.0, 100) == 1.0);
  CHECK(kolmogorov_pvalue(0.5, 100) < 1e-10);
  CHECK(kolmogorov_pvalue(1.36 / 10.0, 100) == doctest::Approx(0.05).epsilon(0.15));
}

TEST_CASE("histogram one-point function") {
  const int N = 20;
  const auto b = sample(spec(EnsembleClass::GUE, N, 2000));
  const auto r1 = estimate_R1(b);
  CHECK(r1.binning == "freedman-diaconis");
  CHECK(integrate_estimate(r1) == doctest::Approx(N).epsilon(1e-12));  // all levels binned
  // symmetric weight: R1(x) = R1(-x) within errors
  const auto edges = std::vector<double>{-6, -5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5, 6};
  const auto sym = estimate_R1(b, edges);
  const std::size_t n = sym.values.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double diff = sym.values[i] - sym.values[n - 1 - i];
    CHECK(std::abs(diff) < 4.0 * std::hypot(sym.stderr_[i], sym.stderr_[n - 1 - i]));
  }
  // semicircle edge
  const double radius = std::sqrt(2.0 * N);
  const double w = r1.edges[1] - r1.edges[0];
  CHECK(std::abs(fitted_support_edge(r1, radius) - radius) < 2.0 * w);
}

TEST_CASE("empty bins carry an error but no weight") {
  const auto b = sample(spec(EnsembleClass::GUE, 4, 50));
  const auto r = estimate_R1(b, {100.0, 101.0, 102.0});
  CHECK(r.values[0] == 0.0);
  CHECK(r.stderr_[0] > 0.0);
  CHECK(r.low_statistics);
}

TEST_CASE("resolvent estimator") {
  const int N = 20;
  const auto b = sample(spec(EnsembleClass::GUE, N, 2000, 5));
  CHECK(resolvent_R1(b, 60.0, 0.05).value < 1e-4);
  CHECK_THROWS_AS(resolvent_R1(b, 0.0, 0.0), DomainError);
  // eps -> 0 extrapolation against a histogram bin at the center
  const double x = 0.5;
  std::vector<double> eps{0.2, 0.1, 0.05}, v;
  for (double e : eps) v.push_back(resolvent_R1(b, x, e).value);
  const double extrap = extrapolate_to_zero(eps, v);
  const auto h = estimate_R1(b, {x - 0.5, x + 0.5});
  // 1-wide bin averages the curvature of the semicircle, small at the center
  CHECK(std::abs(extrap - h.values[0]) < 0.02 * h.values[0] + 3 * h.stderr_[0]);
}

TEST_CASE("unfolding") {
  const auto b = sample(spec(EnsembleClass::GUE, 60, 600, 8));
  const auto u = unfold(b);
  CHECK(u.unfolded);
  CHECK(std::abs(mean_spacing(u) - 1.0) < 0.01);
  for (const auto& row : u.levels)
    for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i] > row[i - 1]);
  UnfoldingMap poly;
  poly.method = UnfoldMethod::Polynomial;
  const auto p = unfold(b, poly);
  CHECK(std::abs(mean_spacing(p) - 1.0) < 0.01);

  // the two maps agree on Y2
  const auto ys = local_statistics(u, 2.0, 0.2).y2;
  const auto yp = local_statistics(p, 2.0, 0.2).y2;
  for (std::size_t i = 0; i < ys.values.size(); ++i)
    CHECK(std::abs(ys.values[i] - yp.values[i]) < 3.0 * std::hypot(ys.stderr_[i], yp.stderr_[i]) + 1e-3);

  CHECK_THROWS_AS(unfold(b, UnfoldingMap{UnfoldMethod::Polynomial, 0, 0.8}), DomainError);
  CHECK_THROWS_AS(local_statistics(b), DomainError);
}

TEST_CASE("non-monotone polynomial fit is rejected") {
  // two well separated clusters: the staircase is flat in between and a high degree fit wiggles
  SpectrumBatch b;
  b.spec = spec(EnsembleClass::GUE, 4, 3);
  b.levels = {{-10.0, -9.9, 9.9, 10.0}, {-10.05, -9.95, 9.95, 10.05}, {-10.1, -9.8, 9.8, 10.1}};
  UnfoldingMap m;
  m.method = UnfoldMethod::Polynomial;
  m.degree = 9;
  m.keep_fraction = 1.0;
  CHECK_THROWS_AS(unfold(b, m), UnfoldingError);
}

TEST_CASE("local mean spacing at the center scales as 1/sqrt(N)") {
  std::vector<double> scaled;
  for (int N : {16, 64}) {
    const auto b = sample(spec(EnsembleClass::GUE, N, 400, 2));
    const double half = 0.5;
    const auto r = estimate_R1(b, {-half, half});
    scaled.push_back(std::sqrt(double(N)) / r.values[0]);
  }
  // D = pi / sqrt(2N) at the center
  for (double s : scaled) CHECK(s == doctest::Approx(std::numbers::pi / std::sqrt(2.0)).epsilon(0.03));
}

TEST_CASE("sine-kernel reference rederived from the finite-N Hermite kernel") {
  for (double xi : {0.0, 0.25, 0.5, 1.0, 1.5, 2.2, 3.0}) {
    CHECK(std::abs(gue_kernel_y2(400, xi) - sine_kernel_y2(xi)) < 2e-3);
  }
  // convergence with N
  CHECK(std::abs(gue_kernel_y2(800, 0.7) - sine_kernel_y2(0.7)) < std::abs(gue_kernel_y2(50, 0.7) - sine_kernel_y2(0.7)) + 1e-12);
}

TEST_CASE("GUE local statistics") {
  const auto b = sample(spec(EnsembleClass::GUE, 60, 1500, 13));
  const auto ls = local_statistics(unfold(b));
  CHECK(!ls.y2.low_statistics);
  CHECK(std::abs(y2_at_zero(ls.y2) - 1.0) < 0.05);
  int bad = 0, total = 0;
  for (std::size_t i = 0; i < ls.y2.grid.size(); ++i) {
    if (ls.y2.grid[i] < 0.1) continue;
    ++total;
    if (std::abs(ls.y2.values[i] - sine_kernel_y2(ls.y2.grid[i])) > 3.0 * ls.y2.stderr_[i] + 0.01) ++bad;
  }
  CHECK(bad <= 1);
  CHECK(total > 20);
  // spacing density normalized
  double area = 0.0;
  for (std::size_t i = 0; i < ls.spacing.values.size(); ++i)
    area += ls.spacing.values[i] * (ls.spacing.edges[i + 1] - ls.spacing.edges[i]);
  CHECK(area == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("unitary invariance: conjugated GUE has the same spacings") {
  const int N = 30, S = 400;
  auto vrng = sample_rng(77, 0);
  const Eigen::MatrixXcd V = sample_haar_unitary(N, vrng);
  SpectrumBatch a, c;
  a.spec = c.spec = spec(EnsembleClass::GUE, N, S);
  a.levels.resize(S);
  c.levels.resize(S);
  for (int s = 0; s < S; ++s) {
    auto rng = sample_rng(31, s);
    const Eigen::MatrixXcd h = sample_gaussian(EnsembleClass::GUE, N, rng);
    a.levels[s] = levels_of(a.spec, h);
    auto rng2 = sample_rng(32, s);
    const Eigen::MatrixXcd h2 = sample_gaussian(EnsembleClass::GUE, N, rng2);
    c.levels[s] = levels_of(c.spec, V.adjoint() * h2 * V);
  }
  const auto sa = pooled_spacings(unfold(a)), sc = pooled_spacings(unfold(c));
  const double d = ks_two_sample(sa, sc);
  const double neff = double(sa.size()) * sc.size() / (sa.size() + sc.size());
  CHECK(kolmogorov_pvalue(d, neff) > 0.01);
}

TEST_CASE("CUE phases are invariant under a global rotation") {
  const auto b = sample(spec(EnsembleClass::CUE, 10, 300, 3));
  const auto b2 = sample(spec(EnsembleClass::CUE, 10, 300, 4));
  std::vector<double> x, y;
  for (const auto& r : b.levels)
    for (double t : r) x.push_back(t);
  for (const auto& r : b2.levels)
    for (double t : r) y.push_back(std::fmod(t + 1.234, 2.0 * std::numbers::pi));
  const double neff = double(x.size()) * y.size() / (x.size() + y.size());
  // levels inside a sample are correlated (rigid), which only makes the test conservative
  CHECK(kolmogorov_pvalue(ks_two_sample(x, y), neff) > 0.01);
}

TEST_CASE("CUE and GUE spacings coincide") {
  const auto g = pooled_spacings(unfold(sample(spec(EnsembleClass::GUE, 60, 600, 5))));
  const auto c = pooled_spacings(unfold(sample(spec(EnsembleClass::CUE, 60, 600, 6))));
  CHECK(ks_two_sample(g, c) < 0.03);
  const auto o = pooled_spacings(unfold(sample(spec(EnsembleClass::COE, 60, 600, 7))));
  CHECK(ks_two_sample(g, o) > 0.05);  // different symmetry class is distinguishable
}

TEST_CASE("direct generating function") {
  SUBCASE("J = 0 is exactly one") {
    const auto r = zk_direct(spec(EnsembleClass::GUE, 5, 200), SourceConfig::k1(0.3, 0.0, 0.1));
    CHECK(r.mean == Complex(1.0));
    CHECK(r.variance == 0.0);
    auto src = SourceConfig::k1(0.3, 0.0, 0.1);
    src.beta = 4;
    const auto q = zk_direct(spec(EnsembleClass::GSE, 3, 50), src);
    CHECK(q.mean == Complex(1.0));
  }
  SUBCASE("N = 1 against quadrature and the sigma integral") {
    for (int L : {1, -1}) {
      const auto src = SourceConfig::k1(0.4, 0.1, 0.1, L);
      const auto r = zk_direct(spec(EnsembleClass::GUE, 1, 200000, 17), src);
      const Complex q = z_quadrature_n1(src);
      CHECK(std::abs(r.mean - q) < std::max(1e-3, 4.0 * r.stderr_));
      CHECK(std::abs(r.mean - z_super_k1(src, 1)) < 4.0 * r.stderr_ + 1e-6);
    }
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(zk_direct(spec(EnsembleClass::CUE, 2, 10), SourceConfig::k1(0.0, 0.1)), DomainError);
    CHECK_THROWS_AS(zk_direct(spec(EnsembleClass::GOE, 2, 10), SourceConfig::k1(0.0, 0.1)), DomainError);
    CHECK_THROWS_AS(zk_direct(spec(EnsembleClass::GUE, 3, 5), SourceConfig::k1(0.0, 0.5, 0.05), 1e-6),
                    StatisticsError);
  }
}
