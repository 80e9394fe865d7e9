#include "susy/genfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace susy;

namespace {

const Complex kI{0.0, 1.0};

SuperMatrix bundle_B(std::uint64_t seed, int N = 1) {
  return build_dual_pair(random_bundle<Complex>(2, N, 1, seed), AdjointLayout::Physics).B;
}

// 1/1 sigma with a soul: Grassmann pair 0 provides the odd entries.
SuperMatrix soulful_sigma(Complex a, Complex b, Complex mu, Complex nu) {
  const Grassmann z = Grassmann::zeta(1, 0), zs = Grassmann::zeta_star(1, 0);
  return SuperMatrix::from_blocks(1, 1, 1, {Grassmann(1, a) + z * zs * Complex(0.3, -0.1)}, {z * mu}, {zs * nu},
                                  {Grassmann(1, b)});
}

}  // namespace

TEST_CASE("normalization constants") {
  CHECK(c_beta(2, 1) == 1.0);
  CHECK(c_beta(2, 2) == 4.0);
  CHECK(c_beta(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(c_beta(4, 2) == doctest::Approx(std::pow(2.0, 5.0)));
}

TEST_CASE("source config validation") {
  CHECK_THROWS_AS(SourceConfig::k1(0.0, 0.0, 0.0).validate(), DomainError);
  CHECK_THROWS_AS(SourceConfig::k1(0.0, 0.0, 0.1, 2).validate(), DomainError);
  const auto s = SourceConfig::k1(0.3, 0.0, 0.1, -1);
  CHECK(s.x_pm(0) == Complex(0.3, 0.1));
}

TEST_CASE("keystone through the genfun entry point") {
  ExactVectorBundle zero;
  zero.beta = 2;
  zero.N = 2;
  zero.k = 1;
  zero.z = {{GaussRational(0), GaussRational(0)}};
  zero.L = {1};
  CHECK(keystone_check(zero).pass);
  CHECK(keystone_check(random_bundle<GaussRational>(2, 2, 1, 5)).pass);
  CHECK(keystone_check(random_bundle<GaussRational>(1, 2, 1, 6)).pass);
}

TEST_CASE("Hubbard-Stratonovich") {
  SUBCASE("B = 0") {
    const auto rep = hs_verify(SuperMatrix::zero(1, 1, 1));
    CHECK(rep.pass);
    CHECK(std::abs(rep.rhs.body() - 1.0) < 1e-12);
  }
  SUBCASE("seeded bundles, and twice B") {
    for (std::uint64_t seed : {1, 2, 3}) {
      const SuperMatrix B = bundle_B(seed);
      const auto rep = hs_verify(B);
      CHECK(rep.pass);
      CHECK(rep.doubling_residual < 1e-7);
      CHECK(rep.max_deviation < 1e-6);
      const auto rep2 = hs_verify(Complex(2.0) * B);
      CHECK(rep2.pass);
    }
  }
  SUBCASE("N = 2 bundle") { CHECK(hs_verify(bundle_B(9, 2)).pass); }
  SUBCASE("no Wick rotation diverges") {
    HSConfig cfg;
    cfg.wick_rotation = false;
    CHECK_THROWS_AS(hs_verify(bundle_B(1), cfg), DivergenceError);
  }
}

TEST_CASE("Gaussian superintegral") {
  SUBCASE("sigma = 0, N = 1") {
    const auto src = SourceConfig::k1(0.3, 0.0, 0.1);
    const auto rep = gaussian_superintegral_check(SuperMatrix::zero(1, 1, 1), src, 1);
    CHECK(rep.pass);
    CHECK(std::abs(rep.rhs.body() - 1.0) < 1e-12);  // J = 0: boson and fermion cancel
  }
  SUBCASE("scalar sigma is 1") {
    const Grassmann c(1, Complex(0.7));
    const auto s = SuperMatrix::from_blocks(1, 1, 1, {c}, {Grassmann(1)}, {Grassmann(1)}, {c});
    const auto rep = gaussian_superintegral_check(s, SourceConfig::k1(0.2, 0.0, 0.1), 2);
    CHECK(rep.pass);
    CHECK(std::abs(rep.rhs.body() - 1.0) < 1e-12);
  }
  SUBCASE("sources and odd entries") {
    const auto sigma = soulful_sigma(0.4, -0.2, Complex(0.5, 0.2), Complex(-0.3, 0.7));
    for (int L : {1, -1}) {
      const auto src = SourceConfig::k1(0.3, 0.15, 0.1, L);
      const auto r1 = gaussian_superintegral_check(sigma, src, 1);
      CHECK(r1.pass);
      const auto r2 = gaussian_superintegral_check(sigma, src, 2);
      CHECK(r2.pass);
      CHECK(max_abs_diff(r2.lhs, r1.lhs * r1.lhs) < 1e-8);
    }
  }
  SUBCASE("wrong increment side") {
    SuperintegralOptions opt;
    opt.flip_boson_increment = true;
    for (int L : {1, -1}) {
      CHECK_THROWS_AS(gaussian_superintegral_check(SuperMatrix::zero(1, 1, 1), SourceConfig::k1(0.3, 0.0, 0.1, L),
                                                   1, opt),
                      DivergenceError);
    }
  }
}

TEST_CASE("Z_1 normalization at J = 0") {
  for (int N : {1, 5, 20}) {
    const double edge = std::sqrt(2.0 * N);
    for (double f : {-0.8, -0.4, 0.0, 0.3, 0.7}) {
      const auto z = z_super_k1(SourceConfig::k1(f * edge, 0.0, 0.05), N);
      CHECK(std::abs(z - 1.0) < 1e-3);
    }
  }
  CHECK(std::abs(z_super_k1(SourceConfig::k1(0.2, 0.0, 0.05, -1), 3) - 1.0) < 1e-3);
}

TEST_CASE("Z_1 against the N = 1 brute force integral") {
  for (int L : {1, -1}) {
    for (double J : {0.05, -0.1, 0.3}) {
      const auto src = SourceConfig::k1(0.4, J, 0.1, L);
      CHECK(std::abs(z_super_k1(src, 1) - z_quadrature_n1(src)) < 1e-3);
    }
  }
}

TEST_CASE("contour too close to the pole") {
  ZOptions opt;
  opt.s1_shift = 0.0;
  CHECK_THROWS_AS(z_super_k1(SourceConfig::k1(0.0, 0.0, 0.01), 1, opt), ResolutionError);
  opt.s1_shift = 1.0;
  CHECK(std::abs(z_super_k1(SourceConfig::k1(0.0, 0.0, 0.01), 1, opt) - 1.0) < 1e-6);
}

TEST_CASE("one-point function from sources, N = 1") {
  const ZEvaluator zf = [](const SourceConfig& s) { return z_super_k1(s, 1); };
  for (double x : {0.0, 0.5, -1.1}) {
    std::vector<double> eps{0.2, 0.1, 0.05}, vals, oracle;
    for (double e : eps) {
      const auto c = correlations_from_sources(zf, SourceConfig::k1(x, 0.0, e));
      vals.push_back(c.R1);
      oracle.push_back(r1_lorentzian_n1(x, e));
      CHECK(std::abs(c.R1 - r1_lorentzian_n1(x, e)) < 1e-6);
    }
    const double exact = std::exp(-x * x) / std::sqrt(std::numbers::pi);
    CHECK(std::abs(extrapolate_to_zero(eps, vals) - exact) < 2e-3);
  }
}

TEST_CASE("real part of the one-point function is odd in x") {
  const ZEvaluator zf = [](const SourceConfig& s) { return z_super_k1(s, 2); };
  const auto a = correlations_from_sources(zf, SourceConfig::k1(0.7, 0.0, 0.1));
  const auto b = correlations_from_sources(zf, SourceConfig::k1(-0.7, 0.0, 0.1));
  CHECK(std::abs(a.Rhat.real() + b.Rhat.real()) < 1e-6);
  CHECK(std::abs(a.Rhat.imag() - b.Rhat.imag()) < 1e-6);
}

TEST_CASE("unstable derivative is flagged") {
  const ZEvaluator noisy = [](const SourceConfig& s) {
    return Complex(std::abs(s.J[0]) < 6e-4 ? 1.0 : 1.0 + 50.0 * s.J[0] * s.J[0] * s.J[0] / 1e-6, 0.0);
  };
  CHECK_THROWS_AS(correlations_from_sources(noisy, SourceConfig::k1(0.0)), DifferentiationError);
}

TEST_CASE("delta-function identity, 1/1") {
  const SuperMatrix B = bundle_B(4);
  const auto rep_str = delta_identity_check(B, [](const SuperMatrix& r) { return supertrace(r); });
  CHECK(rep_str.pass);
  CHECK(rep_str.max_deviation < 1e-8);
  const auto rep_sq = delta_identity_check(B, [](const SuperMatrix& r) { return supertrace(r * r); });
  CHECK(rep_sq.pass);
  // Only the Grassmann part of str B^2 is nontrivial; make sure it is there.
  CHECK(!rep_sq.f_of_B.soul().is_zero());
  const auto rep_one = delta_identity_check(B, [](const SuperMatrix& r) { return Grassmann(r.pairs(), 1.0); });
  CHECK(std::abs(rep_one.round_trip.body() - 1.0) < 1e-10);
}

TEST_CASE("Ingham-Siegel") {
  // N = 1 closed forms
  CHECK(ingham_siegel_integral({2.0}, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ingham_siegel_integral({2.0}, 1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  for (int N : {1, 2}) {
    for (int m : {0, 1}) {
      const auto rep = ingham_siegel_check(N, m);
      CHECK(rep.pass);
      CHECK(std::abs(rep.fitted_exponent - (m + N)) < 1e-6);
    }
  }
  CHECK_THROWS_AS(ingham_siegel_integral({1.0, 0.0, 0.0, -1.0}, 2, 0), DomainError);
}

TEST_CASE("Pastur saddle") {
  auto [p, m] = pastur_saddle(0.0, 2, 1);
  CHECK(std::abs(p - kI) < 1e-14);
  CHECK(std::abs(m + kI) < 1e-14);
  const double edge = std::sqrt(2.0 * 3 / 1);
  auto [e1, e2] = pastur_saddle(edge, 3, 1);
  CHECK(std::abs(e1 - edge / 2.0) < 1e-12);
  CHECK(e1.imag() == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    for (int gamma : {1, 2}) {
      auto [s1, s2] = pastur_saddle(x, 7, gamma);
      for (Complex s : {s1, s2}) CHECK(std::abs(s * (x - s) - 7.0 / (2.0 * gamma)) < 1e-12);
    }
  }
  // density integrates to N
  double total = 0.0;
  const int n = 20000;
  const double r = std::sqrt(2.0 * 5);
  for (int i = 0; i < n; ++i) total += semicircle_density(-r + (i + 0.5) * 2 * r / n, 5, 1) * 2 * r / n;
  CHECK(total == doctest::Approx(5.0).epsilon(1e-4));
}

TEST_CASE("identity suite") { CHECK(identity_suite(3).pass); }
