#include "susy/colorflavor.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace susy;

namespace {

const CFTSeries& rhs4() {
  static const CFTSeries s = [] {
    CFTConfig c;
    c.M = 4;
    return cft_rhs(c);
  }();
  return s;
}

Grassmann F(int p) { return Grassmann::zeta_star(2, p) * Grassmann::zeta(2, p); }

}  // namespace

TEST_CASE("lhs closed form against phase quadrature") {
  CFTConfig c;
  c.M = 6;
  const auto lhs = cft_lhs(c);
  for (int p = 0; p <= 3; ++p) {
    for (int q = 0; q <= 3; ++q) {
      // (XY)^n only reaches |p - q| <= 1
      const auto it = lhs.find(CFTKey{p, p, q, q});
      const Grassmann quad = cft_lhs_phase_quadrature(p, q);
      if (std::abs(p - q) > 1) {
        CHECK(it == lhs.end());
        CHECK(max_abs_coeff(quad) < 1e-12);
      } else {
        REQUIRE(it != lhs.end());
        CHECK(max_abs_diff(it->second, quad) < 1e-10);
      }
    }
  }
  // unbalanced powers integrate to zero
  CHECK(max_abs_coeff(cft_lhs_phase_quadrature(2, 0)) < 1e-12);
}

TEST_CASE("sources off and the odd-only sector") {
  CFTConfig c;
  const auto lhs = cft_lhs(c);
  const Grassmann odd_only = Grassmann(2, 1.0) + F(0) * F(1);
  CHECK(lhs.at(CFTKey{0, 0, 0, 0}) == odd_only);
  const Grassmann& r0 = rhs4().at(CFTKey{0, 0, 0, 0});
  CHECK(std::abs(r0.body() - 1.0) < 1e-15);  // fixes the measure constant
  CHECK(max_abs_diff(r0, odd_only) < 1e-10);
  // with the commuting components off the series stops at degree zero
  const auto ev = cft_evaluate(rhs4(), {0.0, 0.0, 0.0, 0.0}, 4);
  CHECK(max_abs_diff(ev[0], odd_only) < 1e-10);
  for (std::size_t d = 1; d < ev.size(); ++d) CHECK(ev[d].is_zero());
}

TEST_CASE("both sides agree through order 4 on 20 source assignments") {
  CFTConfig c;
  c.M = 4;
  const auto rep = compare_cft(c, 20, 7);
  CHECK(rep.seeds == 20);
  CHECK(rep.max_coefficient_diff < 1e-8);
  CHECK(rep.max_evaluated_diff < 1e-8);
  CHECK(std::abs(rep.normalization - 1.0) < 1e-14);
  CHECK(rep.doubling_residual < 1e-10);
  CHECK(rep.pass);
  // only phase-balanced monomials survive on the rhs
  for (const auto& [k, v] : rhs4()) {
    if (k[0] != k[1] || k[2] != k[3]) CHECK(max_abs_coeff(v) < 1e-10);
  }
}

TEST_CASE("truncation order stability") {
  CFTConfig c;
  c.M = 2;
  const auto low = cft_rhs(c);
  for (const auto& [k, v] : low) CHECK(max_abs_diff(v, rhs4().at(k)) < 1e-12);
  const auto l2 = cft_lhs(c);
  c.M = 4;
  const auto l4 = cft_lhs(c);
  for (const auto& [k, v] : l2) CHECK(l4.at(k) == v);
}

TEST_CASE("measure constant does not depend on N") {
  // for N >= 2 the integral is regular; at N = 1 it needs the boundary term at |a| = 1
  CFTConfig c;
  c.M = 0;
  c.r_nodes = 10;
  c.theta_nodes = 16;
  c.angle_nodes = 8;
  const Complex n1 = cft_rhs_detailed(c).raw_normalization;
  c.N = 2;
  const Complex n2 = cft_rhs_detailed(c).raw_normalization;
  c.N = 3;
  const Complex n3 = cft_rhs_detailed(c).raw_normalization;
  CHECK(std::abs(n1 - n2) < 1e-10);
  CHECK(std::abs(n1 - n3) < 1e-10);
  CHECK(std::abs(n1 + std::numbers::pi * std::numbers::pi) < 1e-10);
}

TEST_CASE("color-flavor configuration guards") {
  CFTConfig c;
  c.kplus = 2;
  CHECK_THROWS_AS(cft_lhs(c), DomainError);
  c = {};
  c.N = 2;
  CHECK_THROWS_AS(cft_lhs(c), DomainError);
  c = {};
  c.M = 20;
  CHECK_THROWS_AS(cft_rhs(c), DomainError);
  c = {};
  c.angle_nodes = 4;
  CHECK_THROWS_AS(cft_rhs(c), DomainError);
}

TEST_CASE("CUE generating function") {
  EnsembleSpec s;
  s.cls = EnsembleClass::CUE;
  s.N = 4;
  s.samples = 2000;
  s.seed = 3;
  const auto batch = sample(s);

  SUBCASE("phi = theta gives one exactly") {
    const Complex t(0.4, 0.2), u(-1.0, 0.3);
    const auto z = cue_genfun_from_batch(batch, {{t}, {t}, {u}, {u}});
    CHECK(z.mean == Complex(1.0));
    CHECK(z.variance == 0.0);
  }

  SUBCASE("N = 1 against phase quadrature") {
    EnsembleSpec one = s;
    one.N = 1;
    one.samples = 400000;
    const CUEAngles holo{{Complex(0.3, 1.0)}, {Complex(1.1, 0.8)}, {}, {}};
    CHECK(std::abs(cue_genfun_mc(one, holo).mean - cue_genfun_quadrature_n1(holo)) < 1e-3);
    CHECK(std::abs(cue_genfun_quadrature_n1(holo) - 1.0) < 1e-12);
    const CUEAngles mixed{{Complex(0.3, 0.7)}, {Complex(1.1, 0.5)}, {Complex(-0.5, 0.7)}, {Complex(0.2, 0.6)}};
    const auto z = cue_genfun_mc(one, mixed);
    const Complex q = cue_genfun_quadrature_n1(mixed);
    CHECK(std::abs(z.mean - q) < 1e-3);
    CHECK(std::abs(z.mean - q) < 4.0 * z.stderr_);
  }

  SUBCASE("density is flat") {
    const double expect = s.N / (2.0 * std::numbers::pi);
    for (double th : {0.0, 0.9, 2.5, 4.0}) {
      const auto r = cue_r1(batch, th, 0.3);
      CHECK(std::abs(r.value - expect) < 4.0 * r.stderr_ + 1e-9);
    }
  }

  SUBCASE("guards") {
    CHECK_THROWS_AS(cue_genfun_from_batch(batch, {{Complex(0.1, 0.0)}, {0.2}, {}, {}}), DomainError);
    CHECK_THROWS_AS(cue_genfun_from_batch(batch, {{Complex(0.1, 0.1)}, {}, {}, {}}), DimensionError);
    EnsembleSpec g = s;
    g.cls = EnsembleClass::GUE;
    CHECK_THROWS_AS(cue_genfun_mc(g, {}), DomainError);
  }
}
