#include "susy/random_elements.hpp"

#include <doctest.h>

using namespace susy;
using testgen::rand_element;
using testgen::rand_supermatrix;

namespace {

double rel(double err, double scale) { return err / std::max(1.0, scale); }

}  // namespace

TEST_CASE("parity discipline on construction") {
  auto m = SuperMatrix::zero(1, 1, 1);
  CHECK_THROWS_AS(m.set(0, 1, Grassmann(1, 1.0)), ParityError);
  CHECK_THROWS_AS(m.set(0, 0, Grassmann::zeta(1, 0)), ParityError);
  CHECK_NOTHROW(m.set(0, 1, Grassmann::zeta(1, 0)));
}

TEST_CASE("supervector product pattern") {
  const int G = 2;
  const auto z = Grassmann(G, Complex(0.5, 1.0));
  const auto zeta = Grassmann::zeta(G, 0);
  const auto psi = SuperMatrix::supervector(G, {z}, {zeta});
  const auto a = Grassmann(G, 2.0), b = Grassmann(G, 3.0);
  const auto mu = Grassmann::zeta_star(G, 1), nu = Grassmann::zeta(G, 1);
  const auto s = SuperMatrix::from_blocks(G, 1, 1, {a}, {mu}, {nu}, {b});
  const auto out = s * psi;
  CHECK(out(0, 0) == a * z + mu * zeta);
  CHECK(out(1, 0) == nu * z + b * zeta);
  CHECK(out(0, 0).is_even());
  CHECK(out(1, 0).is_odd());
  CHECK(SuperMatrix::identity(G, 1, 1) * psi == psi);
}

TEST_CASE("transpose and dagger") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = rand_supermatrix<GaussRational>(rng, 2, 1, 1);
    CHECK(dagger(dagger(s)) == s);
    const auto s2 = rand_supermatrix<GaussRational>(rng, 2, 2, 2);
    const auto s3 = rand_supermatrix<GaussRational>(rng, 2, 2, 2);
    CHECK(stranspose(s2 * s3) == stranspose(s3) * stranspose(s2));
    CHECK(dagger(s2 * s3) == dagger(s3) * dagger(s2));
  }
  // odd blocks flip under a double transpose
  const int G = 1;
  const auto s = SuperMatrix::from_blocks(G, 1, 1, {Grassmann(G, 1.0)}, {Grassmann::zeta(G, 0)},
                                          {Grassmann::zeta_star(G, 0)}, {Grassmann(G, 2.0)});
  const auto tt = stranspose(stranspose(s));
  CHECK(tt != s);
  CHECK(tt(0, 1) == -s(0, 1));
  CHECK(tt(1, 0) == -s(1, 0));
  CHECK(tt(0, 0) == s(0, 0));
}

TEST_CASE("supervector length is real") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int G = 3;
    std::vector<Grassmann> top, bottom;
    for (int i = 0; i < 2; ++i) top.push_back(rand_element<Complex>(rng, G, 0, 3));
    for (int i = 0; i < 2; ++i) bottom.push_back(rand_element<Complex>(rng, G, 1, 3, false));
    const auto psi = SuperMatrix::supervector(G, top, bottom);
    const auto len = (dagger(psi) * psi)(0, 0);
    CHECK(max_abs_diff(conjugate(len), len) < 1e-13);
  }
}

TEST_CASE("supertrace") {
  CHECK(supertrace(SuperMatrix::identity(1, 3, 2)) == Grassmann(1, 1.0));
  const auto d = SuperMatrix::from_blocks(1, 1, 1, {Grassmann(1, 2.0)}, {Grassmann(1)}, {Grassmann(1)},
                                          {Grassmann(1, 3.0)});
  CHECK(supertrace(d) == Grassmann(1, -1.0));
  CHECK_THROWS_AS(supertrace(SuperMatrix(1, 1, 1, 2, 1)), DimensionError);
}

TEST_CASE("cyclicity and multiplicativity over 500 seeded pairs") {
  std::mt19937_64 rng(23);
  double worst_str = 0.0, worst_sdet = 0.0, worst_forms = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto s1 = rand_supermatrix<Complex>(rng, 2, 2, 2, 2, 3.0);
    const auto s2 = rand_supermatrix<Complex>(rng, 2, 2, 2, 2, 3.0);
    const auto a = supertrace(s1 * s2), b = supertrace(s2 * s1);
    worst_str = std::max(worst_str, rel(max_abs_diff(a, b), max_abs_coeff(a)));
    const auto lhs = sdet(s1 * s2);
    const auto rhs = sdet(s1) * sdet(s2);
    worst_sdet = std::max(worst_sdet, rel(max_abs_diff(lhs, rhs), max_abs_coeff(rhs)));
    const auto f1 = sdet(s1, SdetForm::BosonSchur), f2 = sdet(s1, SdetForm::FermionSchur);
    worst_forms = std::max(worst_forms, rel(max_abs_diff(f1, f2), max_abs_coeff(f1)));
  }
  CHECK(worst_str < 1e-12);
  CHECK(worst_sdet < 1e-10);
  CHECK(worst_forms < 1e-10);
}

TEST_CASE("exact multiplicativity") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s1 = rand_supermatrix<GaussRational>(rng, 2, 1, 1, 2, 3.0);
    const auto s2 = rand_supermatrix<GaussRational>(rng, 2, 1, 1, 2, 3.0);
    if (CoeffTraits<GaussRational>::is_zero(s1(1, 1).body()) || CoeffTraits<GaussRational>::is_zero(s2(1, 1).body()) ||
        CoeffTraits<GaussRational>::is_zero(s1(0, 0).body()) || CoeffTraits<GaussRational>::is_zero(s2(0, 0).body())) {
      continue;
    }
    CHECK(sdet(s1 * s2) == sdet(s1) * sdet(s2));
    CHECK(sdet(s1, SdetForm::BosonSchur) == sdet(s1, SdetForm::FermionSchur));
  }
}

TEST_CASE("sdet in the 1/1 case") {
  const int G = 2;
  const auto a = Grassmann(G, 2.0) + Grassmann::monomial(G, {0, 1});
  const auto b = Grassmann(G, Complex(0.5, 1.0));
  const auto mu = Grassmann::zeta(G, 1), nu = Grassmann::zeta_star(G, 1);
  const auto s = SuperMatrix::from_blocks(G, 1, 1, {a}, {mu}, {nu}, {b});
  const auto expected = a * ginverse(b) - mu * nu * ginverse(b * b);
  CHECK(max_abs_diff(sdet(s), expected) < 1e-15);
  const auto bd = SuperMatrix::from_blocks(G, 1, 1, {a}, {Grassmann(G)}, {Grassmann(G)}, {b});
  CHECK(max_abs_diff(sdet(bd), a * ginverse(b)) < 1e-15);
  const auto sing = SuperMatrix::from_blocks(G, 1, 1, {a}, {mu}, {nu}, {Grassmann(G)});
  CHECK_THROWS_AS(sdet(sing), SingularBlockError);
}

TEST_CASE("determinant with nilpotent-only pivot falls back to cofactors") {
  const int G = 2;
  const auto n = Grassmann::monomial(G, {0, 1});
  // det [[n, 1], [1, n]] = n^2 - 1 = -1; first column has no invertible body in row 0.
  std::vector<Grassmann> m = {n, Grassmann(G, 1.0), Grassmann(G, 1.0), n};
  CHECK(max_abs_diff(even_det(m, 2, G), Grassmann(G, -1.0)) < 1e-15);
  std::vector<Grassmann> z = {n, Grassmann::monomial(G, {2, 3}), Grassmann(G), n};
  CHECK(even_det(z, 2, G) == n * n);
}

TEST_CASE("inverse") {
  const int G = 2;
  CHECK(sinverse(SuperMatrix::identity(G, 2, 1)) == SuperMatrix::identity(G, 2, 1));
  // (1 + n)^-1 = 1 - n + n^2 for even nilpotent n
  const auto n = Grassmann::monomial(G, {0, 1}) + Grassmann::monomial(G, {2, 3});
  auto one_plus = SuperMatrix::zero(G, 1, 0);
  one_plus.set(0, 0, Grassmann(G, 1.0) + n);
  CHECK(sinverse(one_plus)(0, 0) == Grassmann(G, 1.0) - n + n * n);

  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = rand_supermatrix<Complex>(rng, 2, 2, 2, 2, 3.0);
    const auto inv = sinverse(s);
    const auto one = SuperMatrix::identity(2, 2, 2);
    CHECK(rel((s * inv).max_abs_diff(one), 1.0) < 1e-10);
    CHECK(rel((inv * s).max_abs_diff(one), 1.0) < 1e-10);
    CHECK(sinverse(inv).max_abs_diff(s) < 1e-9);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = rand_supermatrix<GaussRational>(rng, 2, 1, 1, 2, 3.0);
    if (CoeffTraits<GaussRational>::is_zero(s(1, 1).body()) || CoeffTraits<GaussRational>::is_zero(s(0, 0).body())) {
      continue;
    }
    CHECK(s * sinverse(s) == ExactSuperMatrix::identity(2, 1, 1));
  }
}

TEST_CASE("sdet(exp) equals exp(str)") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = Complex(0.3) * rand_supermatrix<Complex>(rng, 2, 2, 2, 3);
    const auto lhs = sdet(sexp(s));
    const auto rhs = gexp(supertrace(s));
    CHECK(rel(max_abs_diff(lhs, rhs), max_abs_coeff(rhs)) < 1e-10);
  }
}

TEST_CASE("supergroup membership") {
  const int G = 2;
  CHECK(check_supergroup(SuperMatrix::identity(G, 2, 2), SupergroupFamily::Unitary).member);
  CHECK(check_supergroup(SuperMatrix::identity(G, 2, 2), SupergroupFamily::UOSp).member);
  CHECK(check_supergroup(SuperMatrix::identity(G, 2, 2), SupergroupFamily::Noncompact,
                         Metric{{1, -1, 1, 1}})
            .member);
  // ordinary unitary blocks with zero odd parts
  const double c = std::cos(0.4), s = std::sin(0.4);
  auto u = SuperMatrix::zero(G, 2, 1);
  u.set(0, 0, Grassmann(G, c));
  u.set(0, 1, Grassmann(G, -s));
  u.set(1, 0, Grassmann(G, s));
  u.set(1, 1, Grassmann(G, c));
  u.set(2, 2, Grassmann(G, Complex(std::cos(1.1), std::sin(1.1))));
  CHECK(check_supergroup(u, SupergroupFamily::Unitary).member);

  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = rand_supermatrix<Complex>(rng, 2, 1, 1, 3);
    const auto x = Complex(0.5) * (y - dagger(y));  // x^dag = -x
    CHECK((dagger(x) + x).max_abs_diff(SuperMatrix::zero(2, 1, 1)) < 1e-14);
    const auto res = check_supergroup(sexp(x), SupergroupFamily::Unitary);
    CHECK(res.member);
    CHECK(res.residual < 1e-10);
  }
  auto bad = SuperMatrix::identity(G, 1, 1);
  bad.set(0, 0, Grassmann(G, 2.0));
  CHECK_FALSE(check_supergroup(bad, SupergroupFamily::Unitary).member);
  const Metric bad_metric{{1, -1}};
  CHECK_THROWS_AS(bad_metric.validate(1, 1), DomainError);
}

TEST_CASE("Berezinians of linear maps") {
  const int G = 2;
  // eta = a zeta with a 2x2 ordinary matrix: d[eta] = det^-1 a d[zeta]
  const Complex a00(1.5, 0.2), a01(0.3, 0.0), a10(-0.4, 1.0), a11(0.8, -0.6);
  auto j = SuperMatrix::zero(G, 0, 2);
  j.set(0, 0, Grassmann(G, a00));
  j.set(0, 1, Grassmann(G, a01));
  j.set(1, 0, Grassmann(G, a10));
  j.set(1, 1, Grassmann(G, a11));
  const Complex det = a00 * a11 - a01 * a10;
  CHECK(std::abs(berezinian_linear(j).body() - 1.0 / det) < 1e-14);
  // y = c z
  auto je = SuperMatrix::zero(G, 1, 0);
  je.set(0, 0, Grassmann(G, 2.5));
  CHECK(std::abs(berezinian_linear(je).body() - 2.5) < 1e-15);
  // block-triangular mixed map: only diagonal blocks contribute
  auto jt = SuperMatrix::zero(G, 1, 1);
  jt.set(0, 0, Grassmann(G, 3.0) + Grassmann::monomial(G, {0, 1}));
  jt.set(0, 1, Grassmann::zeta(G, 1));
  jt.set(1, 1, Grassmann(G, 2.0));
  CHECK(max_abs_diff(berezinian_linear(jt), (Grassmann(G, 3.0) + Grassmann::monomial(G, {0, 1})) * Complex(0.5)) <
        1e-15);
}
