#include "susy/random_elements.hpp"

#include <doctest.h>

#include <numbers>

using namespace susy;
using testgen::rand_element;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent product oracle: concatenate generator lists and bubble-sort them.
template <class C>
BasicGrassmann<C> naive_product(const BasicGrassmann<C>& a, const BasicGrassmann<C>& b) {
  BasicGrassmann<C> out(a.pairs());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      std::vector<int> ids;
      for (int id = 0; id < 64; ++id) {
        if (ta.mask >> id & 1) ids.push_back(id);
      }
      for (int id = 0; id < 64; ++id) {
        if (tb.mask >> id & 1) ids.push_back(id);
      }
      int swaps = 0;
      bool repeated = false;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ids.size() - i; ++j) {
          if (ids[j] == ids[j + 1]) repeated = true;
          if (ids[j] > ids[j + 1]) {
            std::swap(ids[j], ids[j + 1]);
            ++swaps;
          }
        }
      }
      if (repeated) continue;
      C c = ta.coeff * tb.coeff;
      if (swaps % 2) c = -c;
      std::uint64_t m = ta.mask | tb.mask;
      out += BasicGrassmann<C>::from_terms(a.pairs(), {{m, c}});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("product sign rules") {
  const int G = 3;
  const auto z1 = Grassmann::zeta(G, 0), z2 = Grassmann::zeta(G, 1), z3 = Grassmann::zeta(G, 2);
  CHECK((z1 * z1).is_zero());
  CHECK(z2 * z1 == -(z1 * z2));
  CHECK((z1 * z2) * z3 == z3 * (z1 * z2));
  CHECK(Grassmann::monomial(G, {2, 0}) == -Grassmann::monomial(G, {0, 2}));
  CHECK(Grassmann::monomial(G, {1, 1}).is_zero());
}

TEST_CASE("product agrees with the bubble-sort oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = rand_element<GaussRational>(rng, 3, -1, 6);
    const auto b = rand_element<GaussRational>(rng, 3, -1, 6);
    CHECK(a * b == naive_product(a, b));
  }
}

TEST_CASE("associativity and distributivity") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = rand_element<GaussRational>(rng, 3, -1, 5);
    const auto b = rand_element<GaussRational>(rng, 3, -1, 5);
    const auto c = rand_element<GaussRational>(rng, 3, -1, 5);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = rand_element<Complex>(rng, 3, -1, 5);
    const auto b = rand_element<Complex>(rng, 3, -1, 5);
    const auto c = rand_element<Complex>(rng, 3, -1, 5);
    const double scale = std::max(1.0, max_abs_coeff((a * b) * c));
    CHECK(max_abs_diff((a * b) * c, a * (b * c)) <= 1e-12 * scale);
  }
}

TEST_CASE("odd elements anticommute, even elements commute, odd squares vanish") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto o1 = rand_element<GaussRational>(rng, 3, 1, 4);
    const auto o2 = rand_element<GaussRational>(rng, 3, 1, 4);
    const auto e = rand_element<GaussRational>(rng, 3, 0, 4);
    const auto x = rand_element<GaussRational>(rng, 3, -1, 4);
    CHECK(o1 * o2 == -(o2 * o1));
    CHECK(e * x == x * e);
    CHECK((o1 * o1).is_zero());
  }
}

TEST_CASE("pool mismatch and scalar promotion") {
  const auto a = Grassmann::zeta(2, 0);
  const auto b = Grassmann::zeta(3, 0);
  CHECK_THROWS_AS(a * b, PoolMismatchError);
  CHECK_THROWS_AS(a + b, PoolMismatchError);
  const Grassmann two(0, 2.0);
  CHECK((two * a).pairs() == 2);
  CHECK((two * a).coefficient(1) == Complex(2.0));
}

TEST_CASE("conjugation conventions") {
  const int G = 2;
  const auto z = Grassmann::zeta(G, 0);
  const auto zs = Grassmann::zeta_star(G, 0);
  CHECK(conjugate(conjugate(z)) == -z);
  CHECK(conjugate(conjugate(z, Conjugation::OrderReversal), Conjugation::OrderReversal) == z);
  const auto mod = zs * z;
  CHECK(conjugate(mod) == mod);
  CHECK(conjugate(mod, Conjugation::OrderReversal) == mod);
  CHECK(conjugate(Grassmann(G, Complex(1, 2))) == Grassmann(G, Complex(1, -2)));

  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = rand_element<GaussRational>(rng, 3, -1, 6);
    const auto y = rand_element<GaussRational>(rng, 3, -1, 6);
    // Double conjugation: odd part flips under MinusSign, identity under OrderReversal.
    ExactGrassmann expected(3);
    for (const auto& t : x.terms()) {
      auto c = std::popcount(t.mask) % 2 ? GaussRational(-t.coeff) : t.coeff;
      expected += ExactGrassmann::from_terms(3, {{t.mask, c}});
    }
    CHECK(conjugate(conjugate(x)) == expected);
    CHECK(conjugate(conjugate(x, Conjugation::OrderReversal), Conjugation::OrderReversal) == x);
    // (ab)* = a* b* for MinusSign and (ab)* = b* a* for OrderReversal.
    CHECK(conjugate(x * y) == conjugate(x) * conjugate(y));
    CHECK(conjugate(x * y, Conjugation::OrderReversal) ==
          conjugate(y, Conjugation::OrderReversal) * conjugate(x, Conjugation::OrderReversal));
  }
}

TEST_CASE("even series functions") {
  const int G = 2;
  const Complex a(0.7, -0.3);
  const auto mod = Grassmann::zeta_star(G, 0) * Grassmann::zeta(G, 0);
  CHECK(max_abs_diff(gexp(a * mod), Grassmann(G, 1.0) + a * mod) == 0.0);
  CHECK(gexp(Grassmann(G)) == Grassmann(G, 1.0));
  CHECK(max_abs_diff(ginverse(Grassmann(G, 1.0) - a * mod), Grassmann(G, 1.0) + a * mod) < 1e-15);
  CHECK_THROWS_AS(glog(Grassmann(G) + mod), DomainError);
  CHECK_THROWS_AS(gexp(Grassmann::zeta(G, 0)), ParityError);

  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto e = rand_element<Complex>(rng, 3, 0, 6);
    const auto prod = gexp(e) * gexp(-e);
    CHECK(max_abs_diff(prod, Grassmann(3, 1.0)) < 1e-12);
    const auto l = glog(gexp(e));
    // log(exp(e)) recovers e up to the branch of the body.
    CHECK(max_abs_diff(l.soul(), e.soul()) < 1e-11);
    CHECK(max_abs_diff(gpow(gexp(e), 2.0), gexp(e) * gexp(e)) < 1e-11 * max_abs_coeff(gexp(e) * gexp(e)));
  }
}

TEST_CASE("apply_even_series with explicit derivatives") {
  const int G = 2;
  // f = 1/(1-x) around body 0: f^(n)(0) = n!
  const auto n = Grassmann::zeta_star(G, 0) * Grassmann::zeta(G, 0) + Grassmann::zeta_star(G, 1) * Grassmann::zeta(G, 1);
  std::vector<Complex> d = {1.0, 1.0, 2.0};
  const auto r = apply_even_series<Complex>(d, n);
  CHECK(max_abs_diff(r, Grassmann(G, 1.0) + n + n * n) == 0.0);
  std::vector<Complex> short_d = {1.0, 1.0};
  CHECK_THROWS_AS(apply_even_series<Complex>(short_d, n), DomainError);
}

TEST_CASE("exact series") {
  const int G = 2;
  const auto mod = ExactGrassmann::zeta_star(G, 0) * ExactGrassmann::zeta(G, 0);
  const GaussRational a(Rational(3, 7), Rational(-1, 2));
  CHECK(gexp(a * mod) == ExactGrassmann(G, 1) + a * mod);
  CHECK(ginverse(ExactGrassmann(G, 1) - a * mod) == ExactGrassmann(G, 1) + a * mod);
  CHECK_THROWS_AS(gexp(ExactGrassmann(G, 1) + mod), DomainError);
}

TEST_CASE("Berezin integration") {
  const int G = 1;
  const Complex norm = default_berezin_norm();
  const auto z = Grassmann::zeta(G, 0);
  const auto zs = Grassmann::zeta_star(G, 0);
  CHECK(berezin_integrate(Grassmann(G, 1.0), {0}, norm).is_zero());
  CHECK(std::abs(berezin_integrate(z, {0}, norm).body() - 1.0 / std::sqrt(2 * kPi)) < 1e-16);
  const Complex a(1.3, 0.4);
  // Differentials written as  dzeta dzeta^*  after the integrand.
  const auto r = berezin_integrate(gexp(a * zs * z), {zeta_id(0), zeta_star_id(0)}, norm);
  CHECK(std::abs(r.body() - a / (2 * kPi)) < 1e-15);
  const auto rev = berezin_integrate(gexp(a * zs * z), {zeta_star_id(0), zeta_id(0)}, norm);
  CHECK(std::abs(rev.body() + a / (2 * kPi)) < 1e-15);
  CHECK_THROWS_AS(berezin_integrate(z, {0, 0}, norm), DomainError);
}

TEST_CASE("Berezin-exp identity over random couplings") {
  std::mt19937_64 rng(16);
  const Complex norm = default_berezin_norm();
  const auto mod = Grassmann::zeta_star(1, 0) * Grassmann::zeta(1, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Complex a = testgen::rand_complex(rng, 3.0);
    const auto r = berezin_integrate(gexp(a * mod), {0, 1}, norm);
    worst = std::max(worst, std::abs(r.body() - a / (2 * kPi)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Gaussian Berezin integral gives a determinant") {
  // int exp(-zeta^dag M zeta) d[zeta] = det(-M) / (2 pi)^k with pairwise dzeta dzeta^* differentials.
  const int k = 2;
  const Complex m[2][2] = {{Complex(1.2, 0.1), Complex(0.3, -0.5)}, {Complex(-0.4, 0.2), Complex(0.9, 0.7)}};
  Grassmann action(k);
  for (int p = 0; p < k; ++p) {
    for (int q = 0; q < k; ++q) {
      action += m[p][q] * Grassmann::monomial(k, {zeta_star_id(p), zeta_id(q)});
    }
  }
  const std::vector<int> order = {zeta_id(0), zeta_star_id(0), zeta_id(1), zeta_star_id(1)};
  const auto r = berezin_integrate<Complex>(gexp(-action), order, default_berezin_norm());
  const Complex det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  CHECK(std::abs(r.body() - std::pow(-1.0, k) * det / std::pow(2 * kPi, k)) < 1e-14);
}

TEST_CASE("superdelta expansion") {
  const int k = 2;
  const auto bl = bilinear_norm<Complex>(k, k);
  std::vector<Complex> const_f = {1.0, 0.0, 0.0};
  CHECK(superdelta_expand<Complex>(const_f, bl, k) == Grassmann(k, 1.0));
  // bilinear^kappa vanishes beyond kappa = k
  CHECK((bl * bl * bl).is_zero());
  CHECK(!(bl * bl).is_zero());
  std::vector<Complex> g = {2.0, 3.0, 5.0};
  const auto r = superdelta_expand<Complex>(g, bl, k);
  CHECK(max_abs_diff(r, Grassmann(k, 2.0) - 3.0 * bl + 2.5 * (bl * bl)) < 1e-15);
  std::vector<Complex> too_short = {1.0, 0.0};
  CHECK_THROWS_AS(superdelta_expand<Complex>(too_short, bl, k), DomainError);
}

TEST_CASE("left derivative") {
  const int G = 2;
  const auto x = Grassmann::monomial(G, {0, 1, 2});
  CHECK(left_derivative(x, 0) == Grassmann::monomial(G, {1, 2}));
  CHECK(left_derivative(x, 1) == -Grassmann::monomial(G, {0, 2}));
  CHECK(left_derivative(x, 3).is_zero());
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = rand_element<Complex>(rng, 3, -1, 5);
    CHECK(from_text<Complex>(to_text(x)) == x);
    const auto y = rand_element<GaussRational>(rng, 3, -1, 5);
    CHECK(from_text<GaussRational>(to_text(y)) == y);
  }
  CHECK(from_text<Complex>("G=2: 0").is_zero());
  CHECK(from_text<Complex>("G=2: (1,0) * zs(1) z(0)") == -Grassmann::monomial(2, {0, 3}));
  CHECK_THROWS_AS(from_text<Complex>("nonsense"), DomainError);
}

TEST_CASE("prune threshold") {
  auto x = Grassmann(1, 1.0) + Complex(1e-14) * Grassmann::zeta(1, 0);
  CHECK(x.terms().size() == 2);
  CHECK(x.pruned(1e-12).terms().size() == 1);
}
