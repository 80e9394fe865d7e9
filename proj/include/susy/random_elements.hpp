#pragma once

// Seeded random Grassmann elements and supermatrices for property tests.

#include "susy/superlinalg.hpp"

#include <random>

namespace testgen {

using namespace susy;

inline Complex rand_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng)};
}

// Small integer/denominator-4 rationals keep exact arithmetic cheap.
inline GaussRational rand_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-6, 6);
  return GaussRational(Rational(d(rng), 4), Rational(d(rng), 4));
}

template <class C>
C rand_coeff(std::mt19937_64& rng) {
  if constexpr (CoeffTraits<C>::exact) {
    return rand_rational(rng);
  } else {
    return rand_complex(rng);
  }
}

// parity: 0 even only, 1 odd only, -1 mixed.
template <class C>
BasicGrassmann<C> rand_element(std::mt19937_64& rng, int pairs, int parity, int nterms, bool with_body = true) {
  std::vector<typename BasicGrassmann<C>::Term> terms;
  std::uniform_int_distribution<std::uint64_t> mask_dist(0, BasicGrassmann<C>::pool_mask(pairs));
  for (int t = 0; t < nterms; ++t) {
    auto m = mask_dist(rng);
    const int deg = std::popcount(m);
    if (parity >= 0 && deg % 2 != parity) m ^= 1;  // flip generator 0 to fix parity
    if (!with_body && m == 0) continue;
    terms.push_back({m, rand_coeff<C>(rng)});
  }
  if (with_body && parity != 1) terms.push_back({0, rand_coeff<C>(rng)});
  return BasicGrassmann<C>::from_terms(pairs, std::move(terms));
}

template <class C>
BasicSuperMatrix<C> rand_supermatrix(std::mt19937_64& rng, int pairs, int k1, int k2, int nterms = 3,
                                     double diag_boost = 0.0) {
  auto m = BasicSuperMatrix<C>::zero(pairs, k1, k2);
  for (int i = 0; i < k1 + k2; ++i) {
    for (int j = 0; j < k1 + k2; ++j) {
      const bool odd = (i < k1) != (j < k1);
      auto v = rand_element<C>(rng, pairs, odd ? 1 : 0, nterms, !odd);
      if (i == j && diag_boost != 0.0) v = v + CoeffTraits<C>::from_int(static_cast<long long>(diag_boost));
      m.set(i, j, v);
    }
  }
  return m;
}

}  // namespace testgen
