#pragma once

// Ordinary <-> superspace duality K = A L A^dag, B = L^1/2 A^dag A L^1/2.
//
// Column layout of A per source p (fermion columns follow all boson columns):
//   beta=2: boson z_p,           fermion zeta_p                (N x 2k)
//   beta=1: boson z_p, z_p^*,    fermion zeta_p, zeta_p^*      (N x 4k)
//   beta=4: boson (z_p1; z_p2), (-z_p2^*; z_p1^*),
//           fermion (zeta_p; zeta_p), (-zeta_p^*; zeta_p^*)    (2N x 4k)
// The beta=4 columns are quaternion pairs [[a, -b^*], [b, a^*]]; the fermion
// pair uses a = b = zeta_p as written in the source layout, the boson pair keeps
// a and b independent.
//
// Two adjoints are offered. Plain is the block super-adjoint; because the rows of
// A are ordinary it is the entrywise conjugate transpose, and it makes B
// Hermitean for L = 1. Physics additionally negates the fermion rows of A^dag;
// this reproduces K = sum L z z^dag - zeta zeta^dag and the sign pattern of the
// explicit scalar-product form of B. Both satisfy tr K^m = str B^m.

#include "susy/superlinalg.hpp"

#include <random>
#include <string>
#include <vector>

namespace susy {

enum class AdjointLayout { Plain, Physics };

template <class C>
struct BasicVectorBundle {
  int beta = 2;
  int N = 1;
  int k = 1;
  // z[p] has N entries (beta 1, 2) or 2N entries z_p1 then z_p2 (beta 4).
  std::vector<std::vector<C>> z;
  // L_p = +-1 per source; fermion slots are always +1.
  std::vector<int> L;

  int pairs() const { return N * k; }
  // zeta_p component i is generator pair p*N + i.
  int zeta_pair(int p, int i) const { return p * N + i; }
  int rows() const { return beta == 4 ? 2 * N : N; }
  int boson_cols() const { return beta == 2 ? k : 2 * k; }
  int fermion_cols() const { return beta == 2 ? k : 2 * k; }

  void validate() const {
    if (beta != 1 && beta != 2 && beta != 4) throw DomainError("beta must be 1, 2 or 4");
    if (N < 1 || k < 1) throw DimensionError("bundle needs N >= 1 and k >= 1");
    if (2 * N * k > 2 * BasicGrassmann<C>::kMaxPairs) throw ResourceError("bundle exceeds generator pool limit");
    if (static_cast<int>(z.size()) != k) throw DimensionError("bundle needs one z vector per source");
    for (const auto& v : z) {
      if (static_cast<int>(v.size()) != (beta == 4 ? 2 * N : N)) throw DimensionError("z vector has wrong length");
    }
    if (static_cast<int>(L.size()) != k) throw DimensionError("metric needs one entry per source");
    for (int l : L) {
      if (l != 1 && l != -1) throw DomainError("metric entries must be +1 or -1");
    }
  }
};

using VectorBundle = BasicVectorBundle<Complex>;
using ExactVectorBundle = BasicVectorBundle<GaussRational>;

// Seeded bundle with small Gaussian-integer z entries, so exact and float modes see
// the same numbers.
template <class C>
BasicVectorBundle<C> random_bundle(int beta, int N, int k, std::uint64_t seed, std::vector<int> L = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-3, 3);
  BasicVectorBundle<C> b;
  b.beta = beta;
  b.N = N;
  b.k = k;
  b.L = L.empty() ? std::vector<int>(static_cast<std::size_t>(k), 1) : std::move(L);
  const int len = beta == 4 ? 2 * N : N;
  for (int p = 0; p < k; ++p) {
    std::vector<C> v;
    for (int i = 0; i < len; ++i) {
      const int re = d(rng), im = d(rng);
      v.push_back(CoeffTraits<C>::from_int(re) + CoeffTraits<C>::from_int(im) * CoeffTraits<C>::imag_unit());
    }
    b.z.push_back(std::move(v));
  }
  b.validate();
  return b;
}

template <class C>
struct BasicDualPair {
  BasicSuperMatrix<C> A;
  BasicSuperMatrix<C> K;
  BasicSuperMatrix<C> B;
};

template <class C>
BasicSuperMatrix<C> build_A(const BasicVectorBundle<C>& bundle) {
  using G = BasicGrassmann<C>;
  using T = CoeffTraits<C>;
  bundle.validate();
  const int N = bundle.N, k = bundle.k, pairs = bundle.pairs();
  const int kb = bundle.boson_cols(), kf = bundle.fermion_cols();
  BasicSuperMatrix<C> A(pairs, bundle.rows(), 0, kb, kf);
  auto scalar = [&](const C& c) { return G(pairs, c); };
  auto zeta = [&](int p, int i) { return G::zeta(pairs, bundle.zeta_pair(p, i)); };
  auto zeta_star = [&](int p, int i) { return G::zeta_star(pairs, bundle.zeta_pair(p, i)); };
  for (int p = 0; p < k; ++p) {
    const auto& z = bundle.z[p];
    switch (bundle.beta) {
      case 2:
        for (int i = 0; i < N; ++i) {
          A.set(i, p, scalar(z[i]));
          A.set(i, kb + p, zeta(p, i));
        }
        break;
      case 1:
        for (int i = 0; i < N; ++i) {
          A.set(i, 2 * p, scalar(z[i]));
          A.set(i, 2 * p + 1, scalar(T::conj(z[i])));
          A.set(i, kb + 2 * p, zeta(p, i));
          A.set(i, kb + 2 * p + 1, zeta_star(p, i));
        }
        break;
      case 4:
        for (int i = 0; i < N; ++i) {
          const C& a = z[i];
          const C& b = z[N + i];
          A.set(i, 2 * p, scalar(a));
          A.set(N + i, 2 * p, scalar(b));
          A.set(i, 2 * p + 1, scalar(C(-T::conj(b))));
          A.set(N + i, 2 * p + 1, scalar(T::conj(a)));
          A.set(i, kb + 2 * p, zeta(p, i));
          A.set(N + i, kb + 2 * p, zeta(p, i));
          A.set(i, kb + 2 * p + 1, -zeta_star(p, i));
          A.set(N + i, kb + 2 * p + 1, zeta_star(p, i));
        }
        break;
    }
  }
  return A;
}

// Metric over the columns of A (boson columns inherit L_p, fermion columns +1).
template <class C>
std::vector<int> column_metric(const BasicVectorBundle<C>& bundle) {
  std::vector<int> m;
  const int per = bundle.beta == 2 ? 1 : 2;
  for (int p = 0; p < bundle.k; ++p) {
    for (int r = 0; r < per; ++r) m.push_back(bundle.L[p]);
  }
  for (int c = 0; c < bundle.fermion_cols(); ++c) m.push_back(1);
  return m;
}

// L^{1/2} on the principal branch: 1 or i.
template <class C>
BasicSuperMatrix<C> metric_sqrt(const BasicVectorBundle<C>& bundle) {
  const auto m = column_metric(bundle);
  auto s = BasicSuperMatrix<C>::zero(bundle.pairs(), bundle.boson_cols(), bundle.fermion_cols());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const C v = m[i] > 0 ? CoeffTraits<C>::from_int(1) : CoeffTraits<C>::imag_unit();
    s.set(static_cast<int>(i), static_cast<int>(i), BasicGrassmann<C>(bundle.pairs(), v));
  }
  return s;
}

template <class C>
BasicSuperMatrix<C> adjoint_of_A(const BasicSuperMatrix<C>& A, AdjointLayout layout) {
  BasicSuperMatrix<C> ad = dagger(A);
  if (layout == AdjointLayout::Physics) {
    for (int i = ad.r0(); i < ad.rows(); ++i) {
      for (int j = 0; j < ad.cols(); ++j) ad.set(i, j, -ad(i, j));
    }
  }
  return ad;
}

template <class C>
BasicDualPair<C> build_dual_pair(const BasicVectorBundle<C>& bundle, AdjointLayout layout = AdjointLayout::Plain) {
  BasicDualPair<C> out;
  out.A = build_A(bundle);
  const auto root = metric_sqrt(bundle);
  const auto left = out.A * root;                           // A L^1/2
  const auto right = root * adjoint_of_A(out.A, layout);    // L^1/2 A^dag
  out.K = left * right;
  out.B = right * left;
  return out;
}

// K assembled directly from dyads, without A:
//   beta=2: sum_p L_p z_p z_p^dag + s zeta_p zeta_p^dag
//   beta=1: sum_p L_p (w1 w1^T + w2 w2^T) + s zeta_p zeta_p^dag + s zeta_p^* (zeta_p^*)^dag
//           with w1 = sqrt2 Re z_p, w2 = sqrt2 Im z_p, so w w^T terms are 2 Re(z) Re(z)^T etc.
//   beta=4: sum over the two quaternion columns of each source.
// s = +1 for the plain adjoint and -1 for the physics layout.
template <class C>
BasicSuperMatrix<C> direct_K(const BasicVectorBundle<C>& bundle, AdjointLayout layout) {
  using G = BasicGrassmann<C>;
  using T = CoeffTraits<C>;
  bundle.validate();
  const int n = bundle.rows(), pairs = bundle.pairs(), N = bundle.N;
  BasicSuperMatrix<C> K(pairs, n, 0, n, 0);
  std::vector<G> acc(static_cast<std::size_t>(n * n), G(pairs));
  const C s = T::from_int(layout == AdjointLayout::Plain ? 1 : -1);
  const C two = T::from_int(2);
  auto add_dyad = [&](const std::vector<G>& u, const std::vector<G>& v_dag, const C& w) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) acc[i * n + j] += w * (u[i] * v_dag[j]);
    }
  };
  auto conj_all = [&](const std::vector<G>& u) {
    std::vector<G> r;
    for (const auto& x : u) r.push_back(conjugate(x));
    return r;
  };
  for (int p = 0; p < bundle.k; ++p) {
    const C lp = T::from_int(bundle.L[p]);
    const auto& z = bundle.z[p];
    std::vector<G> zeta, zeta_s;
    for (int i = 0; i < N; ++i) {
      zeta.push_back(G::zeta(pairs, bundle.zeta_pair(p, i)));
      zeta_s.push_back(G::zeta_star(pairs, bundle.zeta_pair(p, i)));
    }
    if (bundle.beta == 2) {
      std::vector<G> zg, zc;
      for (int i = 0; i < N; ++i) {
        zg.push_back(G(pairs, z[i]));
        zc.push_back(G(pairs, T::conj(z[i])));
      }
      add_dyad(zg, zc, lp);
      add_dyad(zeta, conj_all(zeta), s);
    } else if (bundle.beta == 1) {
      std::vector<G> x, y;
      for (int i = 0; i < N; ++i) {
        const C re = (z[i] + T::conj(z[i])) / two;
        const C im = (z[i] - T::conj(z[i])) / (two * T::imag_unit());
        x.push_back(G(pairs, re));
        y.push_back(G(pairs, im));
      }
      add_dyad(x, x, C(two * lp));
      add_dyad(y, y, C(two * lp));
      add_dyad(zeta, conj_all(zeta), s);
      add_dyad(zeta_s, conj_all(zeta_s), s);
    } else {
      std::vector<G> c1, c2, f1, f2;
      for (int i = 0; i < N; ++i) c1.push_back(G(pairs, z[i]));
      for (int i = 0; i < N; ++i) c1.push_back(G(pairs, z[N + i]));
      for (int i = 0; i < N; ++i) c2.push_back(G(pairs, C(-T::conj(z[N + i]))));
      for (int i = 0; i < N; ++i) c2.push_back(G(pairs, T::conj(z[i])));
      for (int r = 0; r < 2; ++r) {
        for (int i = 0; i < N; ++i) f1.push_back(zeta[i]);
      }
      for (int i = 0; i < N; ++i) f2.push_back(-zeta_s[i]);
      for (int i = 0; i < N; ++i) f2.push_back(zeta_s[i]);
      add_dyad(c1, conj_all(c1), lp);
      add_dyad(c2, conj_all(c2), lp);
      add_dyad(f1, conj_all(f1), s);
      add_dyad(f2, conj_all(f2), s);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) K.set(i, j, acc[i * n + j]);
  }
  return K;
}

// str(X Y) for square supermatrices without forming the product.
template <class C>
BasicGrassmann<C> str_of_product(const BasicSuperMatrix<C>& X, const BasicSuperMatrix<C>& Y) {
  BasicGrassmann<C> s(X.pairs());
  for (int a = 0; a < X.rows(); ++a) {
    BasicGrassmann<C> row(X.pairs());
    for (int b = 0; b < X.cols(); ++b) {
      if (X(a, b).is_zero() || Y(b, a).is_zero()) continue;
      row += X(a, b) * Y(b, a);
    }
    s = X.row_odd(a) ? s - row : s + row;
  }
  return s;
}

// str M^m for m = 1..mmax via M^2 and two-factor traces.
template <class C>
std::vector<BasicGrassmann<C>> str_powers(const BasicSuperMatrix<C>& M, int mmax) {
  std::vector<BasicGrassmann<C>> out;
  if (mmax < 1) return out;
  out.push_back(supertrace(M));
  if (mmax < 2) return out;
  const auto M2 = M * M;
  out.push_back(supertrace(M2));
  BasicSuperMatrix<C> prev = M2;  // M^{m-2} ... built incrementally for m > 4
  for (int m = 3; m <= mmax; ++m) {
    if (m == 3) {
      out.push_back(str_of_product(M2, M));
    } else if (m == 4) {
      out.push_back(str_of_product(M2, M2));
    } else {
      prev = prev * M;  // M^{m-2}
      out.push_back(str_of_product(prev, M2));
    }
  }
  return out;
}

struct TraceDualityReport {
  int beta = 2, N = 1, k = 1, mmax = 0;
  std::vector<double> max_deviation;  // per m
  bool exact_equal = true;
  bool pass = true;
};

template <class C>
TraceDualityReport verify_trace_duality(const BasicVectorBundle<C>& bundle, int mmax,
                                        AdjointLayout layout = AdjointLayout::Plain, double tol = 0.0) {
  const auto pair = build_dual_pair(bundle, layout);
  const auto K = direct_K(bundle, layout);
  const auto lhs = str_powers(K, mmax);
  const auto rhs = str_powers(pair.B, mmax);
  TraceDualityReport rep;
  rep.beta = bundle.beta;
  rep.N = bundle.N;
  rep.k = bundle.k;
  rep.mmax = mmax;
  for (int m = 0; m < mmax; ++m) {
    rep.max_deviation.push_back(max_abs_diff(lhs[m], rhs[m]));
    if (!(lhs[m] == rhs[m])) rep.exact_equal = false;
  }
  if constexpr (CoeffTraits<C>::exact) {
    rep.pass = rep.exact_equal;
  } else {
    rep.pass = true;
    for (int m = 0; m < mmax; ++m) {
      const double scale = std::max(1.0, max_abs_coeff(lhs[m]));
      if (rep.max_deviation[m] > tol * scale) rep.pass = false;
    }
  }
  return rep;
}

struct HermiticityReport {
  bool K_hermitean = true;
  bool B_hermitean = true;
  double K_residual = 0.0;
  double B_residual = 0.0;
  // First violating entry of B (row, col), -1 when none.
  int B_row = -1, B_col = -1;
};

template <class C>
HermiticityReport hermiticity_check(const BasicDualPair<C>& pair) {
  HermiticityReport r;
  const auto kd = dagger(pair.K);
  const auto bd = dagger(pair.B);
  r.K_residual = kd.max_abs_diff(pair.K);
  r.B_residual = bd.max_abs_diff(pair.B);
  r.K_hermitean = kd == pair.K;
  r.B_hermitean = bd == pair.B;
  for (int i = 0; i < pair.B.rows() && r.B_row < 0; ++i) {
    for (int j = 0; j < pair.B.cols(); ++j) {
      if (!(bd(i, j) == pair.B(i, j))) {
        r.B_row = i;
        r.B_col = j;
        break;
      }
    }
  }
  return r;
}

// exp(-tr K^2 / 2 beta) from the Gaussian characteristic function of the ensemble,
// i.e. exp(-Var(tr H K)/2) with the entry variances of P(H) ~ exp(-beta tr H^2 / 2).
// Returns the exponent -Var/2 (exactly), so callers can compare exponents and
// exp(soul) separately in exact arithmetic.
template <class C>
BasicGrassmann<C> characteristic_exponent(const BasicSuperMatrix<C>& K, int beta) {
  using G = BasicGrassmann<C>;
  using T = CoeffTraits<C>;
  const int n = K.rows(), pairs = K.pairs();
  G var(pairs);
  const C half = T::from_ratio(1, 2), quarter = T::from_ratio(1, 4);
  if (beta == 1) {
    // real symmetric: Var H_ii = 1, Var H_ij = 1/2; tr HK = sum H_ii K_ii + sum_{i<j} H_ij (K_ij + K_ji)
    for (int i = 0; i < n; ++i) {
      var += K(i, i) * K(i, i);
      for (int j = i + 1; j < n; ++j) {
        const G t = K(i, j) + K(j, i);
        var += half * (t * t);
      }
    }
  } else if (beta == 2) {
    // Hermitean: Var H_ii = 1/2, Re/Im of H_ij have variance 1/4 each.
    for (int i = 0; i < n; ++i) {
      var += half * (K(i, i) * K(i, i));
      for (int j = i + 1; j < n; ++j) {
        const G re = K(i, j) + K(j, i);
        const G im = T::imag_unit() * (K(j, i) - K(i, j));
        var += quarter * (re * re + im * im);
      }
    }
  } else {
    throw DomainError("characteristic_exponent supports beta 1 and 2");
  }
  return C(-half) * var;
}

struct KeystoneReport {
  int beta = 2, N = 1, k = 1;
  bool exponent_equal = false;  // -Var/2 == -str B^2 / 2beta, exactly
  bool series_equal = false;    // exp(soul) parts agree coefficient by coefficient
  double max_deviation = 0.0;
  bool pass = false;
};

template <class C>
KeystoneReport verify_keystone(const BasicVectorBundle<C>& bundle, AdjointLayout layout = AdjointLayout::Physics,
                               double tol = 1e-12) {
  using T = CoeffTraits<C>;
  const auto pair = build_dual_pair(bundle, layout);
  const auto K = direct_K(bundle, layout);
  const auto lhs = characteristic_exponent(K, bundle.beta);
  const auto rhs = C(T::from_int(-1) / T::from_int(2 * bundle.beta)) * supertrace(pair.B * pair.B);
  KeystoneReport r;
  r.beta = bundle.beta;
  r.N = bundle.N;
  r.k = bundle.k;
  const auto el = gexp_soul(lhs), er = gexp_soul(rhs);
  r.max_deviation = std::max(max_abs_diff(lhs, rhs), max_abs_diff(el, er));
  if constexpr (T::exact) {
    r.exponent_equal = lhs == rhs;
    r.series_equal = el == er;
  } else {
    r.exponent_equal = max_abs_diff(lhs, rhs) <= tol * std::max(1.0, max_abs_coeff(lhs));
    r.series_equal = max_abs_diff(el, er) <= tol * std::max(1.0, max_abs_coeff(el));
  }
  r.pass = r.exponent_equal && r.series_equal;
  return r;
}

}  // namespace susy
