#pragma once

// Exact algebra of complex Grassmann variables.
//
// A pool of G generator pairs holds 2G anticommuting generators. Generator id
// 2p is zeta_p and id 2p+1 is its conjugate zeta_p^*. An element is a sparse
// sum of monomials; each monomial is a bitmask of generator ids and is read as
// the ordered product of its generators in ascending id order.
//
// Berezin integration order: the list passed to berezin_integrate names the
// differentials in the order they are written after the integrand,
//   int f dzeta_a dzeta_b ...
// so the differential adjacent to the integrand (the first one listed) is
// integrated first. For f = 1 + a zeta^* zeta and order {zeta, zeta^*} this
// gives +a/(2 pi); reversing the order flips the sign.

#include "susy/errors.hpp"
#include "susy/scalar.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace susy {

enum class Conjugation { MinusSign, OrderReversal };

inline constexpr int zeta_id(int p) { return 2 * p; }
inline constexpr int zeta_star_id(int p) { return 2 * p + 1; }

// Parity of the permutation that sorts `ids` ascending. Returns 0 when ids repeat.
inline int sort_sign(std::vector<int>& ids) {
  int sign = 1;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    for (std::size_t j = i; j > 0 && ids[j - 1] >= ids[j]; --j) {
      if (ids[j - 1] == ids[j]) return 0;
      std::swap(ids[j - 1], ids[j]);
      sign = -sign;
    }
  }
  return sign;
}

template <class C>
class BasicGrassmann {
 public:
  using Coeff = C;
  using Mask = std::uint64_t;
  using Traits = CoeffTraits<C>;
  static constexpr int kMaxPairs = 32;

  struct Term {
    Mask mask;
    C coeff;
  };

  BasicGrassmann() = default;

  explicit BasicGrassmann(int pairs) : pairs_(check_pairs(pairs)) {}

  BasicGrassmann(int pairs, C scalar) : pairs_(check_pairs(pairs)) {
    if (!Traits::is_zero(scalar)) terms_.push_back({0, std::move(scalar)});
  }

  static BasicGrassmann generator(int pairs, int id, C c = Traits::from_int(1)) {
    BasicGrassmann g(pairs);
    if (id < 0 || id >= 2 * pairs) throw DomainError("generator id outside pool");
    if (!Traits::is_zero(c)) g.terms_.push_back({Mask(1) << id, std::move(c)});
    return g;
  }
  static BasicGrassmann zeta(int pairs, int p) { return generator(pairs, zeta_id(p)); }
  static BasicGrassmann zeta_star(int pairs, int p) { return generator(pairs, zeta_star_id(p)); }

  // Ordered product of the listed generators (any order, repeats give zero).
  static BasicGrassmann monomial(int pairs, std::vector<int> ids, C c = Traits::from_int(1)) {
    BasicGrassmann g(pairs);
    Mask m = 0;
    for (int id : ids) {
      if (id < 0 || id >= 2 * pairs) throw DomainError("generator id outside pool");
    }
    const int s = sort_sign(ids);
    if (s == 0 || Traits::is_zero(c)) return g;
    for (int id : ids) m |= Mask(1) << id;
    g.terms_.push_back({m, s > 0 ? std::move(c) : C(-c)});
    return g;
  }

  // Builds an element from arbitrary (mask, coeff) pairs; duplicates are summed.
  static BasicGrassmann from_terms(int pairs, std::vector<Term> terms) {
    BasicGrassmann g(pairs);
    const Mask limit = pool_mask(pairs);
    for (const auto& t : terms) {
      if ((t.mask & ~limit) != 0) throw DomainError("monomial outside pool");
    }
    g.terms_ = std::move(terms);
    g.canonicalize();
    return g;
  }

  int pairs() const { return pairs_; }
  int generator_count() const { return 2 * pairs_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  C body() const {
    if (!terms_.empty() && terms_.front().mask == 0) return terms_.front().coeff;
    return C{};
  }

  BasicGrassmann soul() const {
    BasicGrassmann s(pairs_);
    for (const auto& t : terms_) {
      if (t.mask != 0) s.terms_.push_back(t);
    }
    return s;
  }

  bool is_scalar() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mask == 0); }

  bool is_even() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return std::popcount(t.mask) % 2 == 0; });
  }
  bool is_odd() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return std::popcount(t.mask) % 2 == 1; });
  }

  int max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, std::popcount(t.mask));
    return d;
  }

  C coefficient(Mask m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Mask v) { return t.mask < v; });
    if (it != terms_.end() && it->mask == m) return it->coeff;
    return C{};
  }

  // Drops terms with |coeff| <= tol.
  BasicGrassmann pruned(double tol) const {
    BasicGrassmann r(pairs_);
    for (const auto& t : terms_) {
      if (Traits::magnitude(t.coeff) > tol) r.terms_.push_back(t);
    }
    return r;
  }

  // Same element viewed in a larger pool.
  BasicGrassmann in_pool(int pairs) const {
    if (pairs < pairs_) {
      const Mask limit = pool_mask(pairs);
      for (const auto& t : terms_) {
        if ((t.mask & ~limit) != 0) throw PoolMismatchError("element does not fit in smaller pool");
      }
    }
    BasicGrassmann r = *this;
    r.pairs_ = check_pairs(pairs);
    return r;
  }

  BasicGrassmann& operator+=(const BasicGrassmann& o) { return *this = *this + o; }
  BasicGrassmann& operator-=(const BasicGrassmann& o) { return *this = *this - o; }
  BasicGrassmann& operator*=(const BasicGrassmann& o) { return *this = *this * o; }
  BasicGrassmann& operator*=(const C& c) {
    if (Traits::is_zero(c)) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.coeff *= c;
    return *this;
  }

  friend BasicGrassmann operator+(const BasicGrassmann& a, const BasicGrassmann& b) {
    return merge(a, b, false);
  }
  friend BasicGrassmann operator-(const BasicGrassmann& a, const BasicGrassmann& b) {
    return merge(a, b, true);
  }
  friend BasicGrassmann operator-(BasicGrassmann a) {
    for (auto& t : a.terms_) t.coeff = -t.coeff;
    return a;
  }
  friend BasicGrassmann operator*(BasicGrassmann a, const C& c) { return a *= c; }
  friend BasicGrassmann operator*(const C& c, BasicGrassmann a) { return a *= c; }
  friend BasicGrassmann operator+(const BasicGrassmann& a, const C& c) {
    return a + BasicGrassmann(a.pairs_, c);
  }
  friend BasicGrassmann operator-(const BasicGrassmann& a, const C& c) {
    return a - BasicGrassmann(a.pairs_, c);
  }

  friend BasicGrassmann operator*(const BasicGrassmann& a, const BasicGrassmann& b) {
    const int pairs = common_pool(a, b);
    BasicGrassmann r(pairs);
    if (a.terms_.empty() || b.terms_.empty()) return r;
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_) {
      for (const auto& tb : b.terms_) {
        if ((ta.mask & tb.mask) != 0) continue;
        C c = ta.coeff * tb.coeff;
        if (product_sign(ta.mask, tb.mask) < 0) c = -c;
        r.terms_.push_back({ta.mask | tb.mask, std::move(c)});
      }
    }
    r.canonicalize();
    return r;
  }

  friend bool operator==(const BasicGrassmann& a, const BasicGrassmann& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].mask != b.terms_[i].mask || !(a.terms_[i].coeff == b.terms_[i].coeff)) {
        return false;
      }
    }
    return true;
  }
  friend bool operator!=(const BasicGrassmann& a, const BasicGrassmann& b) { return !(a == b); }

  // Sign picked up when monomial b is appended to monomial a (both canonical).
  static int product_sign(Mask a, Mask b) {
    int swaps = 0;
    Mask rest = b;
    while (rest != 0) {
      const int j = std::countr_zero(rest);
      rest &= rest - 1;
      const Mask above = ~((Mask(2) << j) - 1);
      swaps += std::popcount(a & above);
    }
    return (swaps & 1) ? -1 : 1;
  }

  static Mask pool_mask(int pairs) {
    return pairs >= kMaxPairs ? ~Mask(0) : (Mask(1) << (2 * pairs)) - 1;
  }

 private:
  static int check_pairs(int pairs) {
    if (pairs < 0 || pairs > kMaxPairs) throw DomainError("generator pool size out of range");
    return pairs;
  }

  // Pool-0 elements are pure scalars and adapt to the other operand's pool.
  static int common_pool(const BasicGrassmann& a, const BasicGrassmann& b) {
    if (a.pairs_ == b.pairs_) return a.pairs_;
    if (a.pairs_ == 0) return b.pairs_;
    if (b.pairs_ == 0) return a.pairs_;
    throw PoolMismatchError("generator pools differ: " + std::to_string(a.pairs_) + " vs " +
                            std::to_string(b.pairs_));
  }

  static BasicGrassmann merge(const BasicGrassmann& a, const BasicGrassmann& b, bool subtract) {
    BasicGrassmann r(common_pool(a, b));
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].mask < b.terms_[j].mask)) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || b.terms_[j].mask < a.terms_[i].mask) {
        r.terms_.push_back({b.terms_[j].mask, subtract ? C(-b.terms_[j].coeff) : b.terms_[j].coeff});
        ++j;
      } else {
        C c = subtract ? C(a.terms_[i].coeff - b.terms_[j].coeff)
                       : C(a.terms_[i].coeff + b.terms_[j].coeff);
        if (!Traits::is_zero(c)) r.terms_.push_back({a.terms_[i].mask, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  void canonicalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return x.mask < y.mask; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().mask == t.mask) {
        out.back().coeff += t.coeff;
      } else {
        if (!out.empty() && Traits::is_zero(out.back().coeff)) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && Traits::is_zero(out.back().coeff)) out.pop_back();
    terms_ = std::move(out);
  }

  int pairs_ = 0;
  std::vector<Term> terms_;
};

using Grassmann = BasicGrassmann<Complex>;
using ExactGrassmann = BasicGrassmann<GaussRational>;

// Largest coefficient difference; the usual float-mode comparison.
template <class C>
double max_abs_diff(const BasicGrassmann<C>& a, const BasicGrassmann<C>& b) {
  double m = 0.0;
  const BasicGrassmann<C> d = a - b;
  for (const auto& t : d.terms()) m = std::max(m, CoeffTraits<C>::magnitude(t.coeff));
  return m;
}

template <class C>
double max_abs_coeff(const BasicGrassmann<C>& a) {
  double m = 0.0;
  for (const auto& t : a.terms()) m = std::max(m, CoeffTraits<C>::magnitude(t.coeff));
  return m;
}

// Converts an exact element to floating point.
inline Grassmann to_complex(const ExactGrassmann& a) {
  std::vector<Grassmann::Term> terms;
  terms.reserve(a.terms().size());
  for (const auto& t : a.terms()) terms.push_back({t.mask, t.coeff.to_complex()});
  return Grassmann::from_terms(a.pairs(), std::move(terms));
}

template <class C>
BasicGrassmann<C> conjugate(const BasicGrassmann<C>& a, Conjugation conv = Conjugation::MinusSign) {
  using G = BasicGrassmann<C>;
  std::vector<typename G::Term> out;
  out.reserve(a.terms().size());
  std::vector<int> ids;
  for (const auto& t : a.terms()) {
    ids.clear();
    int sign = 1;
    for (typename G::Mask m = t.mask; m != 0; m &= m - 1) {
      const int id = std::countr_zero(m);
      if (id % 2 == 0) {
        ids.push_back(id + 1);
      } else {
        ids.push_back(id - 1);
        if (conv == Conjugation::MinusSign) sign = -sign;
      }
    }
    if (conv == Conjugation::OrderReversal) std::reverse(ids.begin(), ids.end());
    sign *= sort_sign(ids);
    typename G::Mask mask = 0;
    for (int id : ids) mask |= typename G::Mask(1) << id;
    C c = CoeffTraits<C>::conj(t.coeff);
    out.push_back({mask, sign > 0 ? std::move(c) : C(-c)});
  }
  return G::from_terms(a.pairs(), std::move(out));
}

// Berezin integration; see the header comment for the order convention.
template <class C>
BasicGrassmann<C> berezin_integrate(const BasicGrassmann<C>& a, std::span<const int> order, const C& norm) {
  using G = BasicGrassmann<C>;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] < 0 || order[i] >= a.generator_count()) throw DomainError("generator outside pool");
    for (std::size_t j = 0; j < i; ++j) {
      if (order[i] == order[j]) throw DomainError("duplicate generator in integration order");
    }
  }
  G cur = a;
  for (int id : order) {
    const typename G::Mask bit = typename G::Mask(1) << id;
    const typename G::Mask above = ~((typename G::Mask(2) << id) - 1);
    std::vector<typename G::Term> out;
    for (const auto& t : cur.terms()) {
      if ((t.mask & bit) == 0) continue;
      C c = t.coeff * norm;
      if (std::popcount(t.mask & above) % 2 == 1) c = -c;
      out.push_back({t.mask & ~bit, std::move(c)});
    }
    cur = G::from_terms(a.pairs(), std::move(out));
  }
  return cur;
}

template <class C>
BasicGrassmann<C> berezin_integrate(const BasicGrassmann<C>& a, std::initializer_list<int> order,
                                    const C& norm) {
  return berezin_integrate(a, std::span<const int>(order.begin(), order.size()), norm);
}

inline Complex default_berezin_norm() { return Complex(1.0 / std::sqrt(2.0 * std::numbers::pi), 0.0); }

// Left derivative d/d(theta_id): theta is moved to the front before removal.
template <class C>
BasicGrassmann<C> left_derivative(const BasicGrassmann<C>& a, int id) {
  using G = BasicGrassmann<C>;
  const typename G::Mask bit = typename G::Mask(1) << id;
  std::vector<typename G::Term> out;
  for (const auto& t : a.terms()) {
    if ((t.mask & bit) == 0) continue;
    C c = t.coeff;
    if (std::popcount(t.mask & (bit - 1)) % 2 == 1) c = -c;
    out.push_back({t.mask & ~bit, std::move(c)});
  }
  return G::from_terms(a.pairs(), std::move(out));
}

// f(a) for even a = body + soul, given Taylor coefficients f^(n)(body)/n!.
// The sum terminates because soul^n = 0 once 2n exceeds the generator count.
template <class C>
BasicGrassmann<C> apply_taylor(const std::function<C(int)>& taylor, const BasicGrassmann<C>& a) {
  if (!a.is_even()) throw ParityError("series functions need a Grassmann-even argument");
  const BasicGrassmann<C> s = a.soul();
  BasicGrassmann<C> result(a.pairs(), taylor(0));
  BasicGrassmann<C> power(a.pairs(), CoeffTraits<C>::from_int(1));
  for (int n = 1; n <= a.pairs() + 1; ++n) {
    power = power * s;
    if (power.is_zero()) break;
    result += power * taylor(n);
  }
  return result;
}

// Spec-level entry point: derivs[n] = f^(n)(body). Missing derivatives are a domain error.
template <class C>
BasicGrassmann<C> apply_even_series(std::span<const C> derivs, const BasicGrassmann<C>& a) {
  C factorial = CoeffTraits<C>::from_int(1);
  std::vector<C> taylor;
  for (std::size_t n = 0; n < derivs.size(); ++n) {
    if (n > 0) factorial *= CoeffTraits<C>::from_int(static_cast<long long>(n));
    taylor.push_back(derivs[n] / factorial);
  }
  const BasicGrassmann<C> s = a.soul();
  std::size_t needed = 0;
  BasicGrassmann<C> power(a.pairs(), CoeffTraits<C>::from_int(1));
  while (!(power = power * s).is_zero()) ++needed;
  if (taylor.size() <= needed) throw DomainError("not enough derivatives supplied for the soul order");
  return apply_taylor<C>([&](int n) { return taylor[static_cast<std::size_t>(n)]; }, a);
}

// exp(a). For exact coefficients only the nilpotent part can be exponentiated.
template <class C>
BasicGrassmann<C> gexp(const BasicGrassmann<C>& a) {
  C scale = CoeffTraits<C>::from_int(1);
  if constexpr (CoeffTraits<C>::exact) {
    if (!CoeffTraits<C>::is_zero(a.body())) {
      throw DomainError("exact exp requires a nilpotent argument; factor out exp(body)");
    }
  } else {
    scale = std::exp(a.body());
  }
  std::vector<C> inv_fact{CoeffTraits<C>::from_int(1)};
  for (int n = 1; n <= a.pairs() + 1; ++n) {
    inv_fact.push_back(inv_fact.back() / CoeffTraits<C>::from_int(n));
  }
  return apply_taylor<C>([&](int n) { return scale * inv_fact[static_cast<std::size_t>(n)]; }, a);
}

// exp(soul(a)); exp(body) is left to the caller.
template <class C>
BasicGrassmann<C> gexp_soul(const BasicGrassmann<C>& a) {
  return gexp(a.soul());
}

template <class C>
BasicGrassmann<C> ginverse(const BasicGrassmann<C>& a) {
  const C b = a.body();
  if (CoeffTraits<C>::is_zero(b)) throw DomainError("inverse of an element with zero body");
  const C inv = CoeffTraits<C>::from_int(1) / b;
  return apply_taylor<C>(
      [&](int n) {
        C c = CoeffTraits<C>::from_int(1);
        for (int i = 0; i <= n; ++i) c *= inv;
        return (n % 2 == 0) ? c : C(-c);
      },
      a);
}

inline Grassmann glog(const Grassmann& a) {
  const Complex b = a.body();
  if (b == Complex{}) throw DomainError("log at zero body");
  return apply_taylor<Complex>(
      [&](int n) {
        if (n == 0) return std::log(b);
        const Complex c = 1.0 / (static_cast<double>(n) * std::pow(b, n));
        return (n % 2 == 1) ? c : -c;
      },
      a);
}

// a^p for complex p, principal branch of the body.
inline Grassmann gpow(const Grassmann& a, Complex p) {
  const Complex b = a.body();
  if (b == Complex{}) throw DomainError("power at zero body");
  return apply_taylor<Complex>(
      [&](int n) {
        Complex binom = 1.0;
        for (int i = 0; i < n; ++i) binom *= (p - static_cast<double>(i)) / static_cast<double>(i + 1);
        return binom * std::pow(b, p - static_cast<double>(n));
      },
      a);
}

// Pairing of f with delta(y - bilinear): sum_kappa (-1)^kappa/kappa! f^(kappa)(y0) bilinear^kappa.
template <class C>
BasicGrassmann<C> superdelta_expand(std::span<const C> fderivs, const BasicGrassmann<C>& bilinear, int k) {
  if (static_cast<int>(fderivs.size()) < k + 1) {
    throw DomainError("superdelta_expand needs k+1 derivative values");
  }
  if (!bilinear.is_even()) throw ParityError("bilinear must be Grassmann-even");
  BasicGrassmann<C> result(bilinear.pairs());
  BasicGrassmann<C> power(bilinear.pairs(), CoeffTraits<C>::from_int(1));
  C fact = CoeffTraits<C>::from_int(1);
  for (int kappa = 0; kappa <= k; ++kappa) {
    if (kappa > 0) {
      power = power * bilinear;
      fact *= CoeffTraits<C>::from_int(kappa);
    }
    C c = fderivs[static_cast<std::size_t>(kappa)] / fact;
    if (kappa % 2 == 1) c = -c;
    result += power * c;
  }
  return result;
}

// zeta^dagger zeta = sum_p zeta_p^* zeta_p over the first k pairs.
template <class C>
BasicGrassmann<C> bilinear_norm(int pairs, int k) {
  BasicGrassmann<C> r(pairs);
  for (int p = 0; p < k; ++p) {
    r += BasicGrassmann<C>::monomial(pairs, {zeta_star_id(p), zeta_id(p)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Text format:  "G=<pairs>: <term> + <term> ..." with term "(re,im)" optionally
// followed by " * z(p) zs(q) ..." in canonical order; zero is "G=<pairs>: 0".

namespace detail {

inline std::string format_coeff(const Complex& c) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << '(' << c.real() << ','
     << c.imag() << ')';
  return os.str();
}
inline std::string format_coeff(const GaussRational& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

template <class C>
C parse_coeff(std::string_view re, std::string_view im);

template <>
inline Complex parse_coeff<Complex>(std::string_view re, std::string_view im) {
  return {std::stod(std::string(re)), std::stod(std::string(im))};
}
template <>
inline GaussRational parse_coeff<GaussRational>(std::string_view re, std::string_view im) {
  return GaussRational(Rational(std::string(re)), Rational(std::string(im)));
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace detail

template <class C>
std::string to_text(const BasicGrassmann<C>& a) {
  std::string out = "G=" + std::to_string(a.pairs()) + ": ";
  if (a.is_zero()) return out + "0";
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) out += " + ";
    first = false;
    out += detail::format_coeff(t.coeff);
    if (t.mask != 0) {
      out += " *";
      for (auto m = t.mask; m != 0; m &= m - 1) {
        const int id = std::countr_zero(m);
        out += (id % 2 == 0 ? " z(" : " zs(") + std::to_string(id / 2) + ")";
      }
    }
  }
  return out;
}

template <class C>
BasicGrassmann<C> from_text(std::string_view text) {
  using G = BasicGrassmann<C>;
  auto fail = [&](const char* what) -> DomainError {
    return DomainError(std::string("cannot parse Grassmann element (") + what + "): " + std::string(text));
  };
  text = detail::trim(text);
  if (text.substr(0, 2) != "G=") throw fail("missing pool header");
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw fail("missing ':'");
  const int pairs = std::stoi(std::string(text.substr(2, colon - 2)));
  std::string_view body = detail::trim(text.substr(colon + 1));
  G result(pairs);
  if (body == "0") return result;
  std::vector<typename G::Term> terms;
  while (!body.empty()) {
    if (body.front() != '(') throw fail("expected '('");
    const auto close = body.find(')');
    const auto comma = body.find(',');
    if (close == std::string_view::npos || comma == std::string_view::npos || comma > close) {
      throw fail("bad coefficient");
    }
    C c = detail::parse_coeff<C>(body.substr(1, comma - 1), body.substr(comma + 1, close - comma - 1));
    body = detail::trim(body.substr(close + 1));
    std::vector<int> ids;
    if (!body.empty() && body.front() == '*') {
      body = detail::trim(body.substr(1));
      while (!body.empty() && body.front() == 'z') {
        const bool star = body.substr(0, 3) == "zs(";
        const std::size_t open = star ? 3 : 2;
        if (!star && body.substr(0, 2) != "z(") throw fail("bad generator");
        const auto end = body.find(')');
        if (end == std::string_view::npos) throw fail("unterminated generator");
        const int p = std::stoi(std::string(body.substr(open, end - open)));
        ids.push_back(star ? zeta_star_id(p) : zeta_id(p));
        body = detail::trim(body.substr(end + 1));
      }
    }
    const G mono = G::monomial(pairs, ids, c);
    for (const auto& t : mono.terms()) terms.push_back(t);
    if (!body.empty()) {
      if (body.front() != '+') throw fail("expected '+'");
      body = detail::trim(body.substr(1));
    }
  }
  return G::from_terms(pairs, std::move(terms));
}

}  // namespace susy
