#pragma once

// Supermatrices over the Grassmann algebra.
//
// Rows and columns are graded: the first r0 rows are "boson" rows and the
// remaining r1 are "fermion" rows (same for columns with c0, c1). The entry
// (i, j) must be Grassmann-even when the grades agree and odd when they differ.
// A square k1/k2 supermatrix has r0 = c0 = k1 and r1 = c1 = k2; a supervector is
// a single column of grade 0 (boson-top layout) or grade 1 (fermion-top layout).
//
// Supertranspose: entry (i, j) moves to (j, i) and changes sign iff row i is a
// fermion row and column j a boson column. For square matrices this is the
// block rule (a^T, -nu^T; mu^T, b^T).

#include "susy/grassmann.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace susy {

enum class TransposeMode { Transpose, Dagger };
enum class VectorLayout { BosonTop, FermionTop };
enum class SupergroupFamily { Unitary, UOSp, Noncompact };

template <class C>
class BasicSuperMatrix {
 public:
  using G = BasicGrassmann<C>;
  using Traits = CoeffTraits<C>;

  BasicSuperMatrix() = default;

  BasicSuperMatrix(int pairs, int r0, int r1, int c0, int c1)
      : pairs_(pairs), r0_(r0), r1_(r1), c0_(c0), c1_(c1),
        e_(static_cast<std::size_t>((r0 + r1) * (c0 + c1)), G(pairs)) {
    if (r0 < 0 || r1 < 0 || c0 < 0 || c1 < 0) throw DimensionError("negative block dimension");
  }

  static BasicSuperMatrix zero(int pairs, int k1, int k2) { return {pairs, k1, k2, k1, k2}; }

  static BasicSuperMatrix identity(int pairs, int k1, int k2) {
    BasicSuperMatrix m(pairs, k1, k2, k1, k2);
    for (int i = 0; i < k1 + k2; ++i) m.set(i, i, G(pairs, Traits::from_int(1)));
    return m;
  }

  // Square supermatrix from blocks a (k1 x k1), mu (k1 x k2), nu (k2 x k1), b (k2 x k2), row-major.
  static BasicSuperMatrix from_blocks(int pairs, int k1, int k2, const std::vector<G>& a,
                                      const std::vector<G>& mu, const std::vector<G>& nu,
                                      const std::vector<G>& b) {
    if (a.size() != static_cast<std::size_t>(k1 * k1) || b.size() != static_cast<std::size_t>(k2 * k2) ||
        mu.size() != static_cast<std::size_t>(k1 * k2) || nu.size() != static_cast<std::size_t>(k2 * k1)) {
      throw DimensionError("block sizes do not match k1/k2");
    }
    BasicSuperMatrix m(pairs, k1, k2, k1, k2);
    for (int i = 0; i < k1; ++i) {
      for (int j = 0; j < k1; ++j) m.set(i, j, a[i * k1 + j]);
      for (int j = 0; j < k2; ++j) m.set(i, k1 + j, mu[i * k2 + j]);
    }
    for (int i = 0; i < k2; ++i) {
      for (int j = 0; j < k1; ++j) m.set(k1 + i, j, nu[i * k1 + j]);
      for (int j = 0; j < k2; ++j) m.set(k1 + i, k1 + j, b[i * k2 + j]);
    }
    return m;
  }

  static BasicSuperMatrix supervector(int pairs, const std::vector<G>& top, const std::vector<G>& bottom,
                                      VectorLayout layout = VectorLayout::BosonTop) {
    const int t = static_cast<int>(top.size());
    const int b = static_cast<int>(bottom.size());
    BasicSuperMatrix v = layout == VectorLayout::BosonTop ? BasicSuperMatrix(pairs, t, b, 1, 0)
                                                          : BasicSuperMatrix(pairs, t, b, 0, 1);
    for (int i = 0; i < t; ++i) v.set(i, 0, top[i]);
    for (int i = 0; i < b; ++i) v.set(t + i, 0, bottom[i]);
    return v;
  }

  int pairs() const { return pairs_; }
  int rows() const { return r0_ + r1_; }
  int cols() const { return c0_ + c1_; }
  int r0() const { return r0_; }
  int r1() const { return r1_; }
  int c0() const { return c0_; }
  int c1() const { return c1_; }
  bool is_square() const { return r0_ == c0_ && r1_ == c1_; }
  bool row_odd(int i) const { return i >= r0_; }
  bool col_odd(int j) const { return j >= c0_; }

  const G& operator()(int i, int j) const { return e_[index(i, j)]; }

  void set(int i, int j, G value) {
    if (value.pairs() != pairs_ && value.pairs() != 0) {
      throw PoolMismatchError("supermatrix entry uses a different generator pool");
    }
    if (!value.is_zero()) {
      const bool odd = row_odd(i) != col_odd(j);
      if (odd ? !value.is_odd() : !value.is_even()) {
        throw ParityError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") has wrong parity");
      }
    }
    e_[index(i, j)] = value.pairs() == pairs_ ? std::move(value) : value.in_pool(pairs_);
  }

  // Body of entry (i, j) as a complex number.
  Complex body(int i, int j) const { return Traits::to_complex((*this)(i, j).body()); }

  friend BasicSuperMatrix operator+(const BasicSuperMatrix& x, const BasicSuperMatrix& y) {
    x.require_same_shape(y);
    BasicSuperMatrix r = x;
    for (std::size_t n = 0; n < r.e_.size(); ++n) r.e_[n] += y.e_[n];
    return r;
  }
  friend BasicSuperMatrix operator-(const BasicSuperMatrix& x, const BasicSuperMatrix& y) {
    x.require_same_shape(y);
    BasicSuperMatrix r = x;
    for (std::size_t n = 0; n < r.e_.size(); ++n) r.e_[n] -= y.e_[n];
    return r;
  }
  friend BasicSuperMatrix operator*(const C& c, BasicSuperMatrix x) {
    for (auto& v : x.e_) v *= c;
    return x;
  }
  // Left multiplication by an even Grassmann scalar.
  friend BasicSuperMatrix operator*(const G& g, BasicSuperMatrix x) {
    if (!g.is_even()) throw ParityError("supermatrix scaling needs an even scalar");
    for (auto& v : x.e_) v = g * v;
    return x;
  }

  friend BasicSuperMatrix operator*(const BasicSuperMatrix& x, const BasicSuperMatrix& y) {
    if (x.c0_ != y.r0_ || x.c1_ != y.r1_) throw DimensionError("supermatrix product: inner grading mismatch");
    if (x.pairs_ != y.pairs_) throw PoolMismatchError("supermatrix product: generator pools differ");
    BasicSuperMatrix r(x.pairs_, x.r0_, x.r1_, y.c0_, y.c1_);
    for (int i = 0; i < x.rows(); ++i) {
      for (int j = 0; j < y.cols(); ++j) {
        G acc(x.pairs_);
        for (int l = 0; l < x.cols(); ++l) {
          const G& a = x(i, l);
          const G& b = y(l, j);
          if (a.is_zero() || b.is_zero()) continue;
          acc += a * b;
        }
        r.e_[r.index(i, j)] = std::move(acc);
      }
    }
    return r;
  }

  friend bool operator==(const BasicSuperMatrix& x, const BasicSuperMatrix& y) {
    return x.r0_ == y.r0_ && x.r1_ == y.r1_ && x.c0_ == y.c0_ && x.c1_ == y.c1_ && x.e_ == y.e_;
  }

  double max_abs_diff(const BasicSuperMatrix& y) const {
    require_same_shape(y);
    double m = 0.0;
    for (std::size_t n = 0; n < e_.size(); ++n) m = std::max(m, susy::max_abs_diff(e_[n], y.e_[n]));
    return m;
  }

  BasicSuperMatrix pruned(double tol) const {
    BasicSuperMatrix r = *this;
    for (auto& v : r.e_) v = v.pruned(tol);
    return r;
  }

  std::string to_text() const {
    std::string out = "SM " + std::to_string(r0_) + "/" + std::to_string(r1_) + " x " +
                      std::to_string(c0_) + "/" + std::to_string(c1_) + "\n";
    for (int i = 0; i < rows(); ++i) {
      for (int j = 0; j < cols(); ++j) {
        out += "[" + std::to_string(i) + "," + std::to_string(j) + "] " + susy::to_text((*this)(i, j)) + "\n";
      }
    }
    return out;
  }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || i >= rows() || j < 0 || j >= cols()) throw DimensionError("supermatrix index out of range");
    return static_cast<std::size_t>(i * cols() + j);
  }
  void require_same_shape(const BasicSuperMatrix& y) const {
    if (r0_ != y.r0_ || r1_ != y.r1_ || c0_ != y.c0_ || c1_ != y.c1_) {
      throw DimensionError("supermatrix shapes differ");
    }
  }

  int pairs_ = 0;
  int r0_ = 0, r1_ = 0, c0_ = 0, c1_ = 0;
  std::vector<G> e_;
};

using SuperMatrix = BasicSuperMatrix<Complex>;
using ExactSuperMatrix = BasicSuperMatrix<GaussRational>;

// Entry-wise conjugate.
template <class C>
BasicSuperMatrix<C> entrywise_conjugate(const BasicSuperMatrix<C>& m, Conjugation conv = Conjugation::MinusSign) {
  BasicSuperMatrix<C> r(m.pairs(), m.r0(), m.r1(), m.c0(), m.c1());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) r.set(i, j, conjugate(m(i, j), conv));
  }
  return r;
}

template <class C>
BasicSuperMatrix<C> stranspose(const BasicSuperMatrix<C>& m, TransposeMode mode = TransposeMode::Transpose,
                               Conjugation conv = Conjugation::MinusSign) {
  BasicSuperMatrix<C> r(m.pairs(), m.c0(), m.c1(), m.r0(), m.r1());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      BasicGrassmann<C> v = m(i, j);
      if (m.row_odd(i) && !m.col_odd(j)) v = -v;
      if (mode == TransposeMode::Dagger) v = conjugate(v, conv);
      r.set(j, i, std::move(v));
    }
  }
  return r;
}

template <class C>
BasicSuperMatrix<C> dagger(const BasicSuperMatrix<C>& m, Conjugation conv = Conjugation::MinusSign) {
  return stranspose(m, TransposeMode::Dagger, conv);
}

template <class C>
BasicGrassmann<C> supertrace(const BasicSuperMatrix<C>& m) {
  if (!m.is_square()) throw DimensionError("supertrace needs a square supermatrix");
  BasicGrassmann<C> s(m.pairs());
  for (int i = 0; i < m.rows(); ++i) s = m.row_odd(i) ? s - m(i, i) : s + m(i, i);
  return s;
}

// Sub-block extraction: rows [i0, i0+n), cols [j0, j0+m) as a plain Grassmann matrix.
template <class C>
std::vector<BasicGrassmann<C>> block_entries(const BasicSuperMatrix<C>& s, int i0, int n, int j0, int m) {
  std::vector<BasicGrassmann<C>> out;
  out.reserve(static_cast<std::size_t>(n * m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out.push_back(s(i0 + i, j0 + j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra over the commutative even subalgebra. Matrices are square,
// row-major vectors of even Grassmann elements.

namespace detail {

template <class C>
using GMat = std::vector<BasicGrassmann<C>>;

template <class C>
BasicGrassmann<C> laplace_det(const GMat<C>& m, int n, int pairs) {
  using G = BasicGrassmann<C>;
  if (n == 0) return G(pairs, CoeffTraits<C>::from_int(1));
  if (n == 1) return m[0];
  if (n > 8) throw SingularBlockError("determinant with singular body is only supported up to 8x8");
  G det(pairs);
  for (int j = 0; j < n; ++j) {
    if (m[j].is_zero()) continue;
    GMat<C> minor;
    minor.reserve(static_cast<std::size_t>((n - 1) * (n - 1)));
    for (int r = 1; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (c != j) minor.push_back(m[r * n + c]);
      }
    }
    const G term = m[j] * laplace_det<C>(minor, n - 1, pairs);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace detail

// Determinant of an even-entry matrix. Elimination pivots on the largest body;
// when every remaining body in a column vanishes the cofactor expansion is used.
template <class C>
BasicGrassmann<C> even_det(std::vector<BasicGrassmann<C>> m, int n, int pairs) {
  using G = BasicGrassmann<C>;
  using T = CoeffTraits<C>;
  for (const auto& v : m) {
    if (!v.is_even()) throw ParityError("determinant needs even entries");
  }
  G det(pairs, T::from_int(1));
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 0.0;
    for (int r = col; r < n; ++r) {
      const double mag = T::magnitude(m[r * n + col].body());
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (piv < 0) {
      // Remaining block has a singular body column; finish exactly by cofactors.
      const int rest = n - col;
      detail::GMat<C> sub;
      for (int r = col; r < n; ++r) {
        for (int c = col; c < n; ++c) sub.push_back(m[r * n + c]);
      }
      return det * detail::laplace_det<C>(sub, rest, pairs);
    }
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(m[piv * n + c], m[col * n + c]);
      det = -det;
    }
    const G pivot = m[col * n + col];
    det = det * pivot;
    const G inv = ginverse(pivot);
    for (int r = col + 1; r < n; ++r) {
      if (m[r * n + col].is_zero()) continue;
      const G f = m[r * n + col] * inv;
      for (int c = col + 1; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
    }
  }
  return det;
}

// Inverse of an even-entry matrix via body inverse plus the terminating Neumann
// series in the soul: M^-1 = sum_n (-M0^-1 S)^n M0^-1 with (M0^-1 S)^n = 0 for n > G.
template <class C>
std::vector<BasicGrassmann<C>> even_inverse(const std::vector<BasicGrassmann<C>>& m, int n, int pairs);

// Inverse of a square supermatrix; same body/soul scheme with the odd blocks
// treated as part of the nilpotent remainder (series length at most 2G).
template <class C>
BasicSuperMatrix<C> sinverse(const BasicSuperMatrix<C>& s) {
  using SM = BasicSuperMatrix<C>;
  using G = BasicGrassmann<C>;
  using T = CoeffTraits<C>;
  if (!s.is_square()) throw DimensionError("inverse needs a square supermatrix");
  const int k1 = s.r0(), k2 = s.r1(), n = k1 + k2, pairs = s.pairs();
  // Body inverse of each diagonal block by Gauss-Jordan over the coefficient field.
  auto invert_body = [&](int off, int k) {
    std::vector<C> a(static_cast<std::size_t>(k * k)), inv(static_cast<std::size_t>(k * k));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        a[i * k + j] = s(off + i, off + j).body();
        inv[i * k + j] = T::from_int(i == j ? 1 : 0);
      }
    }
    for (int col = 0; col < k; ++col) {
      int piv = -1;
      double best = 0.0;
      for (int r = col; r < k; ++r) {
        const double mag = T::magnitude(a[r * k + col]);
        if (mag > best) {
          best = mag;
          piv = r;
        }
      }
      if (piv < 0) throw SingularBlockError("supermatrix block has a singular body");
      for (int c = 0; c < k; ++c) {
        std::swap(a[piv * k + c], a[col * k + c]);
        std::swap(inv[piv * k + c], inv[col * k + c]);
      }
      const C p = T::from_int(1) / a[col * k + col];
      for (int c = 0; c < k; ++c) {
        a[col * k + c] *= p;
        inv[col * k + c] *= p;
      }
      for (int r = 0; r < k; ++r) {
        if (r == col || T::is_zero(a[r * k + col])) continue;
        const C f = a[r * k + col];
        for (int c = 0; c < k; ++c) {
          a[r * k + c] -= f * a[col * k + c];
          inv[r * k + c] -= f * inv[col * k + c];
        }
      }
    }
    return inv;
  };
  const auto ia = invert_body(0, k1);
  const auto ib = invert_body(k1, k2);
  SM body_inv = SM::zero(pairs, k1, k2);
  SM soul = s;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool same_block = (i < k1) == (j < k1);
      if (same_block) {
        const C v = i < k1 ? ia[i * k1 + j] : ib[(i - k1) * k2 + (j - k1)];
        body_inv.set(i, j, G(pairs, v));
        soul.set(i, j, s(i, j) - G(pairs, s(i, j).body()));
      }
    }
  }
  // s = B (1 + B^-1 S)  =>  s^-1 = sum_m (-B^-1 S)^m B^-1
  const SM step = C(T::from_int(-1)) * (body_inv * soul);
  SM term = body_inv;
  SM result = body_inv;
  for (int m = 1; m <= 2 * pairs + 1; ++m) {
    term = step * term;
    bool zero = true;
    for (int i = 0; i < n && zero; ++i) {
      for (int j = 0; j < n && zero; ++j) zero = term(i, j).is_zero();
    }
    if (zero) break;
    result = result + term;
  }
  return result;
}

template <class C>
std::vector<BasicGrassmann<C>> even_inverse(const std::vector<BasicGrassmann<C>>& m, int n, int pairs) {
  BasicSuperMatrix<C> s = BasicSuperMatrix<C>::zero(pairs, n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s.set(i, j, m[i * n + j]);
  }
  const auto inv = sinverse(s);
  return block_entries(inv, 0, n, 0, n);
}

enum class SdetForm { BosonSchur, FermionSchur };

// sdet = det(a - mu b^-1 nu) / det b  (BosonSchur) or det a / det(b - nu a^-1 mu).
template <class C>
BasicGrassmann<C> sdet(const BasicSuperMatrix<C>& s, SdetForm form = SdetForm::BosonSchur) {
  using G = BasicGrassmann<C>;
  if (!s.is_square()) throw DimensionError("sdet needs a square supermatrix");
  const int k1 = s.r0(), k2 = s.r1(), pairs = s.pairs();
  const auto a = block_entries(s, 0, k1, 0, k1);
  const auto mu = block_entries(s, 0, k1, k1, k2);
  const auto nu = block_entries(s, k1, k2, 0, k1);
  const auto b = block_entries(s, k1, k2, k1, k2);
  auto schur = [&](const std::vector<G>& x, int nx, const std::vector<G>& left, const std::vector<G>& yinv,
                   int ny, const std::vector<G>& right) {
    // x - left * yinv * right
    std::vector<G> out = x;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < nx; ++j) {
        G acc(pairs);
        for (int p = 0; p < ny; ++p) {
          for (int q = 0; q < ny; ++q) {
            const G& l = left[i * ny + p];
            const G& r = right[q * nx + j];
            if (l.is_zero() || r.is_zero() || yinv[p * ny + q].is_zero()) continue;
            acc += l * yinv[p * ny + q] * r;
          }
        }
        out[i * nx + j] -= acc;
      }
    }
    return out;
  };
  if (form == SdetForm::BosonSchur) {
    const G det_b = even_det(b, k2, pairs);
    if (CoeffTraits<C>::is_zero(det_b.body())) throw SingularBlockError("sdet: fermion block body is singular");
    const auto b_inv = even_inverse(b, k2, pairs);
#ifdef SUSY_FAULT_SDET_SIGN
    // deliberately broken build for checking that verify notices
    return -(even_det(schur(a, k1, mu, b_inv, k2, nu), k1, pairs) * ginverse(det_b));
#endif
    return even_det(schur(a, k1, mu, b_inv, k2, nu), k1, pairs) * ginverse(det_b);
  }
  const G det_a = even_det(a, k1, pairs);
  if (CoeffTraits<C>::is_zero(det_a.body())) throw SingularBlockError("sdet: boson block body is singular");
  const auto a_inv = even_inverse(a, k1, pairs);
  const G d = even_det(schur(b, k2, nu, a_inv, k1, mu), k2, pairs);
  if (CoeffTraits<C>::is_zero(d.body())) throw SingularBlockError("sdet: Schur complement body is singular");
  return det_a * ginverse(d);
}

// Berezinian of a linear change of variables with Jacobian blocks
// [[dy/dz^T, dy/dzeta^T], [deta/dz^T, deta/dzeta^T]].
template <class C>
BasicGrassmann<C> berezinian_linear(const BasicSuperMatrix<C>& jacobian) {
  return sdet(jacobian, SdetForm::BosonSchur);
}

// exp of a supermatrix by scaling and squaring of a Taylor polynomial.
inline SuperMatrix sexp(const SuperMatrix& s) {
  if (!s.is_square()) throw DimensionError("sexp needs a square supermatrix");
  double norm = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = 0; j < s.cols(); ++j) norm = std::max(norm, max_abs_coeff(s(i, j)));
  }
  int squarings = 0;
  while (norm * s.rows() > 0.5 && squarings < 60) {
    norm /= 2.0;
    ++squarings;
  }
  const SuperMatrix x = Complex(std::ldexp(1.0, -squarings), 0.0) * s;
  SuperMatrix result = SuperMatrix::identity(s.pairs(), s.r0(), s.r1());
  SuperMatrix term = result;
  for (int n = 1; n <= 30; ++n) {
    term = Complex(1.0 / n, 0.0) * (term * x);
    result = result + term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

// Diagonal metric L with +-1 entries; fermion slots must be +1.
struct Metric {
  std::vector<int> diag;

  static Metric euclidean(int k1, int k2) { return {std::vector<int>(static_cast<std::size_t>(k1 + k2), 1)}; }

  void validate(int k1, int k2) const {
    if (static_cast<int>(diag.size()) != k1 + k2) throw DimensionError("metric length does not match k1+k2");
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (diag[i] != 1 && diag[i] != -1) throw DomainError("metric entries must be +1 or -1");
      if (static_cast<int>(i) >= k1 && diag[i] != 1) throw DomainError("fermionic metric entries must be +1");
    }
  }

  template <class C>
  BasicSuperMatrix<C> matrix(int pairs, int k1, int k2) const {
    validate(k1, k2);
    auto m = BasicSuperMatrix<C>::zero(pairs, k1, k2);
    for (int i = 0; i < k1 + k2; ++i) m.set(i, i, BasicGrassmann<C>(pairs, CoeffTraits<C>::from_int(diag[i])));
    return m;
  }
};

struct GroupCheck {
  bool member = false;
  double residual = 0.0;
};

// Defining relations: U(k1/k2) u^dag u = u u^dag = 1; noncompact u^dag L u = L;
// UOSp(k1/2k2) unitary plus the reality condition u^* C = C u on the real
// supervector (w, zeta_1, zeta_1^*, ...), where C swaps each fermion pair with
// the sign fixed by the MinusSign conjugation.
inline GroupCheck check_supergroup(const SuperMatrix& u, SupergroupFamily family,
                                   const std::optional<Metric>& metric = std::nullopt, double tol = 1e-10) {
  if (!u.is_square()) throw DimensionError("group check needs a square supermatrix");
  const int k1 = u.r0(), k2 = u.r1(), pairs = u.pairs();
  const SuperMatrix one = SuperMatrix::identity(pairs, k1, k2);
  const SuperMatrix ud = dagger(u);
  GroupCheck out;
  switch (family) {
    case SupergroupFamily::Unitary:
      out.residual = std::max((ud * u).max_abs_diff(one), (u * ud).max_abs_diff(one));
      break;
    case SupergroupFamily::Noncompact: {
      const Metric l = metric.value_or(Metric::euclidean(k1, k2));
      const SuperMatrix lm = l.matrix<Complex>(pairs, k1, k2);
      out.residual = (ud * lm * u).max_abs_diff(lm);
      break;
    }
    case SupergroupFamily::UOSp: {
      if (k2 % 2 != 0) throw DimensionError("UOSp check needs an even number of fermion slots");
      SuperMatrix cm = SuperMatrix::zero(pairs, k1, k2);
      for (int i = 0; i < k1; ++i) cm.set(i, i, Grassmann(pairs, 1.0));
      for (int p = 0; p < k2; p += 2) {
        cm.set(k1 + p, k1 + p + 1, Grassmann(pairs, 1.0));
        cm.set(k1 + p + 1, k1 + p, Grassmann(pairs, -1.0));
      }
      const double unit = std::max((ud * u).max_abs_diff(one), (u * ud).max_abs_diff(one));
      out.residual = std::max(unit, (entrywise_conjugate(u) * cm).max_abs_diff(cm * u));
      break;
    }
  }
  out.member = out.residual <= tol;
  return out;
}

}  // namespace susy
