#pragma once

// Coefficient fields for Grassmann-valued quantities.
//
// Two fields are supported: std::complex<double> for numerical work and
// GaussRational (complex numbers with exact rational parts) for identity
// checks that must hold coefficient by coefficient.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace susy {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(long long re) : re_(re) {}  // NOLINT(implicit)
  GaussRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussRational i() { return {Rational(0), Rational(1)}; }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    const Rational d = o.re_ * o.re_ + o.im_ * o.im_;
    if (d == 0) throw std::domain_error("GaussRational: division by zero");
    Rational r = (re_ * o.re_ + im_ * o.im_) / d;
    im_ = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  Complex to_complex() const {
    return {static_cast<double>(re_), static_cast<double>(im_)};
  }

  friend std::ostream& operator<<(std::ostream& os, const GaussRational& g) {
    return os << '(' << g.re_ << ',' << g.im_ << ')';
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

// Minimal traits the algebra needs from a coefficient field.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Complex> {
  static constexpr bool exact = false;
  static bool is_zero(const Complex& c) { return c == Complex{}; }
  static double magnitude(const Complex& c) { return std::abs(c); }
  static Complex conj(const Complex& c) { return std::conj(c); }
  static Complex from_int(long long v) { return Complex(static_cast<double>(v), 0.0); }
  static Complex from_ratio(long long num, long long den) {
    return Complex(static_cast<double>(num) / static_cast<double>(den), 0.0);
  }
  static Complex imag_unit() { return {0.0, 1.0}; }
  static Complex to_complex(const Complex& c) { return c; }
};

template <>
struct CoeffTraits<GaussRational> {
  static constexpr bool exact = true;
  static bool is_zero(const GaussRational& c) { return c.real() == 0 && c.imag() == 0; }
  static double magnitude(const GaussRational& c) { return std::abs(c.to_complex()); }
  static GaussRational conj(const GaussRational& c) { return {c.real(), -c.imag()}; }
  static GaussRational from_int(long long v) { return GaussRational(v); }
  static GaussRational from_ratio(long long num, long long den) {
    return GaussRational(Rational(num, den));
  }
  static GaussRational imag_unit() { return GaussRational::i(); }
  static Complex to_complex(const GaussRational& c) { return c.to_complex(); }
};

}  // namespace susy
