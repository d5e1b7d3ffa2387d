#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace hkt {

/// Exact rational number backed by GMP.  Always stored in lowest terms with a
/// positive denominator, so equality is structural.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : q_(static_cast<long>(v)) {}  // NOLINT
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  /// Parses decimal integer strings for numerator and denominator.
  static Rational from_strings(const std::string& num, const std::string& den) {
    mpz_class n, d;
    if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0) {
      throw std::invalid_argument("Rational: malformed integer string '" + num +
                                  "/" + den + "'");
    }
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(q);
  }

  const mpq_class& get() const { return q_; }
  std::string num_str() const { return q_.get_num().get_str(); }
  std::string den_str() const { return q_.get_den().get_str(); }
  std::string str() const { return q_.get_str(); }

  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }

  /// Round-to-nearest when numerator and denominator fit in a double mantissa
  /// (the IEEE division is then correctly rounded); truncation otherwise.
  double to_double() const {
    const auto& n = q_.get_num();
    const auto& d = q_.get_den();
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 53 &&
        mpz_sizeinbase(d.get_mpz_t(), 2) <= 53) {
      return n.get_d() / d.get_d();
    }
    return q_.get_d();
  }

  /// Bit length of max(|num|, den); used as a coefficient height measure.
  std::size_t height_bits() const {
    return std::max(mpz_sizeinbase(q_.get_num_mpz_t(), 2),
                    mpz_sizeinbase(q_.get_den_mpz_t(), 2));
  }

  Rational inverse() const {
    if (is_zero()) throw std::domain_error("Rational: inverse of zero");
    return Rational(mpq_class(1 / q_));
  }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.q_.get_str();
  }

 private:
  mpq_class q_{0};
};

/// Element of Q(i).
class GaussianRational {
 public:
  GaussianRational() = default;
  explicit GaussianRational(const Rational& re) : re_(re) {}
  GaussianRational(long re) : re_(re) {}  // NOLINT
  GaussianRational(int re) : re_(re) {}  // NOLINT
  GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  GaussianRational conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  GaussianRational inverse() const {
    const Rational n = norm2();
    if (n.is_zero()) throw std::domain_error("GaussianRational: inverse of zero");
    return {re_ / n, -im_ / n};
  }

  std::size_t height_bits() const { return std::max(re_.height_bits(), im_.height_bits()); }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.inverse(); }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussianRational&, const GaussianRational&) = default;

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << "(" << z.re_ << " + " << z.im_ << "i)";
  }

 private:
  Rational re_;
  Rational im_;
};

/// Coefficient fields supported by the exact core.
template <class C>
concept ExactField = std::is_same_v<C, Rational> || std::is_same_v<C, GaussianRational>;

template <class C>
inline constexpr bool is_gaussian_v = std::is_same_v<C, GaussianRational>;

inline bool is_zero(const Rational& r) { return r.is_zero(); }
inline bool is_zero(const GaussianRational& z) { return z.is_zero(); }
inline Rational conj(const Rational& r) { return r; }
inline GaussianRational conj(const GaussianRational& z) { return z.conj(); }

/// Explicit Q -> Q(i) promotion.
inline GaussianRational promote(const Rational& r) { return GaussianRational(r); }

}  // namespace hkt
