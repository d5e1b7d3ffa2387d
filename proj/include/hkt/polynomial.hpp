#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkt/rational.hpp"

namespace hkt {

/// Exponent vector of a monomial in 4n coordinates.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t dim) : exps_(dim, 0) {}
  explicit Monomial(std::vector<std::uint32_t> exps) : exps_(std::move(exps)) {}

  std::size_t size() const { return exps_.size(); }
  std::uint32_t operator[](std::size_t i) const { return exps_[i]; }
  std::uint32_t& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<std::uint32_t>& exponents() const { return exps_; }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (auto e : exps_) d += e;
    return d;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < r.exps_.size(); ++i) r.exps_[i] += b.exps_[i];
    return r;
  }

  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::uint32_t> exps_;
};

/// Sparse multivariate polynomial over Q or Q(i).  No zero coefficient is ever
/// stored, so two polynomials are equal iff their term maps are equal.
template <ExactField C>
class Polynomial {
 public:
  using Coeff = C;
  using TermMap = std::map<Monomial, C>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, const C& c) {
    Polynomial p(dim);
    p.add_term(Monomial(dim), c);
    return p;
  }

  static Polynomial variable(std::size_t dim, std::size_t i) {
    if (i >= dim) throw std::out_of_range("Polynomial::variable: index out of range");
    Monomial m(dim);
    m[i] = 1;
    Polynomial p(dim);
    p.add_term(m, C(1));
    return p;
  }

  static Polynomial term(const Monomial& m, const C& c) {
    Polynomial p(m.size());
    p.add_term(m, c);
    return p;
  }

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.total_degree() == 0);
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.total_degree()));
    return d;
  }

  C constant_term() const {
    auto it = terms_.find(Monomial(dim_));
    return it == terms_.end() ? C(0) : it->second;
  }

  C coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C(0) : it->second;
  }

  void add_term(const Monomial& m, const C& c) {
    if (m.size() != dim_) throw std::invalid_argument("Polynomial: monomial length mismatch");
    if (hkt::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (hkt::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  Polynomial& operator*=(const C& s) {
    if (hkt::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  /// this += s * o, without a temporary.
  void add_scaled(const C& s, const Polynomial& o) {
    check_dim(o);
    if (hkt::is_zero(s)) return;
    for (const auto& [m, c] : o.terms_) add_term(m, s * c);
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const C& s) { return a *= s; }
  friend Polynomial operator*(const C& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial r(a.dim_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    }
    return r;
  }
  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  /// Largest coefficient height in bits (0 for the zero polynomial).
  std::size_t height_bits() const {
    std::size_t h = 0;
    for (const auto& [m, c] : terms_) h = std::max(h, c.height_bits());
    return h;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << c;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        os << "*x" << i;
        if (m[i] > 1) os << "^" << m[i];
      }
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) { return os << p.str(); }

 private:
  void check_dim(const Polynomial& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("Polynomial: dimension mismatch");
  }

  std::size_t dim_ = 0;
  TermMap terms_;
};

using RationalPolynomial = Polynomial<Rational>;
using GaussianPolynomial = Polynomial<GaussianRational>;

template <ExactField C>
Polynomial<C> partial(const Polynomial<C>& p, std::size_t i) {
  if (i >= p.dim()) throw std::out_of_range("partial: coordinate index out of range");
  Polynomial<C> r(p.dim());
  for (const auto& [m, c] : p.terms()) {
    if (m[i] == 0) continue;
    Monomial dm(m);
    dm[i] -= 1;
    r.add_term(dm, c * C(static_cast<long>(m[i])));
  }
  return r;
}

namespace detail {

template <class T>
std::vector<std::vector<T>> power_table(const Polynomial<Rational>::TermMap& terms,
                                        std::span<const T> pt, std::size_t dim) {
  std::vector<std::uint32_t> max_exp(dim, 0);
  for (const auto& [m, c] : terms) {
    for (std::size_t i = 0; i < dim; ++i) max_exp[i] = std::max(max_exp[i], m[i]);
  }
  std::vector<std::vector<T>> pw(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    pw[i].reserve(max_exp[i] + 1);
    pw[i].push_back(T(1));
    for (std::uint32_t e = 1; e <= max_exp[i]; ++e) pw[i].push_back(pw[i].back() * pt[i]);
  }
  return pw;
}

}  // namespace detail

/// Exact evaluation at a point with coordinates in the coefficient field.
template <ExactField C>
C evaluate(const Polynomial<C>& p, std::span<const C> pt) {
  if (pt.size() != p.dim()) throw std::invalid_argument("evaluate: point length mismatch");
  std::vector<std::uint32_t> max_exp(p.dim(), 0);
  for (const auto& [m, c] : p.terms()) {
    for (std::size_t i = 0; i < p.dim(); ++i) max_exp[i] = std::max(max_exp[i], m[i]);
  }
  std::vector<std::vector<C>> pw(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    pw[i].push_back(C(1));
    for (std::uint32_t e = 1; e <= max_exp[i]; ++e) pw[i].push_back(pw[i].back() * pt[i]);
  }
  C sum(0);
  for (const auto& [m, c] : p.terms()) {
    C t = c;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (m[i] != 0) t *= pw[i][m[i]];
    }
    sum += t;
  }
  return sum;
}

template <ExactField C>
C evaluate(const Polynomial<C>& p, const std::vector<C>& pt) {
  return evaluate(p, std::span<const C>(pt));
}

/// Floating evaluation.  Coefficients are converted with Rational::to_double
/// (round-to-nearest for word-sized rationals); arithmetic is IEEE double.
inline double evaluate(const Polynomial<Rational>& p, std::span<const double> pt) {
  if (pt.size() != p.dim()) throw std::invalid_argument("evaluate: point length mismatch");
  const auto pw = detail::power_table<double>(p.terms(), pt, p.dim());
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = c.to_double();
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (m[i] != 0) t *= pw[i][m[i]];
    }
    sum += t;
  }
  return sum;
}

inline double evaluate(const Polynomial<Rational>& p, const std::vector<double>& pt) {
  return evaluate(p, std::span<const double>(pt));
}

inline Polynomial<GaussianRational> promote(const Polynomial<Rational>& p) {
  Polynomial<GaussianRational> r(p.dim());
  for (const auto& [m, c] : p.terms()) r.add_term(m, promote(c));
  return r;
}

inline Polynomial<Rational> real_part(const Polynomial<GaussianRational>& p) {
  Polynomial<Rational> r(p.dim());
  for (const auto& [m, c] : p.terms()) r.add_term(m, c.re());
  return r;
}

inline Polynomial<Rational> imag_part(const Polynomial<GaussianRational>& p) {
  Polynomial<Rational> r(p.dim());
  for (const auto& [m, c] : p.terms()) r.add_term(m, c.im());
  return r;
}

template <ExactField C>
Polynomial<C> conj(const Polynomial<C>& p) {
  Polynomial<C> r(p.dim());
  for (const auto& [m, c] : p.terms()) r.add_term(m, conj(c));
  return r;
}

// ---------------------------------------------------------------------------
// Deterministic random generation.  mt19937_64 is fully specified by the
// standard, and the bounded draw below avoids the implementation-defined
// std::uniform_int_distribution, so outputs are identical across toolchains.

using Rng = std::mt19937_64;

inline long uniform_int(Rng& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<long>(rng() % span);
}

/// Nonzero integer coefficient in [-9, 9].
inline long random_coefficient(Rng& rng) {
  long c = 0;
  while (c == 0) c = uniform_int(rng, -9, 9);
  return c;
}

inline Polynomial<Rational> random_polynomial(Rng& rng, std::size_t dim, unsigned max_degree,
                                              unsigned terms) {
  // Monomials are drawn until `terms` distinct ones are found (or the small
  // monomial space is exhausted), so every coefficient stays in [-9, 9].
  Polynomial<Rational> p(dim);
  for (unsigned attempt = 0; p.size() < terms && attempt < 20 * terms; ++attempt) {
    Monomial m(dim);
    const long deg = uniform_int(rng, 0, static_cast<long>(max_degree));
    for (long u = 0; u < deg; ++u) m[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(dim) - 1))] += 1;
    const long c = random_coefficient(rng);
    if (p.terms().count(m) == 0) p.add_term(m, Rational(c));
  }
  return p;
}

/// Reproducible pseudo-random polynomial with coefficients in [-9, 9].
inline Polynomial<Rational> random_polynomial(std::size_t dim, unsigned max_degree,
                                              unsigned terms, std::uint64_t seed) {
  if (dim == 0 || terms == 0) throw std::invalid_argument("random_polynomial: bounds must be positive");
  Rng rng(seed);
  return random_polynomial(rng, dim, max_degree, terms);
}

/// Random rational in {p/q : |p| <= 9, 1 <= q <= 5}.
inline Rational random_rational(Rng& rng) {
  return Rational(uniform_int(rng, -9, 9), uniform_int(rng, 1, 5));
}

}  // namespace hkt
