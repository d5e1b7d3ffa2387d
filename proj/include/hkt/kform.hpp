#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkt/matrix.hpp"
#include "hkt/polynomial.hpp"

namespace hkt {

/// Strictly increasing coordinate indices labelling a basis k-form
/// dx_{i1} ^ ... ^ dx_{ik}.
using MultiIndex = std::vector<std::uint16_t>;

/// Sorts `idx` in place and returns the permutation sign, or 0 when an index
/// repeats (the wedge vanishes).
inline int canonicalize(MultiIndex& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i) {
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

/// All k-subsets of [0, dim) in lexicographic order: the standard basis of
/// the fibre of Lambda^k.
inline std::vector<MultiIndex> fiber_basis(std::size_t dim, std::size_t k) {
  std::vector<MultiIndex> out;
  if (k > dim) return out;
  MultiIndex cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = static_cast<std::uint16_t>(i);
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == dim - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = static_cast<std::uint16_t>(cur[j - 1] + 1);
  }
  return out;
}

/// Polynomial-coefficient k-form on R^dim.  Coefficients are stored against
/// sorted multi-indices with zero polynomials pruned, so equality of forms is
/// structural.
template <ExactField C>
class KForm {
 public:
  using Poly = Polynomial<C>;
  using TermMap = std::map<MultiIndex, Poly>;

  KForm() = default;
  KForm(std::size_t dim, std::size_t degree) : dim_(dim), degree_(degree) {}

  static KForm function(const Poly& f) {
    KForm w(f.dim(), 0);
    w.add_term(MultiIndex{}, f);
    return w;
  }

  static KForm dx(std::size_t dim, std::size_t i) {
    KForm w(dim, 1);
    w.add_term(MultiIndex{static_cast<std::uint16_t>(i)}, Poly::constant(dim, C(1)));
    return w;
  }

  static KForm basis(std::size_t dim, MultiIndex idx, const C& c = C(1)) {
    KForm w(dim, idx.size());
    w.add_term(std::move(idx), Poly::constant(dim, c));
    return w;
  }

  std::size_t dim() const { return dim_; }
  std::size_t degree() const { return degree_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds coeff * dx_idx; `idx` may be unsorted (sign tracked) or repeated
  /// (ignored).
  void add_term(MultiIndex idx, const Poly& coeff) {
    if (idx.size() != degree_) throw std::invalid_argument("KForm: multi-index length mismatch");
    if (coeff.dim() != dim_) throw std::invalid_argument("KForm: coefficient dimension mismatch");
    for (auto i : idx) {
      if (i >= dim_) throw std::out_of_range("KForm: coordinate index out of range");
    }
    const int s = canonicalize(idx);
    if (s == 0 || coeff.is_zero()) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      terms_.emplace(std::move(idx), s > 0 ? coeff : -coeff);
      return;
    }
    if (s > 0) {
      it->second += coeff;
    } else {
      it->second -= coeff;
    }
    if (it->second.is_zero()) terms_.erase(it);
  }

  /// Adds s * coeff * dx_idx for a sorted index.
  void add_scaled(const MultiIndex& idx, const C& s, const Poly& coeff) {
    if (hkt::is_zero(s) || coeff.is_zero()) return;
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      terms_.emplace(idx, coeff * s);
      return;
    }
    it->second.add_scaled(s, coeff);
    if (it->second.is_zero()) terms_.erase(it);
  }

  Poly component(const MultiIndex& idx) const {
    MultiIndex sorted = idx;
    const int s = canonicalize(sorted);
    if (s == 0) return Poly(dim_);
    auto it = terms_.find(sorted);
    if (it == terms_.end()) return Poly(dim_);
    return s > 0 ? it->second : -it->second;
  }

  KForm& operator+=(const KForm& o) {
    check_compatible(o);
    for (const auto& [idx, p] : o.terms_) add_scaled(idx, C(1), p);
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    check_compatible(o);
    for (const auto& [idx, p] : o.terms_) add_scaled(idx, C(-1), p);
    return *this;
  }
  KForm& operator*=(const C& s) {
    if (hkt::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [idx, p] : terms_) p *= s;
    return *this;
  }
  KForm& operator*=(const Poly& f) {
    if (f.dim() != dim_) throw std::invalid_argument("KForm: coefficient dimension mismatch");
    TermMap out;
    for (auto& [idx, p] : terms_) {
      Poly q = p * f;
      if (!q.is_zero()) out.emplace(idx, std::move(q));
    }
    terms_ = std::move(out);
    return *this;
  }

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator-(KForm a) { return a *= C(-1); }
  friend KForm operator*(KForm a, const C& s) { return a *= s; }
  friend KForm operator*(const C& s, KForm a) { return a *= s; }
  friend KForm operator*(const Poly& f, KForm a) { return a *= f; }

  friend bool operator==(const KForm& a, const KForm& b) {
    return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  /// Total number of nonzero monomial terms across all components.
  std::size_t term_count() const {
    std::size_t n = 0;
    for (const auto& [idx, p] : terms_) n += p.size();
    return n;
  }

  std::size_t height_bits() const {
    std::size_t h = 0;
    for (const auto& [idx, p] : terms_) h = std::max(h, p.height_bits());
    return h;
  }

  int max_poly_degree() const {
    int d = -1;
    for (const auto& [idx, p] : terms_) d = std::max(d, p.degree());
    return d;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, p] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << p.str() << ")";
      for (auto i : idx) os << " dx" << i;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const KForm& w) { return os << w.str(); }

 private:
  void check_compatible(const KForm& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("KForm: dimension mismatch");
    if (o.degree_ != degree_) throw std::invalid_argument("KForm: degree mismatch");
  }

  std::size_t dim_ = 0;
  std::size_t degree_ = 0;
  TermMap terms_;
};

using RealForm = KForm<Rational>;
using ComplexForm = KForm<GaussianRational>;

/// Exterior product.  Degrees beyond the dimension give the canonical zero
/// form of degree k(a) + k(b).
template <ExactField C>
KForm<C> wedge(const KForm<C>& a, const KForm<C>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  KForm<C> out(a.dim(), a.degree() + b.degree());
  if (out.degree() > out.dim()) return out;
  for (const auto& [ia, pa] : a.terms()) {
    for (const auto& [ib, pb] : b.terms()) {
      MultiIndex idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      const int s = canonicalize(idx);
      if (s == 0) continue;
      out.add_scaled(idx, C(s), pa * pb);
    }
  }
  return out;
}

/// Exterior derivative.  The derivative of a top-degree form is the zero
/// form of degree dim + 1.
template <ExactField C>
KForm<C> ext_d(const KForm<C>& w) {
  KForm<C> out(w.dim(), w.degree() + 1);
  if (w.degree() >= w.dim()) return out;
  for (const auto& [idx, p] : w.terms()) {
    for (std::size_t i = 0; i < w.dim(); ++i) {
      if (std::find(idx.begin(), idx.end(), i) != idx.end()) continue;
      Polynomial<C> dp = partial(p, i);
      if (dp.is_zero()) continue;
      MultiIndex j;
      j.reserve(idx.size() + 1);
      j.push_back(static_cast<std::uint16_t>(i));
      j.insert(j.end(), idx.begin(), idx.end());
      const int s = canonicalize(j);
      out.add_scaled(j, C(s), dp);
    }
  }
  return out;
}

namespace detail {

/// Constant-coefficient alternating tensor used for basis pullbacks.
using ConstForm = std::map<MultiIndex, Rational>;

inline ConstForm const_wedge_1form(const ConstForm& a, const std::vector<std::pair<std::uint16_t, Rational>>& row) {
  ConstForm out;
  for (const auto& [idx, c] : a) {
    for (const auto& [j, v] : row) {
      MultiIndex n = idx;
      n.push_back(j);
      const int s = canonicalize(n);
      if (s == 0) continue;
      auto& slot = out[n];
      slot += s > 0 ? c * v : -(c * v);
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  }
  return out;
}

/// A^*(dx_idx) = (A^* dx_{i1}) ^ ... ^ (A^* dx_{ik}),  A^* dx_i = sum_j A_ij dx_j.
inline ConstForm pullback_basis(const RationalMatrix& a, const MultiIndex& idx) {
  ConstForm acc{{MultiIndex{}, Rational(1)}};
  for (auto i : idx) {
    std::vector<std::pair<std::uint16_t, Rational>> row;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!a(i, j).is_zero()) row.emplace_back(static_cast<std::uint16_t>(j), a(i, j));
    }
    acc = const_wedge_1form(acc, row);
  }
  return acc;
}

}  // namespace detail

/// p(A x) for a constant square matrix A.
template <ExactField C>
Polynomial<C> compose_linear(const Polynomial<C>& p, const RationalMatrix& a) {
  const std::size_t n = p.dim();
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("compose_linear: dimension mismatch");
  std::vector<Polynomial<C>> lin(n, Polynomial<C>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j).is_zero()) continue;
      Monomial m(n);
      m[j] = 1;
      if constexpr (is_gaussian_v<C>) {
        lin[i].add_term(m, promote(a(i, j)));
      } else {
        lin[i].add_term(m, a(i, j));
      }
    }
  }
  std::vector<std::vector<Polynomial<C>>> powers(n);
  auto power = [&](std::size_t i, std::uint32_t e) -> const Polynomial<C>& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(Polynomial<C>::constant(n, C(1)));
    while (pw.size() <= e) pw.push_back(pw.back() * lin[i]);
    return pw[e];
  };
  Polynomial<C> out(n);
  for (const auto& [m, c] : p.terms()) {
    Polynomial<C> t = Polynomial<C>::constant(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i] != 0) t *= power(i, m[i]);
    }
    out += t;
  }
  return out;
}

enum class PullbackMode {
  /// Acts on the form slots only: (A*w)_x(X...) = w_x(AX, ...).  Structure
  /// actions use this mode.
  slots_only,
  /// Genuine pullback by x -> Ax: coefficients are also composed with A.
  compose_coefficients,
};

/// (A*w)(X1..Xk) = w(AX1..AXk).
template <ExactField C>
KForm<C> pullback_linear(const RationalMatrix& a, const KForm<C>& w,
                         PullbackMode mode = PullbackMode::slots_only) {
  if (a.rows() != w.dim() || a.cols() != w.dim()) {
    throw std::invalid_argument("pullback_linear: dimension mismatch");
  }
  KForm<C> out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) {
    const Polynomial<C> coeff = mode == PullbackMode::compose_coefficients ? compose_linear(p, a) : p;
    for (const auto& [j, c] : detail::pullback_basis(a, idx)) {
      if constexpr (is_gaussian_v<C>) {
        out.add_scaled(j, promote(c), coeff);
      } else {
        out.add_scaled(j, c, coeff);
      }
    }
  }
  return out;
}

template <ExactField C>
KForm<C> pullback_linear(const RationalMatrix& a, const KForm<C>& w, bool compose_coefficients) {
  return pullback_linear(a, w, compose_coefficients ? PullbackMode::compose_coefficients
                                                    : PullbackMode::slots_only);
}

// ---------------------------------------------------------------------------
// Conversions between coefficient fields.

inline ComplexForm promote(const RealForm& w) {
  ComplexForm out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) out.add_term(idx, promote(p));
  return out;
}

inline RealForm real_part(const ComplexForm& w) {
  RealForm out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) out.add_term(idx, real_part(p));
  return out;
}

inline RealForm imag_part(const ComplexForm& w) {
  RealForm out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) out.add_term(idx, imag_part(p));
  return out;
}

inline ComplexForm conj(const ComplexForm& w) {
  ComplexForm out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) out.add_term(idx, conj(p));
  return out;
}

// ---------------------------------------------------------------------------
// Constant forms as coefficient vectors in the fiber_basis ordering.

inline std::vector<Rational> to_fiber_vector(const RealForm& w) {
  const auto basis = fiber_basis(w.dim(), w.degree());
  std::vector<Rational> v(basis.size());
  for (const auto& [idx, p] : w.terms()) {
    if (!p.is_constant()) throw std::invalid_argument("to_fiber_vector: form has non-constant coefficients");
    const auto it = std::lower_bound(basis.begin(), basis.end(), idx);
    v[static_cast<std::size_t>(it - basis.begin())] = p.constant_term();
  }
  return v;
}

inline RealForm from_fiber_vector(std::size_t dim, std::size_t k, const std::vector<Rational>& v) {
  const auto basis = fiber_basis(dim, k);
  if (v.size() != basis.size()) throw std::invalid_argument("from_fiber_vector: length mismatch");
  RealForm w(dim, k);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_zero()) w.add_term(basis[i], RationalPolynomial::constant(dim, v[i]));
  }
  return w;
}

/// Matrix (in the fiber basis) of a linear map on constant k-forms.
template <class Fn>
RationalMatrix fiber_operator_matrix(std::size_t dim, std::size_t k, Fn&& op) {
  const auto basis = fiber_basis(dim, k);
  RationalMatrix m(basis.size(), basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const RealForm image = op(RealForm::basis(dim, basis[c]));
    const auto col = to_fiber_vector(image);
    for (std::size_t r = 0; r < col.size(); ++r) m(r, c) = col[r];
  }
  return m;
}

/// Applies a fiber matrix coefficient-wise to a polynomial form.
template <ExactField C>
KForm<C> apply_fiber_matrix(const RationalMatrix& m, const KForm<C>& w) {
  const auto basis = fiber_basis(w.dim(), w.degree());
  if (m.cols() != basis.size()) throw std::invalid_argument("apply_fiber_matrix: size mismatch");
  KForm<C> out(w.dim(), w.degree());
  for (const auto& [idx, p] : w.terms()) {
    const auto c = static_cast<std::size_t>(std::lower_bound(basis.begin(), basis.end(), idx) - basis.begin());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (m(r, c).is_zero()) continue;
      if constexpr (is_gaussian_v<C>) {
        out.add_scaled(basis[r], promote(m(r, c)), p);
      } else {
        out.add_scaled(basis[r], m(r, c), p);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation.

template <class T>
struct AlternatingValue {
  std::size_t degree = 0;
  std::map<MultiIndex, T> components;

  T at(const MultiIndex& idx) const {
    auto it = components.find(idx);
    return it == components.end() ? T(0) : it->second;
  }
};

template <ExactField C>
AlternatingValue<C> form_eval(const KForm<C>& w, std::span<const C> pt) {
  if (pt.size() != w.dim()) throw std::invalid_argument("form_eval: point length mismatch");
  AlternatingValue<C> out{w.degree(), {}};
  for (const auto& [idx, p] : w.terms()) {
    C v = evaluate(p, pt);
    if (!hkt::is_zero(v)) out.components.emplace(idx, std::move(v));
  }
  return out;
}

inline AlternatingValue<double> form_eval(const RealForm& w, std::span<const double> pt) {
  if (pt.size() != w.dim()) throw std::invalid_argument("form_eval: point length mismatch");
  AlternatingValue<double> out{w.degree(), {}};
  for (const auto& [idx, p] : w.terms()) out.components.emplace(idx, evaluate(p, pt));
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric / general bilinear forms with polynomial entries.

class BilinearForm {
 public:
  BilinearForm() = default;
  BilinearForm(std::size_t dim, bool symmetric)
      : dim_(dim), symmetric_(symmetric), entries_(dim * dim, RationalPolynomial(dim)) {}

  static BilinearForm identity(std::size_t dim) {
    BilinearForm b(dim, true);
    for (std::size_t i = 0; i < dim; ++i) b.set(i, i, RationalPolynomial::constant(dim, Rational(1)));
    return b;
  }

  /// Constant bilinear form from a rational matrix; flagged symmetric when it is.
  static BilinearForm from_matrix(const RationalMatrix& m) {
    BilinearForm b(m.rows(), m == m.transpose());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        b.entries_[i * b.dim_ + j] = RationalPolynomial::constant(b.dim_, m(i, j));
      }
    }
    return b;
  }

  std::size_t dim() const { return dim_; }
  bool symmetric() const { return symmetric_; }
  const RationalPolynomial& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  /// Sets entry (i, j), mirrored to (j, i) when the form is symmetric.
  void set(std::size_t i, std::size_t j, const RationalPolynomial& p) {
    if (p.dim() != dim_) throw std::invalid_argument("BilinearForm: entry dimension mismatch");
    entries_[i * dim_ + j] = p;
    if (symmetric_) entries_[j * dim_ + i] = p;
  }

  bool is_symmetric_exact() const {
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i + 1; j < dim_; ++j) {
        if (!((*this)(i, j) == (*this)(j, i))) return false;
      }
    }
    return true;
  }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& p) { return p.is_zero(); });
  }

  bool is_constant() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& p) { return p.is_constant(); });
  }

  RationalMatrix evaluate_at(std::span<const Rational> pt) const {
    RationalMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = evaluate((*this)(i, j), pt);
    }
    return m;
  }

  std::vector<double> evaluate_at(std::span<const double> pt) const {
    std::vector<double> m(dim_ * dim_);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) m[i] = evaluate(entries_[i], pt);
    return m;
  }

  /// A^T b A with a constant matrix A.
  BilinearForm congruence(const RationalMatrix& a) const {
    if (a.rows() != dim_ || a.cols() != dim_) throw std::invalid_argument("BilinearForm: dimension mismatch");
    BilinearForm out(dim_, false);
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        RationalPolynomial acc(dim_);
        for (std::size_t k = 0; k < dim_; ++k) {
          if (a(k, i).is_zero()) continue;
          for (std::size_t l = 0; l < dim_; ++l) {
            if (a(l, j).is_zero()) continue;
            acc.add_scaled(a(k, i) * a(l, j), (*this)(k, l));
          }
        }
        out.entries_[i * dim_ + j] = std::move(acc);
      }
    }
    out.symmetric_ = out.is_symmetric_exact();
    return out;
  }

  BilinearForm& operator+=(const BilinearForm& o) {
    check(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
    symmetric_ = symmetric_ && o.symmetric_;
    return *this;
  }
  BilinearForm& operator-=(const BilinearForm& o) {
    check(o);
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
    symmetric_ = symmetric_ && o.symmetric_;
    return *this;
  }
  BilinearForm& operator*=(const Rational& s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }
  BilinearForm& operator*=(const RationalPolynomial& f) {
    for (auto& e : entries_) e = e * f;
    return *this;
  }

  friend BilinearForm operator+(BilinearForm a, const BilinearForm& b) { return a += b; }
  friend BilinearForm operator-(BilinearForm a, const BilinearForm& b) { return a -= b; }
  friend BilinearForm operator*(BilinearForm a, const Rational& s) { return a *= s; }
  friend BilinearForm operator*(const Rational& s, BilinearForm a) { return a *= s; }
  friend BilinearForm operator*(const RationalPolynomial& f, BilinearForm a) { return a *= f; }

  /// Entry-wise equality; the symmetry flag is not compared.
  friend bool operator==(const BilinearForm& a, const BilinearForm& b) {
    return a.dim_ == b.dim_ && a.entries_ == b.entries_;
  }

 private:
  void check(const BilinearForm& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("BilinearForm: dimension mismatch");
  }

  std::size_t dim_ = 0;
  bool symmetric_ = false;
  std::vector<RationalPolynomial> entries_;
};

/// Coordinate Hessian; on the flat model this is the iterated Obata derivative.
inline BilinearForm hessian(const RationalPolynomial& f) {
  BilinearForm h(f.dim(), true);
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const RationalPolynomial fi = partial(f, i);
    for (std::size_t j = i; j < f.dim(); ++j) h.set(i, j, partial(fi, j));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Random forms for property batteries.

/// Random k-form with `components` randomly chosen basis slots, each carrying a
/// random polynomial of degree <= max_degree with `terms` terms.
inline RealForm random_form(Rng& rng, std::size_t dim, std::size_t k, unsigned max_degree,
                            unsigned terms, unsigned components) {
  RealForm w(dim, k);
  if (k > dim) return w;
  const auto basis = fiber_basis(dim, k);
  for (unsigned c = 0; c < components; ++c) {
    const auto& idx = basis[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<long>(basis.size()) - 1))];
    w.add_term(idx, random_polynomial(rng, dim, max_degree, terms));
  }
  return w;
}

}  // namespace hkt
