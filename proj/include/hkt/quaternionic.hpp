#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "hkt/kform.hpp"

namespace hkt {

/// Point (a, b, c) of the unit sphere with exact rational coordinates.
class SpherePoint {
 public:
  SpherePoint(Rational a, Rational b, Rational c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_ * a_ + b_ * b_ + c_ * c_ != Rational(1)) {
      throw std::invalid_argument("SpherePoint: a^2 + b^2 + c^2 != 1");
    }
  }

  static SpherePoint i() { return {1, 0, 0}; }
  static SpherePoint j() { return {0, 1, 0}; }
  static SpherePoint k() { return {0, 0, 1}; }

  /// Inverse stereographic projection from the south pole; every rational
  /// point of S^2 other than (0, 0, 1) arises this way.
  static SpherePoint from_stereographic(const Rational& u, const Rational& v) {
    const Rational s = u * u + v * v;
    const Rational den = s + Rational(1);
    return {Rational(2) * u / den, Rational(2) * v / den, (s - Rational(1)) / den};
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  const Rational& c() const { return c_; }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  Rational a_, b_, c_;
};

/// The six points whose quadratic conditions determine a quadratic form in
/// (a, b, c) on the sphere: the three axes and one mixed point per plane.
inline std::vector<SpherePoint> bilinearization_witnesses() {
  return {SpherePoint::i(),
          SpherePoint::j(),
          SpherePoint::k(),
          {Rational(3, 5), Rational(4, 5), 0},
          {0, Rational(3, 5), Rational(4, 5)},
          {Rational(4, 5), 0, Rational(3, 5)}};
}

/// Random rational sphere points with all three coordinates nonzero.
inline std::vector<SpherePoint> random_sphere_points(Rng& rng, std::size_t count) {
  std::vector<SpherePoint> out;
  while (out.size() < count) {
    const Rational u(uniform_int(rng, -7, 7), uniform_int(rng, 1, 4));
    const Rational v(uniform_int(rng, -7, 7), uniform_int(rng, 1, 4));
    SpherePoint p = SpherePoint::from_stereographic(u, v);
    if (p.a().is_zero() || p.b().is_zero() || p.c().is_zero()) continue;
    out.push_back(std::move(p));
  }
  return out;
}

/// A structure aI + bJ + cK of the model, squared to -Id at construction.
class StructureOperator {
 public:
  StructureOperator(RationalMatrix m, SpherePoint p, int n) : matrix_(std::move(m)), point_(std::move(p)), n_(n) {
    if (matrix_ * matrix_ != -RationalMatrix::identity(matrix_.rows())) {
      throw std::logic_error("StructureOperator: operator does not square to -Id");
    }
  }

  const RationalMatrix& matrix() const { return matrix_; }
  const SpherePoint& point() const { return point_; }
  int n() const { return n_; }
  std::size_t dim() const { return matrix_.rows(); }

 private:
  RationalMatrix matrix_;
  SpherePoint point_;
  int n_;
};

/// Flat hypercomplex model R^{4n} = H^n with I, J, K acting by left
/// multiplication by i, j, k on each quaternionic coordinate
/// q = x0 + x1 i + x2 j + x3 k.
class HypercomplexModel {
 public:
  static HypercomplexModel standard(int n) {
    if (n < 1) throw std::invalid_argument("HypercomplexModel: n must be >= 1");
    HypercomplexModel m;
    m.n_ = n;
    const std::size_t dim = 4 * static_cast<std::size_t>(n);
    m.i_ = RationalMatrix(dim, dim);
    m.j_ = RationalMatrix(dim, dim);
    m.k_ = RationalMatrix(dim, dim);
    // Column c is the image of e_c.
    // L_i: e0->e1, e1->-e0, e2->e3, e3->-e2
    // L_j: e0->e2, e1->-e3, e2->-e0, e3->e1
    // L_k: e0->e3, e1->e2, e2->-e1, e3->-e0
    struct Entry {
      int row, col, val;
    };
    constexpr std::array<Entry, 4> li{{{1, 0, 1}, {0, 1, -1}, {3, 2, 1}, {2, 3, -1}}};
    constexpr std::array<Entry, 4> lj{{{2, 0, 1}, {3, 1, -1}, {0, 2, -1}, {1, 3, 1}}};
    constexpr std::array<Entry, 4> lk{{{3, 0, 1}, {2, 1, 1}, {1, 2, -1}, {0, 3, -1}}};
    for (int b = 0; b < n; ++b) {
      const auto o = static_cast<std::size_t>(4 * b);
      for (const auto& e : li) m.i_(o + e.row, o + e.col) = e.val;
      for (const auto& e : lj) m.j_(o + e.row, o + e.col) = e.val;
      for (const auto& e : lk) m.k_(o + e.row, o + e.col) = e.val;
    }
    return m;
  }

  int n() const { return n_; }
  std::size_t dim() const { return 4 * static_cast<std::size_t>(n_); }
  const RationalMatrix& I() const { return i_; }
  const RationalMatrix& J() const { return j_; }
  const RationalMatrix& K() const { return k_; }

  RationalMatrix combination(const SpherePoint& p) const { return p.a() * i_ + p.b() * j_ + p.c() * k_; }

  StructureOperator structure(const SpherePoint& p) const { return {combination(p), p, n_}; }
  StructureOperator op_I() const { return structure(SpherePoint::i()); }
  StructureOperator op_J() const { return structure(SpherePoint::j()); }
  StructureOperator op_K() const { return structure(SpherePoint::k()); }

 private:
  HypercomplexModel() = default;
  int n_ = 0;
  RationalMatrix i_, j_, k_;
};

inline StructureOperator sphere_operator(const HypercomplexModel& model, const SpherePoint& p) {
  return model.structure(p);
}

// ---------------------------------------------------------------------------
// Actions on forms.

/// Signed action on k-forms: (Iw)(X1..Xk) = (-1)^k w(IX1..IXk).
template <ExactField C>
KForm<C> act(const StructureOperator& op, const KForm<C>& w) {
  if (op.dim() != w.dim()) throw std::invalid_argument("act: dimension mismatch");
  KForm<C> out = pullback_linear(op.matrix(), w, PullbackMode::slots_only);
  if (w.degree() % 2 == 1) out *= C(-1);
  return out;
}

/// Unsigned action w -> w(I., ..., I.).
template <ExactField C>
KForm<C> act_slots(const StructureOperator& op, const KForm<C>& w) {
  if (op.dim() != w.dim()) throw std::invalid_argument("act_slots: dimension mismatch");
  return pullback_linear(op.matrix(), w, PullbackMode::slots_only);
}

/// d_I w = (-1)^k I d I w.
template <ExactField C>
KForm<C> twisted_d(const StructureOperator& op, const KForm<C>& w) {
  KForm<C> out = act(op, ext_d(act(op, w)));
  if (w.degree() % 2 == 1) out *= C(-1);
  return out;
}

/// b -> b(I., I.) = I^T b I.
inline BilinearForm act_bilinear(const StructureOperator& op, const BilinearForm& b) {
  if (op.dim() != b.dim()) throw std::invalid_argument("act_bilinear: dimension mismatch");
  if (!b.symmetric()) throw std::invalid_argument("act_bilinear: bilinear form must be symmetric");
  return b.congruence(op.matrix());
}

namespace detail {

inline std::vector<std::pair<std::uint16_t, Rational>> pulled_row(const RationalMatrix& a, std::uint16_t i) {
  std::vector<std::pair<std::uint16_t, Rational>> row;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (!a(i, j).is_zero()) row.emplace_back(static_cast<std::uint16_t>(j), a(i, j));
  }
  return row;
}

/// Sums, over ordered choices of distinct slots r (for `a`) and q (for `b`),
/// the basis form with the pulled-back rows inserted.  A zero slot count
/// means the matrix is not inserted.
template <ExactField C>
void accumulate_slot_insertions(const KForm<C>& w, std::size_t slot_count_a, std::size_t slot_count_b,
                                const RationalMatrix* a, const RationalMatrix* b, const Rational& weight,
                                KForm<C>& out) {
  const std::size_t k = w.degree();
  for (const auto& [idx, p] : w.terms()) {
    std::map<MultiIndex, Rational> acc_total;
    // Enumerate ordered choices of (slot for a) and (slot for b), distinct.
    for (std::size_t r = 0; r < (slot_count_a ? k : 1); ++r) {
      for (std::size_t q = 0; q < (slot_count_b ? k : 1); ++q) {
        if (slot_count_a && slot_count_b && r == q) continue;
        ConstForm acc{{MultiIndex{}, Rational(1)}};
        for (std::size_t t = 0; t < k; ++t) {
          std::vector<std::pair<std::uint16_t, Rational>> row;
          if (slot_count_a && t == r) {
            row = pulled_row(*a, idx[t]);
          } else if (slot_count_b && t == q) {
            row = pulled_row(*b, idx[t]);
          } else {
            row.emplace_back(idx[t], Rational(1));
          }
          acc = const_wedge_1form(acc, row);
        }
        for (const auto& [j, c] : acc) acc_total[j] += c;
      }
    }
    for (const auto& [j, c] : acc_total) {
      const Rational s = c * weight;
      if (s.is_zero()) continue;
      if constexpr (is_gaussian_v<C>) {
        out.add_scaled(j, promote(s), p);
      } else {
        out.add_scaled(j, s, p);
      }
    }
  }
}

}  // namespace detail

/// Sum over slots of w with A inserted in that slot:
/// sum_s w(X1, .., A Xs, .., Xk).  This is the derivation extension of A.
template <ExactField C>
KForm<C> slot_derivation(const RationalMatrix& a, const KForm<C>& w) {
  KForm<C> out(w.dim(), w.degree());
  if (w.degree() == 0) return out;
  detail::accumulate_slot_insertions<C>(w, 1, 0, &a, nullptr, Rational(1), out);
  return out;
}

/// S(A, B)w = 1/2 sum over ordered pairs of distinct slots (s, t) of w with A
/// in slot s and B in slot t.  S(I, I) is the two-slot insertion sum
/// w(IU, IV, W) + w(IU, V, IW) + w(U, IV, IW) on 3-forms.
template <ExactField C>
KForm<C> slot_pair_insertion(const RationalMatrix& a, const RationalMatrix& b, const KForm<C>& w) {
  KForm<C> out(w.dim(), w.degree());
  if (w.degree() < 2) return out;
  detail::accumulate_slot_insertions<C>(w, 1, 1, &a, &b, Rational(1, 2), out);
  return out;
}

enum class TypePart { p20, p02, p30, p03 };

/// (p, q)-component with respect to the structure `op`, for 2- and 3-forms.
///
/// 2-forms: rho = (w - w(I., I.)) / 2 is the (2,0)+(0,2) part and
/// w^{0,2} = (rho + i T rho) / 2 with (T rho)(X, Y) = rho(IX, Y).
/// 3-forms: psi = (w - S(I, I)w) / 4 and w^{0,3} = (psi + i T psi) / 2.
/// The (2,0) / (3,0) parts take -i in place of i.  All steps are C-linear,
/// so complex inputs are accepted.
inline ComplexForm complex_type_part(const StructureOperator& op, const ComplexForm& w, TypePart part) {
  if (op.dim() != w.dim()) throw std::invalid_argument("complex_type_part: dimension mismatch");
  const bool two = part == TypePart::p20 || part == TypePart::p02;
  const std::size_t k = two ? 2 : 3;
  if (w.degree() != k) throw std::invalid_argument("complex_type_part: form degree does not match requested part");
  const RationalMatrix& m = op.matrix();

  ComplexForm outer(w.dim(), k);
  if (two) {
    outer = (w - act_slots(op, w)) * GaussianRational(Rational(1, 2));
  } else {
    outer = (w - slot_pair_insertion(m, m, w)) * GaussianRational(Rational(1, 4));
  }
  ComplexForm t = slot_derivation(m, outer) * GaussianRational(Rational(1, static_cast<long>(k)));
  const bool holomorphic = part == TypePart::p20 || part == TypePart::p30;
  const GaussianRational i_coeff(0, holomorphic ? Rational(-1, 2) : Rational(1, 2));
  return outer * GaussianRational(Rational(1, 2)) + t * i_coeff;
}

inline ComplexForm complex_type_part(const StructureOperator& op, const RealForm& w, TypePart part) {
  return complex_type_part(op, promote(w), part);
}

/// Real (1,1) part of a 2-form: (w + w(I., I.)) / 2.
template <ExactField C>
KForm<C> real_11_part(const StructureOperator& op, const KForm<C>& w) {
  if (w.degree() != 2) throw std::invalid_argument("real_11_part: expected a 2-form");
  return (w + act_slots(op, w)) * C(Rational(1, 2));
}

}  // namespace hkt
