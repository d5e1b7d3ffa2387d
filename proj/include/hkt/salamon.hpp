#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "hkt/quaternionic.hpp"

namespace hkt {

/// Exact subspace of a fibre Lambda^k, spanned by the columns of `basis`
/// (coordinates in the fiber_basis ordering).
struct FiberSubspace {
  std::size_t degree = 0;
  RationalMatrix basis;

  std::size_t ambient_dim() const { return basis.rows(); }
  std::size_t dimension() const { return basis.cols(); }
};

/// The bilinearized conditions cutting out B^k: for phi in B^k,
///   S(I,I)phi = phi, S(J,J)phi = phi, S(K,K)phi = phi,
///   S(I,J)phi = 0,   S(J,K)phi = 0,   S(K,I)phi = 0.
/// On k = 2 the first three reduce to the slots-only fixed-point conditions
/// and the mixed three follow from them.
inline std::vector<RationalMatrix> bundle_B_conditions(const HypercomplexModel& model, std::size_t k) {
  const std::size_t dim = model.dim();
  const RationalMatrix id = RationalMatrix::identity(fiber_basis(dim, k).size());
  auto s = [&](const RationalMatrix& a, const RationalMatrix& b) {
    return fiber_operator_matrix(dim, k, [&](const RealForm& w) { return slot_pair_insertion(a, b, w); });
  };
  return {s(model.I(), model.I()) - id, s(model.J(), model.J()) - id, s(model.K(), model.K()) - id,
          s(model.I(), model.J()),      s(model.J(), model.K()),      s(model.K(), model.I())};
}

/// The condition S(A,A)phi = phi for a single structure A of the sphere.
inline RationalMatrix sphere_point_condition(const HypercomplexModel& model, std::size_t k, const SpherePoint& p) {
  const std::size_t dim = model.dim();
  const RationalMatrix a = model.combination(p);
  return fiber_operator_matrix(dim, k, [&](const RealForm& w) { return slot_pair_insertion(a, a, w); }) -
         RationalMatrix::identity(fiber_basis(dim, k).size());
}

/// B^k, the intersection over the sphere of the mixed-type forms, for k = 2, 3.
/// Additional sphere points contribute extra conditions (used to certify that
/// the six bilinearized conditions already span).
inline FiberSubspace bundle_B(const HypercomplexModel& model, std::size_t k,
                              const std::vector<SpherePoint>& extra_points = {}) {
  if (k != 2 && k != 3) throw std::invalid_argument("bundle_B: k must be 2 or 3");
  RationalMatrix stacked;
  for (const auto& c : bundle_B_conditions(model, k)) stacked = stacked.vstack(c);
  for (const auto& p : extra_points) stacked = stacked.vstack(sphere_point_condition(model, k, p));
  return {k, null_space(stacked)};
}

/// Cached fibre projectors eta: Lambda^k -> A^k for k = 2, 3, orthogonal with
/// respect to the flat inner product in which the dx_I are orthonormal.
/// Built eagerly; read-only afterwards.
class ProjectorTable {
 public:
  explicit ProjectorTable(HypercomplexModel model) : model_(std::move(model)) {
    const std::size_t dim = model_.dim();
    for (std::size_t k : {std::size_t{2}, std::size_t{3}}) {
      FiberSubspace b = bundle_B(model_, k);
      const std::size_t ambient = fiber_basis(dim, k).size();
      eta_.emplace(k, RationalMatrix::identity(ambient) - column_span_projector(b.basis));
      bundles_.emplace(k, std::move(b));
    }
  }

  const HypercomplexModel& model() const { return model_; }

  const RationalMatrix& eta_matrix(std::size_t k) const {
    auto it = eta_.find(k);
    if (it == eta_.end()) throw std::invalid_argument("ProjectorTable: no projector for this degree");
    return it->second;
  }

  const FiberSubspace& bundle(std::size_t k) const {
    auto it = bundles_.find(k);
    if (it == bundles_.end()) throw std::invalid_argument("ProjectorTable: no bundle for this degree");
    return it->second;
  }

 private:
  HypercomplexModel model_;
  std::map<std::size_t, RationalMatrix> eta_;
  std::map<std::size_t, FiberSubspace> bundles_;
};

/// Pointwise projection onto A^k.  A^0 = Lambda^0 and A^1 = Lambda^1.
template <ExactField C>
KForm<C> eta(const ProjectorTable& table, const KForm<C>& w) {
  if (w.dim() != table.model().dim()) throw std::invalid_argument("eta: dimension mismatch");
  if (w.degree() <= 1) return w;
  if (w.degree() > 3) throw std::invalid_argument("eta: degree > 3 is unsupported");
  return apply_fiber_matrix(table.eta_matrix(w.degree()), w);
}

/// Closed-form projector on 2-forms: (1 - I)w/2 + (1 + I)(1 - J)w/4, with
/// the slots-only actions.  Equals the (2,0) + (0,2) part plus the
/// J-anti-invariant half of the (1,1) part.
template <ExactField C>
KForm<C> eta_closed_form(const HypercomplexModel& model, const KForm<C>& w) {
  if (w.degree() != 2) throw std::invalid_argument("eta_closed_form: expected a 2-form");
  const auto i = model.op_I();
  const auto j = model.op_J();
  const KForm<C> w_i = act_slots(i, w);
  KForm<C> out = (w - w_i) * C(Rational(1, 2));
  KForm<C> u = w + w_i;
  u -= act_slots(j, u);
  out += u * C(Rational(1, 4));
  return out;
}

/// Salamon differential D = eta o d on forms of degree <= 2.
template <ExactField C>
KForm<C> salamon_D(const ProjectorTable& table, const KForm<C>& w) {
  if (w.degree() > 2) throw std::invalid_argument("salamon_D: degree > 2 is unsupported");
  return eta(table, ext_d(w));
}

/// D on 1-forms via the explicit type formula
/// (dtheta)^{2,0} + (dtheta)^{0,2} + ((dtheta)^{1,1} - J(dtheta)^{1,1}) / 2.
template <ExactField C>
KForm<C> salamon_D_closed_form(const HypercomplexModel& model, const KForm<C>& theta) {
  if (theta.degree() != 1) throw std::invalid_argument("salamon_D_closed_form: expected a 1-form");
  return eta_closed_form(model, ext_d(theta));
}

/// D_I = (-1)^k I D I.
template <ExactField C>
KForm<C> salamon_DI(const ProjectorTable& table, const KForm<C>& w) {
  if (w.degree() > 2) throw std::invalid_argument("salamon_DI: degree > 2 is unsupported");
  const auto i = table.model().op_I();
  KForm<C> out = act(i, salamon_D(table, act(i, w)));
  if (w.degree() % 2 == 1) out *= C(-1);
  return out;
}

struct Salamon11Check {
  bool holds = false;
  RealForm residual_I;  ///< I w - w
  RealForm residual_J;  ///< J w + w
  RealForm residual_K;  ///< K w + w
};

/// Salamon (1,1) test: I w = w and J w = -w (slots-only actions on 2-forms).
inline Salamon11Check is_salamon_11(const HypercomplexModel& model, const RealForm& w) {
  if (w.degree() != 2) throw std::invalid_argument("is_salamon_11: expected a 2-form");
  Salamon11Check out;
  out.residual_I = act_slots(model.op_I(), w) - w;
  out.residual_J = act_slots(model.op_J(), w) + w;
  out.residual_K = act_slots(model.op_K(), w) + w;
  out.holds = out.residual_I.is_zero() && out.residual_J.is_zero();
  if (out.holds && !out.residual_K.is_zero()) {
    throw std::logic_error("is_salamon_11: K-residual nonzero although I- and J-conditions hold");
  }
  return out;
}

/// Projection (1 + I)(1 - J)/4 onto A^{1,1}.
template <ExactField C>
KForm<C> salamon_11_part(const HypercomplexModel& model, const KForm<C>& w) {
  if (w.degree() != 2) throw std::invalid_argument("salamon_11_part: expected a 2-form");
  KForm<C> u = w - act_slots(model.op_J(), w);
  u += act_slots(model.op_I(), u);
  return u * C(Rational(1, 4));
}

/// Fibre of A^{1,1} as an exact subspace of Lambda^2.
inline FiberSubspace a11_subspace(const HypercomplexModel& model) {
  const std::size_t dim = model.dim();
  const RationalMatrix id = RationalMatrix::identity(fiber_basis(dim, 2).size());
  const auto i = model.op_I();
  const auto j = model.op_J();
  const RationalMatrix ci = fiber_operator_matrix(dim, 2, [&](const RealForm& w) { return act_slots(i, w); }) - id;
  const RationalMatrix cj = fiber_operator_matrix(dim, 2, [&](const RealForm& w) { return act_slots(j, w); }) + id;
  return {2, null_space(ci.vstack(cj))};
}

}  // namespace hkt
