#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hkt/conventions.hpp"
#include "hkt/salamon.hpp"

namespace hkt {

/// A symmetric bilinear form with polynomial entries, invariant under I, J, K.
/// Degenerate or indefinite forms are allowed.
class HyperhermitianMetric {
 public:
  HyperhermitianMetric(HypercomplexModel model, BilinearForm g) : model_(std::move(model)), g_(std::move(g)) {
    if (g_.dim() != model_.dim()) throw std::invalid_argument("HyperhermitianMetric: dimension mismatch");
    if (!g_.is_symmetric_exact()) throw std::invalid_argument("HyperhermitianMetric: g is not symmetric");
    for (const auto& op : {model_.op_I(), model_.op_J(), model_.op_K()}) {
      if (!(g_.congruence(op.matrix()) == g_)) {
        throw std::invalid_argument("HyperhermitianMetric: g is not invariant under I, J and K");
      }
    }
  }

  static HyperhermitianMetric flat(const HypercomplexModel& model) {
    return {model, BilinearForm::identity(model.dim())};
  }

  static HyperhermitianMetric conformal(const HypercomplexModel& model, const RationalPolynomial& phi) {
    return {model, phi * BilinearForm::identity(model.dim())};
  }

  const HypercomplexModel& model() const { return model_; }
  const BilinearForm& g() const { return g_; }

 private:
  HypercomplexModel model_;
  BilinearForm g_;
};

/// F(X, Y) = g(AX, Y).
inline RealForm kahler_form(const HyperhermitianMetric& metric, const StructureOperator& op) {
  const BilinearForm& g = metric.g();
  const RationalMatrix& a = op.matrix();
  const std::size_t dim = g.dim();
  std::vector<RationalPolynomial> f(dim * dim, RationalPolynomial(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (a(c, i).is_zero()) continue;
      for (std::size_t j = 0; j < dim; ++j) f[i * dim + j].add_scaled(a(c, i), g(c, j));
    }
  }
  RealForm out(dim, 2);
  for (std::size_t i = 0; i < dim; ++i) {
    if (!f[i * dim + i].is_zero()) throw std::logic_error("kahler_form: result is not alternating");
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (!(f[i * dim + j] + f[j * dim + i]).is_zero()) throw std::logic_error("kahler_form: result is not alternating");
      out.add_term({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j)}, f[i * dim + j]);
    }
  }
  return out;
}

inline std::array<RealForm, 3> kahler_forms(const HyperhermitianMetric& metric) {
  const auto& m = metric.model();
  return {kahler_form(metric, m.op_I()), kahler_form(metric, m.op_J()), kahler_form(metric, m.op_K())};
}

/// g(X, Y) = -F(IX, Y), for F of Salamon type (1,1).
inline HyperhermitianMetric metric_from_form(const HypercomplexModel& model, const RealForm& f) {
  if (!is_salamon_11(model, f).holds) throw std::invalid_argument("metric_from_form: form is not of Salamon type (1,1)");
  const std::size_t dim = model.dim();
  const RationalMatrix& i_m = model.I();
  BilinearForm g(dim, true);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      RationalPolynomial acc(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        if (i_m(c, a).is_zero() || c == b) continue;
        const RationalPolynomial& fcb = f.component({static_cast<std::uint16_t>(std::min(c, b)),
                                                     static_cast<std::uint16_t>(std::max(c, b))});
        acc.add_scaled(c < b ? -i_m(c, a) : i_m(c, a), fcb);
      }
      g.set(a, b, acc);
    }
  }
  return {model, std::move(g)};
}

struct DefinitionCheck {
  bool holds = false;
  std::array<RealForm, 3> torsion_candidates;  ///< I dF_I, J dF_J, K dF_K
  RealForm residual_IJ;                        ///< I dF_I - J dF_J
  RealForm residual_JK;                        ///< J dF_J - K dF_K
};

/// I dF_I = J dF_J = K dF_K.
inline DefinitionCheck is_hkt_definition(const HyperhermitianMetric& metric) {
  const auto& m = metric.model();
  const auto f = kahler_forms(metric);
  DefinitionCheck out;
  out.torsion_candidates = {act(m.op_I(), ext_d(f[0])), act(m.op_J(), ext_d(f[1])), act(m.op_K(), ext_d(f[2]))};
  out.residual_IJ = out.torsion_candidates[0] - out.torsion_candidates[1];
  out.residual_JK = out.torsion_candidates[1] - out.torsion_candidates[2];
  out.holds = out.residual_IJ.is_zero() && out.residual_JK.is_zero();
  return out;
}

struct SalamonCheck {
  bool holds = false;
  RealForm residual;  ///< DF
};

/// F is D-closed.  Cross-checked against S(A, A)dF = dF at the six
/// bilinearization witnesses.
inline SalamonCheck is_hkt_salamon(const ProjectorTable& table, const RealForm& f) {
  const auto& m = table.model();
  if (!is_salamon_11(m, f).holds) throw std::invalid_argument("is_hkt_salamon: form is not of Salamon type (1,1)");
  SalamonCheck out;
  out.residual = salamon_D(table, f);
  out.holds = out.residual.is_zero();
  const RealForm df = ext_d(f);
  bool witnesses = true;
  for (const auto& p : bilinearization_witnesses()) {
    const RationalMatrix a = m.combination(p);
    if (!(slot_pair_insertion(a, a, df) == df)) {
      witnesses = false;
      break;
    }
  }
  if (witnesses != out.holds) throw std::logic_error("is_hkt_salamon: D-closedness disagrees with the sphere identity");
  return out;
}

/// Default sample set for the twistor test: the six bilinearization witnesses
/// and four fixed random points.
inline std::vector<SpherePoint> default_twistor_points() {
  Rng rng(0x7157);
  auto pts = bilinearization_witnesses();
  for (auto& p : random_sphere_points(rng, 4)) pts.push_back(std::move(p));
  return pts;
}

struct TwistorCheck {
  bool holds = false;
  std::vector<ComplexForm> residuals;  ///< (dG_a)^{0,3} per sample point
};

/// For each sample structure A: G = F^{0,2}_A and the (0,3)_A-part of dG
/// must vanish.
inline TwistorCheck is_hkt_twistor(const HypercomplexModel& model, const RealForm& f,
                                   const std::vector<SpherePoint>& points = default_twistor_points()) {
  if (!is_salamon_11(model, f).holds) throw std::invalid_argument("is_hkt_twistor: form is not of Salamon type (1,1)");
  TwistorCheck out;
  out.holds = true;
  for (const auto& p : points) {
    const auto op = model.structure(p);
    const ComplexForm g02 = complex_type_part(op, f, TypePart::p02);
    ComplexForm r = complex_type_part(op, ext_d(g02), TypePart::p03);
    out.holds = out.holds && r.is_zero();
    out.residuals.push_back(std::move(r));
  }
  return out;
}

struct Torsion {
  RealForm c;
  bool strong = false;
};

/// c = I dF_I; strong when dc = 0.
inline Torsion torsion_form(const HyperhermitianMetric& metric) {
  auto check = is_hkt_definition(metric);
  if (!check.holds) throw std::invalid_argument("torsion_form: metric is not HKT");
  Torsion out{std::move(check.torsion_candidates[0]), false};
  out.strong = ext_d(out.c).is_zero();
  return out;
}

/// F_I = a ^ Ia + Ja ^ Ka and cyclically, for the coframe (a, Ia, Ja, Ka) on R^4.
inline std::array<RealForm, 3> coframe_forms(const HypercomplexModel& model, const RealForm& alpha) {
  if (model.n() != 1) throw std::invalid_argument("coframe_forms: requires n = 1");
  if (alpha.degree() != 1 || alpha.dim() != model.dim()) throw std::invalid_argument("coframe_forms: expected a 1-form on R^4");
  const RealForm ia = act(model.op_I(), alpha);
  const RealForm ja = act(model.op_J(), alpha);
  const RealForm ka = act(model.op_K(), alpha);
  const Rational s(conventions::kCoframeSign);
  return {(wedge(alpha, ia) + wedge(ja, ka)) * s, (wedge(alpha, ja) + wedge(ka, ia)) * s,
          (wedge(alpha, ka) + wedge(ia, ja)) * s};
}

/// F_I = (dd_I + d_J d_K) mu / 2 and cyclically.
inline std::array<RealForm, 3> potential_to_forms(const HypercomplexModel& model, const RationalPolynomial& mu) {
  if (mu.dim() != model.dim()) throw std::invalid_argument("potential_to_forms: dimension mismatch");
  const RealForm f = RealForm::function(mu);
  const auto i = model.op_I();
  const auto j = model.op_J();
  const auto k = model.op_K();
  const Rational half(1, 2);
  return {(ext_d(twisted_d(i, f)) + twisted_d(j, twisted_d(k, f))) * half,
          (ext_d(twisted_d(j, f)) + twisted_d(k, twisted_d(i, f))) * half,
          (ext_d(twisted_d(k, f)) + twisted_d(i, twisted_d(j, f))) * half};
}

/// F_I = dd_I nu, F_J = (dd_J + d_K d_I) nu / 2, F_K = (dd_K + d_I d_J) nu / 2.
inline std::array<RealForm, 3> kahler_potential_to_forms(const HypercomplexModel& model, const RationalPolynomial& nu) {
  if (nu.dim() != model.dim()) throw std::invalid_argument("kahler_potential_to_forms: dimension mismatch");
  const RealForm f = RealForm::function(nu);
  const auto i = model.op_I();
  const auto j = model.op_J();
  const auto k = model.op_K();
  const Rational half(1, 2);
  return {ext_d(twisted_d(i, f)), (ext_d(twisted_d(j, f)) + twisted_d(k, twisted_d(i, f))) * half,
          (ext_d(twisted_d(k, f)) + twisted_d(i, twisted_d(j, f))) * half};
}

/// The hyperhermitian average w (H + I^T H I + J^T H J + K^T H K) of the
/// Hessian of mu; the metric whose HKT potential is mu.
inline BilinearForm metric_from_potential(const HypercomplexModel& model, const RationalPolynomial& mu) {
  const BilinearForm h = hessian(mu);
  return (h + act_bilinear(model.op_I(), h) + act_bilinear(model.op_J(), h) + act_bilinear(model.op_K(), h)) *
         conventions::kPotentialHessianWeight;
}

struct PotentialCheck {
  std::array<bool, 4> items{};  ///< F_I, F_J, F_K equalities and the Hessian identity
  bool holds() const { return items[0] && items[1] && items[2] && items[3]; }
  bool agree() const { return items[0] == items[1] && items[1] == items[2] && items[2] == items[3]; }
};

/// The four equivalent ways for mu to be an HKT potential of g.
inline PotentialCheck is_hkt_potential(const HyperhermitianMetric& metric, const RationalPolynomial& mu) {
  const auto& m = metric.model();
  const auto pf = potential_to_forms(m, mu);
  const auto kf = kahler_forms(metric);
  PotentialCheck out;
  for (std::size_t s = 0; s < 3; ++s) out.items[s] = pf[s] == kf[s];
  out.items[3] = metric_from_potential(m, mu) == metric.g();
  return out;
}

struct ThetaCertificate {
  RealForm theta;    ///< I dmu
  RealForm d_theta;  ///< D theta, equal to F_I(mu)
};

/// theta = I dmu, certified by D theta = F_I(mu) and dtheta being I-invariant.
inline ThetaCertificate theta_from_potential(const ProjectorTable& table, const RationalPolynomial& mu) {
  const auto& m = table.model();
  ThetaCertificate out;
  out.theta = act(m.op_I(), ext_d(RealForm::function(mu)));
  out.d_theta = salamon_D(table, out.theta);
  const RealForm dt = ext_d(out.theta);
  if (!(act_slots(m.op_I(), dt) == dt)) throw std::logic_error("theta_from_potential: dtheta is not of type (1,1)");
  if (!(out.d_theta == potential_to_forms(m, mu)[0])) throw std::logic_error("theta_from_potential: D theta != F_I(mu)");
  return out;
}

/// Pairing of 2-forms under the metric with inverse ginv:
/// <dx^a ^ dx^b, dx^c ^ dx^d> = ginv^{ac} ginv^{bd} - ginv^{ad} ginv^{bc}.
template <typename T, typename Ginv>
T pair_two_forms(const std::map<MultiIndex, T>& u, const std::map<MultiIndex, T>& v, const Ginv& ginv) {
  T s(0);
  for (const auto& [p, up] : u) {
    for (const auto& [q, vq] : v) {
      s = s + up * vq * (ginv(p[0], q[0]) * ginv(p[1], q[1]) - ginv(p[0], q[1]) * ginv(p[1], q[0]));
    }
  }
  return s;
}

/// Delta^c f = <dd_I f, F_I>_g at a rational point.
inline Rational complex_laplacian_at(const HyperhermitianMetric& metric, const RationalPolynomial& f,
                                     std::span<const Rational> pt) {
  const auto g_at = metric.g().evaluate_at(pt);
  const auto ginv = inverse(g_at);
  if (!ginv) throw std::domain_error("complex_laplacian: metric is degenerate at the sample point");
  const auto& m = metric.model();
  const RealForm ddi = ext_d(twisted_d(m.op_I(), RealForm::function(f)));
  const auto u = form_eval(ddi, pt);
  const auto v = form_eval(kahler_form(metric, m.op_I()), pt);
  return pair_two_forms(u.components, v.components, *ginv);
}

/// Delta^c f as a polynomial, for a metric with constant coefficients.
inline RationalPolynomial complex_laplacian(const HyperhermitianMetric& metric, const RationalPolynomial& f) {
  if (!metric.g().is_constant()) {
    throw std::invalid_argument("complex_laplacian: polynomial form needs a constant metric; evaluate pointwise");
  }
  const std::size_t dim = metric.model().dim();
  const std::vector<Rational> origin(dim, Rational(0));
  const auto ginv = inverse(metric.g().evaluate_at(std::span<const Rational>(origin)));
  if (!ginv) throw std::domain_error("complex_laplacian: metric is degenerate");
  const auto& m = metric.model();
  const RealForm ddi = ext_d(twisted_d(m.op_I(), RealForm::function(f)));
  const RealForm fi = kahler_form(metric, m.op_I());
  std::map<MultiIndex, RationalPolynomial> u(ddi.terms().begin(), ddi.terms().end());
  std::map<MultiIndex, RationalPolynomial> v(fi.terms().begin(), fi.terms().end());
  RationalPolynomial s(dim);
  for (const auto& [p, up] : u) {
    for (const auto& [q, vq] : v) {
      const auto& gi = *ginv;
      const Rational w = gi(p[0], q[0]) * gi(p[1], q[1]) - gi(p[0], q[1]) * gi(p[1], q[0]);
      if (!w.is_zero()) s.add_scaled(w, up * vq);
    }
  }
  return s;
}

/// Sylvester inertia of g at each sample point.
inline std::vector<Inertia> signature_samples(const HyperhermitianMetric& metric,
                                              const std::vector<std::vector<Rational>>& points) {
  std::vector<Inertia> out;
  for (const auto& pt : points) out.push_back(inertia(metric.g().evaluate_at(std::span<const Rational>(pt))));
  return out;
}

/// Deterministic rational sample points in [-1, 1]^dim.
inline std::vector<std::vector<Rational>> sample_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Rational>> out(count, std::vector<Rational>(dim));
  for (auto& pt : out) {
    for (auto& x : pt) x = Rational(uniform_int(rng, -6, 6), uniform_int(rng, 1, 6));
  }
  return out;
}

struct HKTReport {
  DefinitionCheck definition;
  SalamonCheck salamon;
  TwistorCheck twistor;
  std::optional<Torsion> torsion;
  std::vector<Inertia> signature;

  bool agree() const { return definition.holds == salamon.holds && salamon.holds == twistor.holds; }
  bool is_hkt() const { return definition.holds && agree(); }
};

/// All three HKT criteria on one metric, plus torsion and signature samples.
inline HKTReport hkt_report(const ProjectorTable& table, const HyperhermitianMetric& metric,
                            std::size_t signature_points = 5, std::uint64_t seed = 1) {
  const auto& m = metric.model();
  if (m.n() != table.model().n()) throw std::invalid_argument("hkt_report: projector table is for another model");
  HKTReport r;
  const RealForm f = kahler_form(metric, m.op_I());
  r.definition = is_hkt_definition(metric);
  r.salamon = is_hkt_salamon(table, f);
  r.twistor = is_hkt_twistor(m, f);
  if (r.definition.holds) {
    Torsion t{r.definition.torsion_candidates[0], false};
    t.strong = ext_d(t.c).is_zero();
    r.torsion = std::move(t);
  }
  r.signature = signature_samples(metric, sample_points(m.dim(), signature_points, seed));
  return r;
}

}  // namespace hkt
