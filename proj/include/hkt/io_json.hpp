#pragma once

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hkt/hkt_geometry.hpp"

// JSON encodings.  Exact payloads carry rationals as integer pairs; integers
// beyond 64 bits are written as decimal strings.
//
//   Polynomial  {"dim": d, "terms": [{"num", "den", "exp": [e_0, ..]}, ..]}
//               Gaussian coefficients add "inum", "iden".
//   KForm       {"k": k, "dim": d, "terms": [{"idx": [i_1, ..], "poly": Polynomial}, ..]}
//   Model       {"n": n, "convention": "left"}
namespace hkt::io {

using json = nlohmann::json;

/// Malformed or inconsistent input; `where` is a JSON-pointer-like path.
class InputError : public std::invalid_argument {
 public:
  InputError(const std::string& where, const std::string& what)
      : std::invalid_argument(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

namespace detail {

inline json integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

inline std::string integer_text(const json& j, const std::string& where) {
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number_unsigned()) return std::to_string(j.get<unsigned long long>());
  if (j.is_string()) return j.get<std::string>();
  throw InputError(where, "expected an integer or a decimal string");
}

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::size_t size_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError(where + "/" + key, "expected a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

inline Rational rational_from(const json& j, const char* num, const char* den, const std::string& where) {
  const std::string n = integer_text(field(j, num, where), where + "/" + num);
  const std::string d = j.contains(den) ? integer_text(j.at(den), where + "/" + den) : std::string("1");
  try {
    return Rational::from_strings(n, d);
  } catch (const std::exception& e) {
    throw InputError(where, e.what());
  }
}

}  // namespace detail

inline json to_json(const Rational& r) {
  return {{"num", detail::integer_json(r.get().get_num())}, {"den", detail::integer_json(r.get().get_den())}};
}

template <ExactField C>
json to_json(const Polynomial<C>& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json t;
    if constexpr (is_gaussian_v<C>) {
      t["num"] = detail::integer_json(c.re().get().get_num());
      t["den"] = detail::integer_json(c.re().get().get_den());
      t["inum"] = detail::integer_json(c.im().get().get_num());
      t["iden"] = detail::integer_json(c.im().get().get_den());
    } else {
      t["num"] = detail::integer_json(c.get().get_num());
      t["den"] = detail::integer_json(c.get().get_den());
    }
    t["exp"] = m.exponents();
    terms.push_back(std::move(t));
  }
  return {{"dim", p.dim()}, {"terms", std::move(terms)}};
}

template <ExactField C>
json to_json(const KForm<C>& w) {
  json terms = json::array();
  for (const auto& [idx, p] : w.terms()) terms.push_back({{"idx", idx}, {"poly", to_json(p)}});
  return {{"k", w.degree()}, {"dim", w.dim()}, {"terms", std::move(terms)}};
}

inline json to_json(const BilinearForm& b) {
  json rows = json::array();
  for (std::size_t i = 0; i < b.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < b.dim(); ++j) row.push_back(to_json(b(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const HypercomplexModel& m) { return {{"n", m.n()}, {"convention", "left"}}; }

inline RationalPolynomial polynomial_from_json(const json& j, const std::string& where = "") {
  const std::size_t dim = detail::size_field(j, "dim", where);
  const json& terms = detail::field(j, "terms", where);
  if (!terms.is_array()) throw InputError(where + "/terms", "expected an array");
  RationalPolynomial p(dim);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string at = where + "/terms/" + std::to_string(t);
    const json& term = terms[t];
    const json& exp = detail::field(term, "exp", at);
    if (!exp.is_array() || exp.size() != dim) throw InputError(at + "/exp", "expected " + std::to_string(dim) + " exponents");
    Monomial m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!exp[i].is_number_integer() || exp[i].get<long long>() < 0) throw InputError(at + "/exp", "exponents must be non-negative integers");
      m[i] = static_cast<std::uint32_t>(exp[i].get<long long>());
    }
    if (term.contains("inum")) throw InputError(at, "complex coefficient in a real payload");
    p.add_term(m, detail::rational_from(term, "num", "den", at));
  }
  return p;
}

inline RealForm form_from_json(const json& j, const std::string& where = "") {
  const std::size_t k = detail::size_field(j, "k", where);
  const std::size_t dim = detail::size_field(j, "dim", where);
  const json& terms = detail::field(j, "terms", where);
  if (!terms.is_array()) throw InputError(where + "/terms", "expected an array");
  RealForm w(dim, k);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string at = where + "/terms/" + std::to_string(t);
    const json& idx_j = detail::field(terms[t], "idx", at);
    if (!idx_j.is_array() || idx_j.size() != k) throw InputError(at + "/idx", "expected " + std::to_string(k) + " indices");
    MultiIndex idx;
    for (const auto& v : idx_j) {
      if (!v.is_number_integer() || v.get<long long>() < 0 || static_cast<std::size_t>(v.get<long long>()) >= dim) {
        throw InputError(at + "/idx", "index out of range");
      }
      idx.push_back(static_cast<std::uint16_t>(v.get<long long>()));
    }
    const RationalPolynomial p = polynomial_from_json(detail::field(terms[t], "poly", at), at + "/poly");
    if (p.dim() != dim) throw InputError(at + "/poly", "polynomial dimension does not match the form");
    w.add_term(idx, p);
  }
  return w;
}

inline BilinearForm bilinear_from_json(const json& j, std::size_t dim, const std::string& where = "") {
  if (!j.is_array() || j.size() != dim) throw InputError(where, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  std::vector<RationalPolynomial> entries;
  for (std::size_t i = 0; i < dim; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != dim) throw InputError(where + "/" + std::to_string(i), "row has the wrong length");
    for (std::size_t c = 0; c < dim; ++c) {
      const std::string at = where + "/" + std::to_string(i) + "/" + std::to_string(c);
      RationalPolynomial p = polynomial_from_json(row[c], at);
      if (p.dim() != dim) throw InputError(at, "entry dimension does not match the model");
      entries.push_back(std::move(p));
    }
  }
  bool symmetric = true;
  for (std::size_t i = 0; i < dim && symmetric; ++i) {
    for (std::size_t c = i + 1; c < dim; ++c) {
      if (!(entries[i * dim + c] == entries[c * dim + i])) {
        symmetric = false;
        break;
      }
    }
  }
  BilinearForm b(dim, symmetric);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (symmetric && c < i) continue;
      b.set(i, c, entries[i * dim + c]);
    }
  }
  return b;
}

inline HypercomplexModel model_from_json(const json& j, const std::string& where = "/model") {
  const std::size_t n = detail::size_field(j, "n", where);
  if (n < 1) throw InputError(where + "/n", "n must be at least 1");
  if (j.contains("convention") && j.at("convention") != "left") {
    throw InputError(where + "/convention", "only the left-multiplication convention is supported");
  }
  return HypercomplexModel::standard(static_cast<int>(n));
}

enum class InputKind { metric, form, potential, conformal4d };

struct ConformalPayload {
  RationalPolynomial phi;
  double lo = -1.0;
  double hi = 1.0;
  std::optional<RationalPolynomial> dirichlet;
};

struct InputDocument {
  InputKind kind;
  HypercomplexModel model;
  std::optional<BilinearForm> g;            ///< metric; optional for potential
  std::optional<RealForm> form;             ///< form
  std::optional<RationalPolynomial> mu;     ///< potential
  std::optional<ConformalPayload> conformal;
};

inline InputKind kind_from_string(const json& j) {
  if (!j.is_string()) throw InputError("/kind", "expected a string");
  const auto s = j.get<std::string>();
  if (s == "metric") return InputKind::metric;
  if (s == "form") return InputKind::form;
  if (s == "potential") return InputKind::potential;
  if (s == "conformal4d") return InputKind::conformal4d;
  throw InputError("/kind", "unknown kind '" + s + "'");
}

inline std::string to_string(InputKind k) {
  switch (k) {
    case InputKind::metric: return "metric";
    case InputKind::form: return "form";
    case InputKind::potential: return "potential";
    case InputKind::conformal4d: return "conformal4d";
  }
  return "?";
}

inline InputDocument parse_document(const json& doc) {
  const InputKind kind = kind_from_string(detail::field(doc, "kind", ""));
  HypercomplexModel model = model_from_json(detail::field(doc, "model", ""));
  const json& payload = detail::field(doc, "payload", "");
  InputDocument out{kind, model, {}, {}, {}, {}};
  const std::size_t dim = model.dim();
  switch (kind) {
    case InputKind::metric:
      out.g = bilinear_from_json(detail::field(payload, "g", "/payload"), dim, "/payload/g");
      break;
    case InputKind::form: {
      RealForm w = form_from_json(payload, "/payload");
      if (w.dim() != dim) throw InputError("/payload/dim", "form dimension does not match the model");
      if (w.degree() != 2) throw InputError("/payload/k", "expected a 2-form");
      out.form = std::move(w);
      break;
    }
    case InputKind::potential: {
      RationalPolynomial mu = polynomial_from_json(detail::field(payload, "mu", "/payload"), "/payload/mu");
      if (mu.dim() != dim) throw InputError("/payload/mu/dim", "potential dimension does not match the model");
      out.mu = std::move(mu);
      if (payload.contains("g")) out.g = bilinear_from_json(payload.at("g"), dim, "/payload/g");
      break;
    }
    case InputKind::conformal4d: {
      if (model.n() != 1) throw InputError("/model/n", "conformal4d documents require n = 1");
      ConformalPayload c{polynomial_from_json(detail::field(payload, "phi", "/payload"), "/payload/phi"), -1.0, 1.0, {}};
      if (c.phi.dim() != 4) throw InputError("/payload/phi/dim", "conformal factor must live on R^4");
      if (payload.contains("box")) {
        const json& box = payload.at("box");
        if (!box.is_array() || box.size() != 2 || !box[0].is_number() || !box[1].is_number() ||
            !(box[1].get<double>() > box[0].get<double>())) {
          throw InputError("/payload/box", "expected [lo, hi] with lo < hi");
        }
        c.lo = box[0].get<double>();
        c.hi = box[1].get<double>();
      }
      if (payload.contains("dirichlet")) {
        c.dirichlet = polynomial_from_json(payload.at("dirichlet"), "/payload/dirichlet");
        if (c.dirichlet->dim() != 4) throw InputError("/payload/dirichlet/dim", "boundary data must live on R^4");
      }
      out.conformal = std::move(c);
      break;
    }
  }
  return out;
}

inline InputDocument parse_document_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_document(doc);
}

/// Size summary of an exact residual: nonzero terms and coefficient height.
template <ExactField C>
json residual_summary(const KForm<C>& r) {
  return {{"zero", r.is_zero()}, {"nonzero_terms", r.term_count()}, {"max_height_bits", r.height_bits()}};
}

inline json to_json(const Inertia& in) {
  return {{"positive", in.positive}, {"negative", in.negative}, {"zero", in.zero}};
}

inline json to_json(const HKTReport& r) {
  json tw = json::array();
  for (const auto& c : r.twistor.residuals) tw.push_back(residual_summary(c));
  json sig = json::array();
  for (const auto& s : r.signature) sig.push_back(to_json(s));
  json out = {{"hkt", r.is_hkt()},
              {"criteria_agree", r.agree()},
              {"definition", {{"holds", r.definition.holds},
                              {"residual_IJ", residual_summary(r.definition.residual_IJ)},
                              {"residual_JK", residual_summary(r.definition.residual_JK)}}},
              {"salamon", {{"holds", r.salamon.holds}, {"residual", residual_summary(r.salamon.residual)}}},
              {"twistor", {{"holds", r.twistor.holds}, {"residuals", std::move(tw)}}},
              {"signature_samples", std::move(sig)}};
  if (r.torsion) {
    out["torsion"] = {{"form", to_json(r.torsion->c)}, {"zero", r.torsion->c.is_zero()}, {"strong", r.torsion->strong}};
  } else {
    out["torsion"] = nullptr;
  }
  return out;
}

}  // namespace hkt::io
