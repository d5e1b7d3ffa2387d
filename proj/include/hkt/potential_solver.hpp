#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "hkt/conventions.hpp"
#include "hkt/hkt_geometry.hpp"

namespace hkt {

/// g = phi * delta on the box [lo, hi]^4.
struct ConformalMetricSpec {
  RationalPolynomial phi;
  double lo = -1.0;
  double hi = 1.0;

  ConformalMetricSpec(RationalPolynomial p, double lo_ = -1.0, double hi_ = 1.0) : phi(std::move(p)), lo(lo_), hi(hi_) {
    if (phi.dim() != 4) throw std::invalid_argument("ConformalMetricSpec: conformal factor must live on R^4");
    if (!(hi > lo)) throw std::invalid_argument("ConformalMetricSpec: empty box");
  }
};

using Node = std::array<std::size_t, 4>;
using Point4 = std::array<double, 4>;

/// Scalar values on the uniform m^4 grid over [lo, lo + (m - 1) h]^4.
class Grid4D {
 public:
  Grid4D(std::size_t m, double lo, double hi) : m_(m), lo_(lo), h_((hi - lo) / static_cast<double>(m - 1)) {
    if (m < 3) throw std::invalid_argument("Grid4D: need at least 3 nodes per axis");
    values_.assign(m * m * m * m, 0.0);
  }

  std::size_t m() const { return m_; }
  double h() const { return h_; }
  double lo() const { return lo_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(const Node& n) const { return ((n[0] * m_ + n[1]) * m_ + n[2]) * m_ + n[3]; }
  Node node(std::size_t idx) const {
    Node n{};
    for (int a = 3; a >= 0; --a) {
      n[static_cast<std::size_t>(a)] = idx % m_;
      idx /= m_;
    }
    return n;
  }
  Point4 point(const Node& n) const {
    return {lo_ + h_ * static_cast<double>(n[0]), lo_ + h_ * static_cast<double>(n[1]),
            lo_ + h_ * static_cast<double>(n[2]), lo_ + h_ * static_cast<double>(n[3])};
  }
  /// Distance in nodes to the nearest face.
  std::size_t depth(const Node& n) const {
    std::size_t d = m_;
    for (auto i : n) d = std::min({d, i, m_ - 1 - i});
    return d;
  }
  bool is_boundary(const Node& n) const { return depth(n) == 0; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(const Node& n) { return values_[index(n)]; }
  double at(const Node& n) const { return values_[index(n)]; }
  const std::vector<double>& values() const { return values_; }

  Node shifted(Node n, std::size_t axis, long steps) const {
    n[axis] = static_cast<std::size_t>(static_cast<long>(n[axis]) + steps);
    return n;
  }

  template <typename Fn>
  static Grid4D sample(std::size_t m, double lo, double hi, Fn&& f) {
    Grid4D g(m, lo, hi);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(g.point(g.node(i)));
    return g;
  }

 private:
  std::size_t m_;
  double lo_;
  double h_;
  std::vector<double> values_;
};

using BoundaryData = std::function<double(const Point4&)>;

inline BoundaryData dirichlet_from_polynomial(RationalPolynomial p) {
  return [p = std::move(p)](const Point4& x) { return evaluate(p, std::vector<double>(x.begin(), x.end())); };
}

struct SolverConfig {
  double tolerance = 1e-10;
  int max_iterations = 20000;
  BoundaryData boundary = [](const Point4&) { return 0.0; };
  /// c in Delta mu + omega#(mu) + c = 0.
  double source = conventions::kSolverTrace.to_double();
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// omega = dphi / phi, kept as the exact pair (dphi, phi).
struct WeylForm {
  RealForm numerator;
  RationalPolynomial denominator;
};

inline WeylForm weyl_form(const ConformalMetricSpec& spec) {
  return {ext_d(RealForm::function(spec.phi)), spec.phi};
}

namespace detail {

/// phi, d_k phi at a node.
struct FactorAt {
  double phi;
  std::array<double, 4> dphi;
};

class FactorSampler {
 public:
  explicit FactorSampler(const RationalPolynomial& phi) : phi_(phi) {
    for (std::size_t k = 0; k < 4; ++k) dphi_[k] = partial(phi, k);
  }
  FactorAt operator()(const Point4& x) const {
    const std::vector<double> v(x.begin(), x.end());
    FactorAt out{evaluate(phi_, v), {}};
    for (std::size_t k = 0; k < 4; ++k) out.dphi[k] = evaluate(dphi_[k], v);
    return out;
  }

 private:
  RationalPolynomial phi_;
  std::array<RationalPolynomial, 4> dphi_;
};

/// sum_i Gamma^k_ii for g = phi delta on R^4, from
/// Gamma^k_ij = (delta_ik d_j phi + delta_jk d_i phi - delta_ij d_k phi) / (2 phi).
inline std::array<double, 4> christoffel_trace(const FactorAt& f) {
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += ((i == k ? 2.0 : 0.0) * f.dphi[k] - f.dphi[k]) / (2.0 * f.phi);
    out[k] = s;
  }
  return out;
}

/// Stencil weights at a node for Delta + omega#.grad (second-order central
/// differences): coefficient of the centre and of the +/- neighbours per axis.
struct Stencil {
  double centre = 0.0;
  std::array<double, 4> plus{};
  std::array<double, 4> minus{};
};

inline Stencil operator_stencil(const FactorAt& f, double h, bool with_weyl) {
  const auto gamma = christoffel_trace(f);
  const double inv_phi = 1.0 / f.phi;
  const double h2 = h * h;
  Stencil s;
  for (std::size_t k = 0; k < 4; ++k) {
    // Delta mu = -(1/phi) sum_k (d_k^2 mu - Gamma^k d_k mu)
    s.centre += 2.0 * inv_phi / h2;
    double first = inv_phi * gamma[k] / (2.0 * h);
    // omega# mu = (1/phi) (d_k phi / phi) d_k mu
    if (with_weyl) first += inv_phi * (f.dphi[k] / f.phi) / (2.0 * h);
    s.plus[k] = -inv_phi / h2 + first;
    s.minus[k] = -inv_phi / h2 - first;
  }
  return s;
}

inline void check_positive(const Grid4D& grid, const FactorSampler& sampler) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(sampler(grid.point(grid.node(i))).phi > 0.0)) {
      throw std::domain_error("conformal factor is not positive at every grid node");
    }
  }
}

}  // namespace detail

/// Delta mu = -g^{ij}(d_i d_j mu - Gamma^k_ij d_k mu) at interior nodes;
/// boundary nodes are set to zero.
inline Grid4D laplace_beltrami_apply(const ConformalMetricSpec& spec, const Grid4D& mu) {
  const detail::FactorSampler sampler(spec.phi);
  Grid4D out(mu.m(), mu.lo(), mu.lo() + mu.h() * static_cast<double>(mu.m() - 1));
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Node n = mu.node(i);
    if (mu.is_boundary(n)) continue;
    const auto st = detail::operator_stencil(sampler(mu.point(n)), mu.h(), false);
    double v = st.centre * mu[i];
    for (std::size_t k = 0; k < 4; ++k) {
      v += st.plus[k] * mu.at(mu.shifted(n, k, 1)) + st.minus[k] * mu.at(mu.shifted(n, k, -1));
    }
    out[i] = v;
  }
  return out;
}

struct SolveResult {
  Grid4D mu;
  int iterations = 0;
  double linear_residual = 0.0;  ///< relative residual reported by the Krylov solver
  double seconds = 0.0;
};

/// Solves Delta mu + omega#(mu) + source = 0 on the interior of an m^4 grid
/// with Dirichlet data, by BiCGSTAB with a diagonal preconditioner.
inline SolveResult solve_potential(const ConformalMetricSpec& spec, std::size_t m, const SolverConfig& config) {
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("solve_potential: tolerance must be positive");
  const auto start = std::chrono::steady_clock::now();
  Grid4D mu(m, spec.lo, spec.hi);
  const detail::FactorSampler sampler(spec.phi);
  detail::check_positive(mu, sampler);

  std::vector<long> unknown(mu.size(), -1);
  long count = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const Node n = mu.node(i);
    if (mu.is_boundary(n)) {
      mu[i] = config.boundary(mu.point(n));
    } else {
      unknown[i] = count++;
    }
  }

  using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(count) * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(count, -config.source);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const long row = unknown[i];
    if (row < 0) continue;
    const Node n = mu.node(i);
    const auto st = detail::operator_stencil(sampler(mu.point(n)), mu.h(), true);
    if (!(st.centre > 0.0)) throw SolverError("solve_potential: sign-indefinite system");
    triplets.emplace_back(row, row, st.centre);
    for (std::size_t k = 0; k < 4; ++k) {
      for (const auto& [step, w] : {std::pair{1L, st.plus[k]}, std::pair{-1L, st.minus[k]}}) {
        const std::size_t j = mu.index(mu.shifted(n, k, step));
        if (unknown[j] >= 0) {
          triplets.emplace_back(row, unknown[j], w);
        } else {
          rhs[row] -= w * mu[j];
        }
      }
    }
  }
  SpMat a(count, count);
  a.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
  solver.setTolerance(config.tolerance);
  solver.setMaxIterations(config.max_iterations);
  solver.compute(a);
  if (solver.info() != Eigen::Success) throw SolverError("solve_potential: preconditioner setup failed");
  const Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) {
    throw SolverError("solve_potential: no convergence within the iteration limit");
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (unknown[i] >= 0) mu[i] = x[unknown[i]];
  }
  SolveResult out{std::move(mu), static_cast<int>(solver.iterations()), solver.error(), 0.0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

struct PotentialDiagnostics {
  double trace_residual_max = 0.0;   ///< |g^{ij} d_i d_j mu - 4|
  double trace_residual_mean = 0.0;
  double form_residual_max = 0.0;    ///< |(dd_I + d_J d_K)(mu / s) / 2 - F_I|, max component
  double form_residual_mean = 0.0;
  std::size_t nodes = 0;
  double h = 0.0;
};

namespace detail {

/// F_I of the potential x_i x_j (i <= j), as constant 2-form coefficients.
inline std::vector<std::vector<std::pair<MultiIndex, double>>> quadratic_form_table() {
  const auto model = HypercomplexModel::standard(1);
  std::vector<std::vector<std::pair<MultiIndex, double>>> table(16);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) {
      const auto f = potential_to_forms(model, RationalPolynomial::variable(4, i) * RationalPolynomial::variable(4, j));
      for (const auto& [idx, p] : f[0].terms()) table[i * 4 + j].emplace_back(idx, p.constant_term().to_double());
    }
  }
  return table;
}

/// Fourth-order central differences for the Hessian at a node of depth >= 2.
inline std::array<double, 16> hessian_fd4(const Grid4D& u, const Node& n) {
  const double h = u.h();
  static constexpr std::array<double, 5> d1{1.0, -8.0, 0.0, 8.0, -1.0};      // / 12h
  static constexpr std::array<double, 5> d2{-1.0, 16.0, -30.0, 16.0, -1.0};  // / 12h^2
  std::array<double, 16> hess{};
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (long a = -2; a <= 2; ++a) s += d2[static_cast<std::size_t>(a + 2)] * u.at(u.shifted(n, i, a));
    hess[i * 4 + i] = s / (12.0 * h * h);
    for (std::size_t j = i + 1; j < 4; ++j) {
      double t = 0.0;
      for (long a = -2; a <= 2; ++a) {
        const double wa = d1[static_cast<std::size_t>(a + 2)];
        if (wa == 0.0) continue;
        for (long b = -2; b <= 2; ++b) {
          const double wb = d1[static_cast<std::size_t>(b + 2)];
          if (wb == 0.0) continue;
          t += wa * wb * u.at(u.shifted(u.shifted(n, i, a), j, b));
        }
      }
      hess[i * 4 + j] = hess[j * 4 + i] = t / (144.0 * h * h);
    }
  }
  return hess;
}

}  // namespace detail

/// Residuals of a solver-normalized potential against the trace identity and
/// against F_I = kahler_form(phi delta, I), at nodes of depth >= 2.  When
/// `only` is given, just those physical points are examined (they must be
/// nodes of the grid).
inline PotentialDiagnostics verify_potential(const Grid4D& mu, const ConformalMetricSpec& spec,
                                             const std::vector<Point4>* only = nullptr) {
  static const auto table = detail::quadratic_form_table();
  const detail::FactorSampler sampler(spec.phi);
  const double trace_target = conventions::kSolverTrace.to_double();
  const double scale = conventions::kSolverPotentialScale.to_double();
  PotentialDiagnostics out;
  out.h = mu.h();

  auto visit = [&](const Node& n) {
    const auto f = sampler(mu.point(n));
    const auto hess = detail::hessian_fd4(mu, n);
    const double trace = (hess[0] + hess[5] + hess[10] + hess[15]) / f.phi;
    const double tr = std::abs(trace - trace_target);

    // mu / s = sum_{i<=j} c_ij x_i x_j locally, c_ii = H_ii / 2, c_ij = H_ij.
    std::map<MultiIndex, double> form;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i; j < 4; ++j) {
        const double c = (i == j ? 0.5 : 1.0) * hess[i * 4 + j] / scale;
        for (const auto& [idx, w] : table[i * 4 + j]) form[idx] += c * w;
      }
    }
    form[MultiIndex{0, 1}] -= f.phi;
    form[MultiIndex{2, 3}] -= f.phi;
    double fr = 0.0;
    for (const auto& [idx, v] : form) fr = std::max(fr, std::abs(v));

    out.trace_residual_max = std::max(out.trace_residual_max, tr);
    out.trace_residual_mean += tr;
    out.form_residual_max = std::max(out.form_residual_max, fr);
    out.form_residual_mean += fr;
    ++out.nodes;
  };

  if (only) {
    for (const auto& x : *only) {
      Node n{};
      for (std::size_t a = 0; a < 4; ++a) n[a] = static_cast<std::size_t>(std::lround((x[a] - mu.lo()) / mu.h()));
      if (mu.depth(n) < 2) throw std::invalid_argument("verify_potential: point too close to the boundary");
      visit(n);
    }
  } else {
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Node n = mu.node(i);
      if (mu.depth(n) >= 2) visit(n);
    }
  }
  if (out.nodes > 0) {
    out.trace_residual_mean /= static_cast<double>(out.nodes);
    out.form_residual_mean /= static_cast<double>(out.nodes);
  }
  return out;
}

/// Nodes of `coarse` where fourth-order stencils fit, as physical points.
inline std::vector<Point4> verifiable_points(const Grid4D& coarse) {
  std::vector<Point4> pts;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const Node n = coarse.node(i);
    if (coarse.depth(n) >= 2) pts.push_back(coarse.point(n));
  }
  return pts;
}

/// Observed convergence order of the form residual between two grids,
/// measured on the verifiable nodes of the coarse one.
inline double observed_order(const ConformalMetricSpec& spec, const Grid4D& coarse, const Grid4D& fine) {
  const auto pts = verifiable_points(coarse);
  const double rc = verify_potential(coarse, spec, &pts).form_residual_max;
  const double rf = verify_potential(fine, spec, &pts).form_residual_max;
  return std::log(rc / rf) / std::log(coarse.h() / fine.h());
}

/// CSV of the slice through the middle of axes 2 and 3: x0,x1,mu.
inline void write_csv_slice(std::ostream& os, const Grid4D& mu) {
  const std::size_t mid = mu.m() / 2;
  os << "x0,x1,x2,x3,mu\n";
  os.precision(17);
  for (std::size_t a = 0; a < mu.m(); ++a) {
    for (std::size_t b = 0; b < mu.m(); ++b) {
      const Node n{a, b, mid, mid};
      const auto x = mu.point(n);
      os << x[0] << ',' << x[1] << ',' << x[2] << ',' << x[3] << ',' << mu.at(n) << '\n';
    }
  }
}

}  // namespace hkt
