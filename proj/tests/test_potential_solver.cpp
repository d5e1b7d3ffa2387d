#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hkt/potential_solver.hpp"

using namespace hkt;

namespace {

RationalPolynomial var(std::size_t i) { return RationalPolynomial::variable(4, i); }
RationalPolynomial cst(Rational c) { return RationalPolynomial::constant(4, c); }

RationalPolynomial r2(Rational scale) {
  RationalPolynomial p(4);
  for (std::size_t i = 0; i < 4; ++i) p += scale * (var(i) * var(i));
  return p;
}

// 1 + (x0^2 + x1^2) / 4
RationalPolynomial bump() { return cst(1) + Rational(1, 4) * (var(0) * var(0) + var(1) * var(1)); }

// |x|^2 / 2 + (x0^4 + x1^4) / 12 has coordinate Laplacian 4 * bump().
RationalPolynomial bump_solution() {
  const auto x0 = var(0), x1 = var(1);
  return r2(Rational(1, 2)) + Rational(1, 12) * (x0 * x0 * x0 * x0 + x1 * x1 * x1 * x1);
}

double max_abs_diff(const Grid4D& a, const Grid4D& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

Grid4D sample_poly(std::size_t m, const RationalPolynomial& p) {
  return Grid4D::sample(m, -1.0, 1.0, [&](const Point4& x) { return evaluate(p, std::vector<double>(x.begin(), x.end())); });
}

// Exact -phi^{-1} sum_k (d_k^2 mu - Gamma^k d_k mu) at a point, all from polynomials.
double symbolic_laplacian(const RationalPolynomial& phi, const RationalPolynomial& mu, const Point4& x) {
  const std::vector<double> v(x.begin(), x.end());
  const double p = evaluate(phi, v);
  double s = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    double gamma = 0.0;  // sum_i Gamma^k_ii
    for (std::size_t i = 0; i < 4; ++i) {
      const double di = evaluate(partial(phi, i), v);
      const double dk = evaluate(partial(phi, k), v);
      gamma += ((i == k ? di : 0.0) + (i == k ? di : 0.0) - dk) / (2.0 * p);
    }
    s += evaluate(partial(partial(mu, k), k), v) - gamma * evaluate(partial(mu, k), v);
  }
  return -s / p;
}

}  // namespace

TEST(WeylForm, Examples) {
  EXPECT_TRUE(weyl_form(ConformalMetricSpec(cst(1))).numerator.is_zero());
  const auto w = weyl_form(ConformalMetricSpec(cst(1) + var(0) * var(0)));
  EXPECT_EQ(w.numerator, (Rational(2) * var(0)) * RealForm::dx(4, 0));
  EXPECT_EQ(w.denominator, cst(1) + var(0) * var(0));
  // phi * d_i(phi delta_jk) - (d_i phi) * (phi delta_jk) = 0, entrywise.
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto phi = cst(2) + random_polynomial(rng, 4, 2, 3);
    const auto wf = weyl_form(ConformalMetricSpec(phi));
    const BilinearForm g = phi * BilinearForm::identity(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const RationalPolynomial omega_i = wf.numerator.component({static_cast<std::uint16_t>(i)});
      for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = 0; k < 4; ++k) EXPECT_TRUE((wf.denominator * partial(g(j, k), i) - omega_i * g(j, k)).is_zero());
      }
    }
  }
}

TEST(LaplaceBeltrami, FlatQuadraticAndAffine) {
  const ConformalMetricSpec flat(cst(1));
  const Grid4D lap = laplace_beltrami_apply(flat, sample_poly(9, r2(Rational(1, 4))));
  const Grid4D aff = laplace_beltrami_apply(flat, sample_poly(9, Rational(3) * var(1) - var(2) + cst(1)));
  for (std::size_t i = 0; i < lap.size(); ++i) {
    if (lap.is_boundary(lap.node(i))) continue;
    EXPECT_NEAR(lap[i], -2.0, 1e-12);
    EXPECT_NEAR(aff[i], 0.0, 1e-12);
  }
}

TEST(LaplaceBeltrami, ReducesToStandardStencilWhenFlat) {
  const ConformalMetricSpec flat(cst(1));
  Rng rng(2);
  Grid4D u(7, -1.0, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = static_cast<double>(uniform_int(rng, -100, 100)) / 7.0;
  const Grid4D lap = laplace_beltrami_apply(flat, u);
  const double h2 = u.h() * u.h();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Node n = u.node(i);
    if (u.is_boundary(n)) continue;
    double s = -8.0 * u[i];
    for (std::size_t k = 0; k < 4; ++k) s += u.at(u.shifted(n, k, 1)) + u.at(u.shifted(n, k, -1));
    EXPECT_NEAR(lap[i], -s / h2, 1e-12 * (1.0 + std::abs(s / h2)));
  }
  const auto st = detail::operator_stencil({1.0, {0.0, 0.0, 0.0, 0.0}}, u.h(), true);
  EXPECT_EQ(st.centre, 8.0 / h2);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(st.plus[k], -1.0 / h2);
    EXPECT_EQ(st.minus[k], -1.0 / h2);
  }
}

TEST(LaplaceBeltrami, SelfAdjointOnInteriorSupportedFunctions) {
  const ConformalMetricSpec flat(cst(1));
  Rng rng(3);
  Grid4D u(9, -1.0, 1.0), v(9, -1.0, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.is_boundary(u.node(i))) continue;
    u[i] = static_cast<double>(uniform_int(rng, -50, 50));
    v[i] = static_cast<double>(uniform_int(rng, -50, 50));
  }
  const Grid4D lu = laplace_beltrami_apply(flat, u);
  const Grid4D lv = laplace_beltrami_apply(flat, v);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    a += lu[i] * v[i];
    b += u[i] * lv[i];
  }
  EXPECT_NEAR(a, b, 1e-9 * std::abs(a));
}

TEST(LaplaceBeltrami, MatchesSymbolicOperatorOnQuadratics) {
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    const auto phi = cst(3) + random_polynomial(rng, 4, 2, 3) * Rational(1, 9);
    const auto mu = random_polynomial(rng, 4, 2, 5);
    const ConformalMetricSpec spec(phi);
    const Grid4D lap = laplace_beltrami_apply(spec, sample_poly(7, mu));
    for (std::size_t i = 0; i < lap.size(); ++i) {
      const Node n = lap.node(i);
      if (lap.is_boundary(n)) continue;
      const double exact = symbolic_laplacian(phi, mu, lap.point(n));
      EXPECT_NEAR(lap[i], exact, 1e-10 * (1.0 + std::abs(exact)));
    }
  }
}

TEST(SolvePotential, FlatManufacturedSolution) {
  const ConformalMetricSpec flat(cst(1));
  SolverConfig cfg;
  cfg.tolerance = 1e-10;
  const RationalPolynomial exact = r2(Rational(1, 2));
  EXPECT_EQ(exact, conventions::kSolverPotentialScale * r2(Rational(1, 4)));
  cfg.boundary = dirichlet_from_polynomial(exact);
  const auto res = solve_potential(flat, 9, cfg);
  EXPECT_LE(max_abs_diff(res.mu, sample_poly(9, exact)), 10 * cfg.tolerance);
  const auto diag = verify_potential(res.mu, flat);
  EXPECT_LT(diag.trace_residual_max, 1e-8);
  EXPECT_LT(diag.form_residual_max, 1e-8);
  EXPECT_GT(res.iterations, 0);
}

TEST(SolvePotential, ZeroDataSolutionIsNegativeInside) {
  const ConformalMetricSpec flat(cst(1), 0.0, 1.0);
  const auto res = solve_potential(flat, 9, SolverConfig{});
  for (std::size_t i = 0; i < res.mu.size(); ++i) {
    if (res.mu.is_boundary(res.mu.node(i))) {
      EXPECT_EQ(res.mu[i], 0.0);
    } else {
      EXPECT_LT(res.mu[i], 0.0);
    }
  }
}

TEST(SolvePotential, LinearInTheSource) {
  const ConformalMetricSpec spec(bump());
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.boundary = dirichlet_from_polynomial(bump_solution());
  auto with_source = [&](double c) {
    SolverConfig k = cfg;
    k.source = c;
    return solve_potential(spec, 7, k).mu;
  };
  const Grid4D homogeneous = with_source(0.0);
  const Grid4D one = with_source(4.0);
  const Grid4D three = with_source(12.0);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_NEAR(three[i] - homogeneous[i], 3.0 * (one[i] - homogeneous[i]), 1e-9);
  }
}

TEST(SolvePotential, RejectsNonPositiveFactorBeforeAssembly) {
  const ConformalMetricSpec spec(cst(Rational(1, 2)) - var(0) * var(0));
  EXPECT_THROW(solve_potential(spec, 5, SolverConfig{}), std::domain_error);
  SolverConfig bad;
  bad.tolerance = 0.0;
  EXPECT_THROW(solve_potential(ConformalMetricSpec(cst(1)), 5, bad), std::invalid_argument);
  SolverConfig starved;
  starved.max_iterations = 1;
  starved.tolerance = 1e-14;
  starved.boundary = dirichlet_from_polynomial(bump_solution());
  EXPECT_THROW(solve_potential(ConformalMetricSpec(bump()), 9, starved), SolverError);
}

TEST(SolvePotential, ConformalSelfConvergence) {
  const ConformalMetricSpec spec(bump());
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.boundary = dirichlet_from_polynomial(bump_solution());
  const auto m5 = solve_potential(spec, 5, cfg).mu;
  const auto m9 = solve_potential(spec, 9, cfg).mu;
  const auto m17 = solve_potential(spec, 17, cfg).mu;
  auto diff_on_coarse = [](const Grid4D& c, const Grid4D& f) {
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      Node n = c.node(i);
      for (auto& x : n) x *= 2;
      e = std::max(e, std::abs(c[i] - f.at(n)));
    }
    return e;
  };
  const double ratio = diff_on_coarse(m5, m9) / diff_on_coarse(m9, m17);
  EXPECT_GE(ratio, 3.2);
  EXPECT_LE(ratio, 4.8);
}

TEST(VerifyPotential, ConformalOrderAndMonotoneTrace) {
  const ConformalMetricSpec spec(bump());
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.boundary = dirichlet_from_polynomial(bump_solution());
  const auto m9 = solve_potential(spec, 9, cfg).mu;
  const auto m13 = solve_potential(spec, 13, cfg).mu;
  const auto m17 = solve_potential(spec, 17, cfg).mu;
  const double order = observed_order(spec, m9, m17);
  EXPECT_GE(order, 1.6);
  EXPECT_LE(order, 2.4);
  const double t9 = verify_potential(m9, spec).trace_residual_max;
  const double t13 = verify_potential(m13, spec).trace_residual_max;
  const double t17 = verify_potential(m17, spec).trace_residual_max;
  EXPECT_GT(t9, t13);
  EXPECT_GT(t13, t17);
  // The exact solution itself verifies to fourth-order accuracy.
  EXPECT_LT(verify_potential(sample_poly(17, bump_solution()), spec).form_residual_max, 1e-10);
}

TEST(VerifyPotential, ResidualsGrowLinearlyWithPerturbation) {
  const ConformalMetricSpec flat(cst(1));
  const Grid4D exact = sample_poly(9, r2(Rational(1, 2)));
  Grid4D bumpy(9, -1.0, 1.0);
  for (std::size_t i = 0; i < bumpy.size(); ++i) {
    const auto x = bumpy.point(bumpy.node(i));
    bumpy[i] = std::cos(x[0]) * std::sin(x[1] + 0.3) * std::cos(0.5 * x[2] - x[3]);
  }
  auto perturbed = [&](double eps) {
    Grid4D g = exact;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += eps * bumpy[i];
    return verify_potential(g, flat);
  };
  const auto a = perturbed(1e-3);
  const auto b = perturbed(2e-3);
  const auto c = perturbed(4e-3);
  EXPECT_NEAR(b.form_residual_max / a.form_residual_max, 2.0, 1e-6);
  EXPECT_NEAR(c.form_residual_max / a.form_residual_max, 4.0, 1e-6);
  EXPECT_NEAR(b.trace_residual_max / a.trace_residual_max, 2.0, 1e-6);
}

TEST(CsvSlice, HasHeaderAndOneRowPerNode) {
  const Grid4D g = sample_poly(5, r2(Rational(1, 2)));
  std::ostringstream os;
  write_csv_slice(os, g);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("x0,x1,x2,x3,mu\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 26);
}
