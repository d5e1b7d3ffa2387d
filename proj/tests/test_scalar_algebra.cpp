#include <gtest/gtest.h>

#include <vector>

#include "hkt/polynomial.hpp"

using namespace hkt;

namespace {

RationalPolynomial x(std::size_t dim, std::size_t i) { return RationalPolynomial::variable(dim, i); }
RationalPolynomial cst(std::size_t dim, Rational c) { return RationalPolynomial::constant(dim, c); }

// Term-by-term evaluation by repeated multiplication; shares no code with
// hkt::evaluate.
Rational naive_eval(const RationalPolynomial& p, const std::vector<Rational>& pt) {
  Rational sum(0);
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::uint32_t e = 0; e < m[i]; ++e) t = t * pt[i];
    }
    sum = sum + t;
  }
  return sum;
}

}  // namespace

TEST(Rational, CanonicalForm) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  const Rational r(1, -2);
  EXPECT_EQ(r.num_str(), "-1");
  EXPECT_EQ(r.den_str(), "2");
  const Rational s = Rational(6, 9) * Rational(3, 4);
  EXPECT_EQ(s.num_str(), "1");
  EXPECT_EQ(s.den_str(), "2");
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational(0).inverse(), std::domain_error);
}

TEST(Rational, ParsesStringsAndRoundsToNearest) {
  const Rational r = Rational::from_strings("123456789012345678901234567890", "-10");
  EXPECT_EQ(r.num_str(), "-12345678901234567890123456789");
  EXPECT_EQ(r.den_str(), "1");
  EXPECT_THROW(Rational::from_strings("1x", "2"), std::invalid_argument);
  EXPECT_EQ(Rational(1, 3).to_double(), 1.0 / 3.0);
  EXPECT_EQ(Rational(-2, 7).to_double(), -2.0 / 7.0);
}

TEST(GaussianRational, FieldAxiomsAndConjugation) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const GaussianRational a(random_rational(rng), random_rational(rng));
    const GaussianRational b(random_rational(rng), random_rational(rng));
    EXPECT_EQ(a.conj().conj(), a);
    EXPECT_EQ((a * b).conj(), a.conj() * b.conj());
    EXPECT_EQ(a * b, b * a);
    if (!a.is_zero()) {
      EXPECT_EQ(a * a.inverse(), GaussianRational(1));
    }
  }
  EXPECT_EQ(GaussianRational::i() * GaussianRational::i(), GaussianRational(-1));
}

TEST(PolyArith, Examples) {
  const std::size_t n = 4;
  EXPECT_EQ((x(n, 0) + cst(n, 1)) * (x(n, 0) - cst(n, 1)), x(n, 0) * x(n, 0) - cst(n, 1));
  const RationalPolynomial p = x(n, 0) * x(n, 1) + cst(n, 3);
  EXPECT_EQ(p + RationalPolynomial(n), p);
  EXPECT_EQ((Rational(1, 2) * x(n, 0)) * (Rational(2, 3) * x(n, 1)), Rational(1, 3) * (x(n, 0) * x(n, 1)));
}

TEST(PolyArith, NoStoredZeros) {
  const std::size_t n = 4;
  const RationalPolynomial p = x(n, 0) + x(n, 1);
  const RationalPolynomial z = p - p;
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.size(), 0u);
  EXPECT_TRUE((p * Rational(0)).terms().empty());
}

TEST(PolyArith, DimensionMismatchThrows) {
  EXPECT_THROW(x(4, 0) + x(8, 0), std::invalid_argument);
  EXPECT_THROW(x(4, 0) * x(8, 0), std::invalid_argument);
}

TEST(PolyArith, RingAxiomsOnRandomTriples) {
  Rng rng(2024);
  for (int t = 0; t < 40; ++t) {
    const auto a = random_polynomial(rng, 8, 3, 4);
    const auto b = random_polynomial(rng, 8, 3, 4);
    const auto c = random_polynomial(rng, 8, 3, 4);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a + b, b + a);
  }
}

TEST(PolyPartial, Examples) {
  const std::size_t n = 4;
  const auto x0 = x(n, 0);
  const auto x1 = x(n, 1);
  EXPECT_EQ(partial(x0 * x0 * x1, 0), Rational(2) * (x0 * x1));
  EXPECT_TRUE(partial(x0 * x0, 1).is_zero());
  EXPECT_THROW(partial(x0, 4), std::out_of_range);
}

TEST(PolyPartial, MixedPartialsCommuteAndLeibniz) {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_polynomial(rng, 4, 4, 5);
    const auto q = random_polynomial(rng, 4, 4, 5);
    EXPECT_EQ(partial(partial(p, 0), 1), partial(partial(p, 1), 0));
    const std::size_t i = static_cast<std::size_t>(t % 4);
    EXPECT_EQ(partial(p * q, i), partial(p, i) * q + p * partial(q, i));
  }
}

TEST(PolyEval, Examples) {
  const std::size_t n = 4;
  const auto p = x(n, 0) * x(n, 0) + x(n, 1);
  const std::vector<Rational> pt{3, 1, 0, 0};
  EXPECT_EQ(evaluate(p, pt), Rational(10));
  const std::vector<double> ptd{3.0, 1.0, 0.0, 0.0};
  EXPECT_EQ(evaluate(p, ptd), 10.0);

  Rng rng(3);
  const auto r = random_polynomial(rng, 4, 3, 6);
  const std::vector<Rational> origin(4, Rational(0));
  EXPECT_EQ(evaluate(r, origin), r.constant_term());
  EXPECT_THROW(evaluate(p, std::vector<Rational>{1, 2}), std::invalid_argument);
}

TEST(PolyEval, AgreesWithTermByTermOracle) {
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    const auto p = random_polynomial(rng, 8, 5, 8);
    std::vector<Rational> pt;
    for (int i = 0; i < 8; ++i) pt.push_back(random_rational(rng));
    EXPECT_EQ(evaluate(p, pt), naive_eval(p, pt));
  }
}

TEST(PolyEval, IsARingMorphism) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const auto p = random_polynomial(rng, 4, 3, 4);
    const auto q = random_polynomial(rng, 4, 3, 4);
    std::vector<Rational> pt;
    for (int i = 0; i < 4; ++i) pt.push_back(random_rational(rng));
    EXPECT_EQ(evaluate(p * q, pt), evaluate(p, pt) * evaluate(q, pt));
    EXPECT_EQ(evaluate(p + q, pt), evaluate(p, pt) + evaluate(q, pt));
  }
}

TEST(PolyRandom, DeterministicAndBounded) {
  EXPECT_EQ(random_polynomial(4, 2, 3, 7), random_polynomial(4, 2, 3, 7));
  EXPECT_TRUE(random_polynomial(4, 0, 5, 1).is_constant());
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = random_polynomial(4, 3, 6, seed);
    EXPECT_LE(p.degree(), 3);
    for (const auto& [m, c] : p.terms()) {
      EXPECT_TRUE(c.get().get_den() == 1);
      EXPECT_LE(abs(c.get()), 9);
      EXPECT_FALSE(c.is_zero());
    }
  }
}

TEST(PolyPromotion, ExplicitAndReversible) {
  const auto p = random_polynomial(4, 3, 5, 17);
  const GaussianPolynomial g = promote(p);
  EXPECT_EQ(real_part(g), p);
  EXPECT_TRUE(imag_part(g).is_zero());
  const GaussianPolynomial ig = g * GaussianRational::i();
  EXPECT_EQ(imag_part(ig), p);
  EXPECT_EQ(conj(conj(ig)), ig);
}
