#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "hkt/quaternionic.hpp"

using namespace hkt;

namespace {

RealForm dx(std::size_t dim, std::size_t i) { return RealForm::dx(dim, i); }
RationalPolynomial var(std::size_t dim, std::size_t i) { return RationalPolynomial::variable(dim, i); }

std::vector<Rational> column(const RationalMatrix& m, std::size_t j) {
  std::vector<Rational> c(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) c[r] = m(r, j);
  return c;
}

std::vector<Rational> unit(std::size_t dim, std::size_t i) {
  std::vector<Rational> e(dim, Rational(0));
  e[i] = Rational(1);
  return e;
}

std::vector<Rational> mat_vec(const RationalMatrix& m, const std::vector<Rational>& v) {
  std::vector<Rational> out(m.rows(), Rational(0));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out[r] = out[r] + m(r, c) * v[c];
  }
  return out;
}

// Value of a constant form on a list of vectors, via the Leibniz determinant.
Rational evaluate_on_vectors(const RealForm& w, const std::vector<std::vector<Rational>>& vs) {
  const std::size_t k = vs.size();
  Rational s(0);
  for (const auto& [idx, p] : w.terms()) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      int inv = 0;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) inv += perm[a] > perm[b];
      }
      Rational t = p.constant_term() * Rational(inv % 2 ? -1 : 1);
      for (std::size_t r = 0; r < k; ++r) t = t * vs[perm[r]][idx[r]];
      s = s + t;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return s;
}

RealForm random_constant_form(Rng& rng, std::size_t dim, std::size_t k) {
  RealForm w(dim, k);
  for (const auto& idx : fiber_basis(dim, k)) {
    if (uniform_int(rng, 0, 1) == 0) w.add_term(idx, RationalPolynomial::constant(dim, random_rational(rng)));
  }
  return w;
}

RealForm rand_form(Rng& rng, std::size_t dim, std::size_t k) { return random_form(rng, dim, k, 3, 3, 4); }

std::vector<SpherePoint> ten_sphere_points() {
  Rng rng(77);
  auto pts = bilinearization_witnesses();
  for (auto& p : random_sphere_points(rng, 4)) pts.push_back(p);
  return pts;
}

}  // namespace

TEST(StandardModel, QuaternionIdentities) {
  for (int n : {1, 2, 3}) {
    const auto m = HypercomplexModel::standard(n);
    const auto id = RationalMatrix::identity(m.dim());
    EXPECT_EQ(m.I() * m.I(), -id);
    EXPECT_EQ(m.J() * m.J(), -id);
    EXPECT_EQ(m.K() * m.K(), -id);
    EXPECT_EQ(m.I() * m.J(), m.K());
    EXPECT_EQ(m.J() * m.I(), -m.K());
  }
  EXPECT_THROW(HypercomplexModel::standard(0), std::invalid_argument);
}

TEST(StandardModel, LeftMultiplicationBlocks) {
  const auto m = HypercomplexModel::standard(1);
  EXPECT_EQ(column(m.I(), 0), unit(4, 1));
  EXPECT_EQ(column(m.J(), 0), unit(4, 2));
  EXPECT_EQ(column(m.K(), 0), unit(4, 3));
  // IJ(e0) = I(e2) = e3 = K(e0)
  EXPECT_EQ(mat_vec(m.I(), column(m.J(), 0)), unit(4, 3));
  EXPECT_EQ(column(m.J(), 1), mat_vec(RationalMatrix::identity(4) * Rational(-1), unit(4, 3)));
  EXPECT_EQ(column(m.K(), 2), mat_vec(RationalMatrix::identity(4) * Rational(-1), unit(4, 1)));

  const auto m2 = HypercomplexModel::standard(2);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const bool same_block = r / 4 == c / 4;
      EXPECT_EQ(m2.I()(r, c), same_block ? m.I()(r % 4, c % 4) : Rational(0));
      EXPECT_EQ(m2.K()(r, c), same_block ? m.K()(r % 4, c % 4) : Rational(0));
    }
  }
}

TEST(SphereOperator, RationalPoints) {
  const auto m = HypercomplexModel::standard(1);
  EXPECT_EQ(sphere_operator(m, SpherePoint::i()).matrix(), m.I());
  const auto op = sphere_operator(m, {Rational(3, 5), Rational(4, 5), 0});
  EXPECT_EQ(op.matrix(), (Rational(3) * m.I() + Rational(4) * m.J()) * Rational(1, 5));
  EXPECT_EQ(op.matrix() * op.matrix(), -RationalMatrix::identity(4));
  EXPECT_NO_THROW(sphere_operator(m, {Rational(2, 3), Rational(2, 3), Rational(1, 3)}));
  EXPECT_THROW(SpherePoint(Rational(1, 2), Rational(1, 2), 0), std::invalid_argument);

  Rng rng(4);
  for (const auto& p : random_sphere_points(rng, 20)) {
    EXPECT_EQ(p.a() * p.a() + p.b() * p.b() + p.c() * p.c(), Rational(1));
    EXPECT_NO_THROW(sphere_operator(HypercomplexModel::standard(2), p));
  }
}

TEST(Act, Examples) {
  const auto m = HypercomplexModel::standard(1);
  EXPECT_EQ(act(m.op_I(), dx(4, 0)), dx(4, 1));
  EXPECT_EQ(act(m.op_J(), dx(4, 0)), dx(4, 2));
  EXPECT_EQ(act(m.op_K(), dx(4, 0)), dx(4, 3));
  const RealForm w = RealForm::basis(4, {0, 1});
  EXPECT_EQ(act(m.op_I(), w), w);
  EXPECT_THROW(act(m.op_I(), dx(8, 0)), std::invalid_argument);
}

TEST(Act, TwiceIsSignedIdentity) {
  Rng rng(21);
  for (int n : {1, 2}) {
    const auto m = HypercomplexModel::standard(n);
    const auto ops = {m.op_I(), m.op_J(), m.op_K(), m.structure({Rational(2, 3), Rational(2, 3), Rational(1, 3)})};
    for (const auto& op : ops) {
      for (std::size_t k = 1; k <= 3; ++k) {
        const RealForm w = rand_form(rng, m.dim(), k);
        EXPECT_EQ(act(op, act(op, w)), w * Rational(k % 2 ? -1 : 1));
      }
    }
  }
}

TEST(TwistedD, Examples) {
  const std::size_t n = 4;
  const auto m = HypercomplexModel::standard(1);
  const RealForm f = RealForm::function(var(n, 0) * var(n, 0));
  EXPECT_EQ(twisted_d(m.op_I(), f), (Rational(2) * var(n, 0)) * dx(n, 1));
  EXPECT_TRUE(twisted_d(m.op_I(), RealForm::function(RationalPolynomial::constant(n, 7))).is_zero());
  EXPECT_EQ(ext_d(twisted_d(m.op_I(), f)), RealForm::basis(n, {0, 1}) * Rational(2));
}

TEST(TwistedD, PairwiseAnticommuteAndSquareToZero) {
  Rng rng(5);
  for (int n : {1, 2}) {
    const auto m = HypercomplexModel::standard(n);
    auto d_of = [&](int which, const RealForm& w) -> RealForm {
      switch (which) {
        case 0: return ext_d(w);
        case 1: return twisted_d(m.op_I(), w);
        case 2: return twisted_d(m.op_J(), w);
        default: return twisted_d(m.op_K(), w);
      }
    };
    for (int t = 0; t < (n == 1 ? 12 : 4); ++t) {
      const RealForm w = rand_form(rng, m.dim(), static_cast<std::size_t>(t % 3));
      for (int a = 0; a < 4; ++a) {
        EXPECT_TRUE(d_of(a, d_of(a, w)).is_zero());
        for (int b = a + 1; b < 4; ++b) {
          EXPECT_TRUE((d_of(a, d_of(b, w)) + d_of(b, d_of(a, w))).is_zero()) << a << b;
        }
      }
    }
  }
}

TEST(ActBilinear, ExamplesAndAverage) {
  const auto m = HypercomplexModel::standard(1);
  const auto delta = BilinearForm::identity(4);
  EXPECT_EQ(act_bilinear(m.op_I(), delta), delta);
  RationalPolynomial half_r2(4);
  for (std::size_t i = 0; i < 4; ++i) half_r2 += Rational(1, 2) * (var(4, i) * var(4, i));
  EXPECT_EQ(act_bilinear(m.op_J(), hessian(half_r2)), delta);

  BilinearForm nonsym(4, false);
  nonsym.set(0, 1, RationalPolynomial::constant(4, 1));
  EXPECT_THROW(act_bilinear(m.op_I(), nonsym), std::invalid_argument);

  Rng rng(6);
  for (int n : {1, 2}) {
    const auto model = HypercomplexModel::standard(n);
    for (int t = 0; t < 10; ++t) {
      RationalMatrix s(model.dim(), model.dim());
      for (std::size_t i = 0; i < model.dim(); ++i) {
        for (std::size_t j = i; j < model.dim(); ++j) s(i, j) = s(j, i) = random_rational(rng);
      }
      const auto b = BilinearForm::from_matrix(s);
      const BilinearForm avg = (b + act_bilinear(model.op_I(), b) + act_bilinear(model.op_J(), b) +
                                act_bilinear(model.op_K(), b)) *
                               Rational(1, 4);
      EXPECT_TRUE(avg.is_symmetric_exact());
      EXPECT_EQ(act_bilinear(model.op_I(), avg), avg);
      EXPECT_EQ(act_bilinear(model.op_J(), avg), avg);
      EXPECT_EQ(act_bilinear(model.op_K(), avg), avg);
    }
  }
}

TEST(SlotPairInsertion, MatchesDirectEvaluation) {
  Rng rng(14);
  const auto m = HypercomplexModel::standard(1);
  const std::vector<RationalMatrix> mats{m.I(), m.J(), m.K(), m.structure({Rational(3, 5), 0, Rational(4, 5)}).matrix()};
  for (int t = 0; t < 12; ++t) {
    const std::size_t k = t % 2 ? 3 : 2;
    const RealForm w = random_constant_form(rng, 4, k);
    const auto& a = mats[static_cast<std::size_t>(t) % mats.size()];
    const auto& b = mats[static_cast<std::size_t>(t + 1) % mats.size()];
    const RealForm s = slot_pair_insertion(a, b, w);
    for (const auto& idx : fiber_basis(4, k)) {
      Rational expected(0);
      for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
          if (p == q) continue;
          std::vector<std::vector<Rational>> vs;
          for (std::size_t r = 0; r < k; ++r) {
            const auto e = unit(4, idx[r]);
            vs.push_back(r == p ? mat_vec(a, e) : r == q ? mat_vec(b, e) : e);
          }
          expected = expected + evaluate_on_vectors(w, vs);
        }
      }
      EXPECT_EQ(s.component(idx).constant_term(), expected * Rational(1, 2));
    }
  }
}

TEST(ComplexTypePart, FlatKahlerFormHasNoZeroTwoPart) {
  const auto m = HypercomplexModel::standard(1);
  const RealForm f_i = RealForm::basis(4, {0, 1}) + RealForm::basis(4, {2, 3});
  EXPECT_TRUE(complex_type_part(m.op_I(), f_i, TypePart::p02).is_zero());
  EXPECT_TRUE(complex_type_part(m.op_I(), f_i, TypePart::p20).is_zero());
  EXPECT_FALSE(complex_type_part(m.op_J(), f_i, TypePart::p02).is_zero());
  EXPECT_THROW(complex_type_part(m.op_I(), f_i, TypePart::p03), std::invalid_argument);
}

TEST(ComplexTypePart, ProjectorAlgebraAtTenSpherePoints) {
  Rng rng(15);
  for (int n : {1, 2}) {
    const auto m = HypercomplexModel::standard(n);
    for (const auto& p : ten_sphere_points()) {
      const auto op = m.structure(p);
      const RealForm w2 = rand_form(rng, m.dim(), 2);
      const ComplexForm c02 = complex_type_part(op, w2, TypePart::p02);
      const ComplexForm c20 = complex_type_part(op, w2, TypePart::p20);
      const ComplexForm c11 = promote(real_11_part(op, w2));
      EXPECT_EQ(c02 + c20 + c11, promote(w2));
      EXPECT_EQ(complex_type_part(op, c02, TypePart::p02), c02);
      EXPECT_TRUE(complex_type_part(op, c20, TypePart::p02).is_zero());
      EXPECT_TRUE(complex_type_part(op, c02, TypePart::p20).is_zero());
      EXPECT_TRUE(complex_type_part(op, c11, TypePart::p02).is_zero());
      EXPECT_EQ(c20, conj(c02));

      const RealForm w3 = rand_form(rng, m.dim(), 3);
      const ComplexForm c03 = complex_type_part(op, w3, TypePart::p03);
      const ComplexForm c30 = complex_type_part(op, w3, TypePart::p30);
      EXPECT_EQ(complex_type_part(op, c03, TypePart::p03), c03);
      EXPECT_TRUE(complex_type_part(op, c30, TypePart::p03).is_zero());
      EXPECT_TRUE(complex_type_part(op, c03, TypePart::p30).is_zero());
      EXPECT_EQ(c30, conj(c03));
    }
  }
}

// Eigenspace oracle: the (0,1)-forms are (a + i a(I.))/2, on which the
// derivation extension of I acts by -i; so (0,k)-forms carry eigenvalue -ki.
TEST(ComplexTypePart, AgreesWithZeroOneWedgeOracle) {
  Rng rng(16);
  const auto m = HypercomplexModel::standard(2);
  for (const auto& p : ten_sphere_points()) {
    const auto op = m.structure(p);
    auto zero_one = [&](const RealForm& a) {
      return (promote(a) + promote(act_slots(op, a)) * GaussianRational::i()) * GaussianRational(Rational(1, 2));
    };
    const ComplexForm a = zero_one(random_constant_form(rng, 8, 1));
    const ComplexForm b = zero_one(random_constant_form(rng, 8, 1));
    const ComplexForm c = zero_one(random_constant_form(rng, 8, 1));
    const ComplexForm ab = wedge(a, b);
    const ComplexForm abc = wedge(ab, c);
    EXPECT_EQ(complex_type_part(op, ab, TypePart::p02), ab);
    EXPECT_TRUE(complex_type_part(op, ab, TypePart::p20).is_zero());
    ASSERT_FALSE(abc.is_zero());
    EXPECT_EQ(complex_type_part(op, abc, TypePart::p03), abc);
    EXPECT_TRUE(complex_type_part(op, conj(abc), TypePart::p03).is_zero());

    const ComplexForm proj = complex_type_part(op, random_constant_form(rng, 8, 2), TypePart::p02);
    EXPECT_EQ(slot_derivation(op.matrix(), proj), proj * GaussianRational(0, -2));
  }
}
