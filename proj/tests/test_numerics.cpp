#include <gtest/gtest.h>

#include <random>
#include <set>

#include "quidd/numerics.hpp"

using namespace quidd;

namespace {

Complex cplx(double re, double im = 0.0, unsigned bits = kDefaultMantissaBits) {
  return Complex(re, im, bits);
}

}  // namespace

TEST(Real, ArithmeticAndParse) {
  Real a = Real::parse("0.5", 128);
  Real b(0.25, 128);
  EXPECT_EQ(a + b, Real(0.75, 128));
  EXPECT_EQ(a * b, Real(0.125, 128));
  EXPECT_EQ(a / b, Real(2.0, 128));
  EXPECT_EQ((a - b).sign(), 1);
  EXPECT_EQ(Real(4.0, 64).sqrt(), Real(2.0, 64));
  EXPECT_EQ(Real(3.0, 64).ldexp(-2), Real(0.75, 64));
  EXPECT_THROW(Real(-1.0, 64).sqrt(), std::domain_error);
  EXPECT_THROW(Real::parse("abc", 64), std::invalid_argument);
  EXPECT_THROW(Real::parse("1.0x", 64), std::invalid_argument);
}

TEST(Real, MovedFromCanBeReassigned) {
  Real a(1.5, 64);
  Real b = std::move(a);
  a = Real(2.0, 64);
  EXPECT_EQ(a, Real(2.0, 64));
  EXPECT_EQ(b, Real(1.5, 64));
}

TEST(Complex, Arithmetic) {
  Complex i = cplx(0, 1);
  EXPECT_EQ(i * i, cplx(-1));
  EXPECT_EQ(cplx(1, 2).conj(), cplx(1, -2));
  EXPECT_EQ(cplx(3, 4).norm(), Real(25.0, 128));
  EXPECT_EQ(cplx(3, 4).abs(), Real(5.0, 128));
  EXPECT_EQ(cplx(1, 1) / cplx(0, 1), cplx(1, -1));
  EXPECT_EQ(cplx(1, 1).ldexp(3), cplx(8, 8));
  EXPECT_EQ(cplx(0, -1).to_string(), "-i");
  EXPECT_EQ(cplx(0.5, -2).to_string(), "0.5-2i");
}

TEST(Complex, Determinism) {
  Complex a = root_of_unity(3, 7, 128), b = root_of_unity(3, 7, 128);
  EXPECT_EQ(a * b, root_of_unity(3, 7, 128) * root_of_unity(3, 7, 128));
}

TEST(RootOfUnity, ExactOnAxesAndDiagonals) {
  EXPECT_EQ(root_of_unity(0, 5, 128), cplx(1));
  EXPECT_EQ(root_of_unity(1, 4, 128), cplx(0, 1));
  EXPECT_EQ(root_of_unity(2, 4, 128), cplx(-1));
  EXPECT_EQ(root_of_unity(-1, 4, 128), cplx(0, -1));
  Complex w = root_of_unity(1, 8, 128);
  EXPECT_EQ(w.re(), w.im());
  EXPECT_EQ((w * w).re().abs().to_double() < 1e-35, true);
  EXPECT_EQ(root_of_unity(3, 8, 128).re(), -w.re());
}

TEST(RootOfUnity, PowerIsOne) {
  for (long n : {3L, 5L, 6L, 12L, 16L}) {
    for (long k = 0; k < n; ++k) {
      Complex p = cplx(1);
      const Complex w = root_of_unity(k, n, 128);
      for (long j = 0; j < n; ++j) p = p * w;
      EXPECT_LT((p - cplx(1)).abs().to_double(), 1e-35) << k << "/" << n;
    }
  }
}

TEST(InvSqrt2Pow, Values) {
  EXPECT_EQ(inv_sqrt2_pow(4, 128), Real(0.25, 128));
  EXPECT_NEAR(inv_sqrt2_pow(1, 128).to_double(), std::sqrt(0.5), 1e-16);
  EXPECT_EQ(inv_sqrt2_pow(3, 128) * inv_sqrt2_pow(1, 128), Real(0.25, 128));
}

TEST(Dedup, ExamplesFromDefinition) {
  PrecisionConfig cfg;
  const Complex x = cplx(0.3, -0.7);
  EXPECT_TRUE(dedup_equal(x, x, cfg));

  Complex s = Complex(Real(0.5, 128).sqrt(), Real(128));
  Complex t = s * Complex(Real(1.0, 128) + Real::parse("1e-35", 128), Real(128));
  EXPECT_FALSE(s == t);
  EXPECT_TRUE(dedup_equal(s, t, cfg));

  PrecisionConfig exact{53, 0.0, ComparisonMode::relative};
  Complex sum = cplx(0.1, 0, 53) + cplx(0.2, 0, 53);
  EXPECT_FALSE(dedup_equal(sum, cplx(0.3, 0, 53), exact));
}

TEST(Dedup, SymmetricAndModeDependent) {
  PrecisionConfig rel{128, 1e-3, ComparisonMode::relative};
  PrecisionConfig abs{128, 1e-3, ComparisonMode::absolute};
  const Complex a = cplx(1000.0), b = cplx(1000.5);
  EXPECT_TRUE(dedup_equal(a, b, rel));
  EXPECT_TRUE(dedup_equal(b, a, rel));
  EXPECT_FALSE(dedup_equal(a, b, abs));
  EXPECT_TRUE(dedup_equal(cplx(1e-6), cplx(0), abs));
  EXPECT_FALSE(dedup_equal(cplx(1e-6), cplx(0), rel));
}

TEST(TerminalTable, InternBasics) {
  TerminalTable t;
  const auto z0 = t.intern(cplx(0));
  EXPECT_EQ(t.intern(cplx(0)), z0);
  EXPECT_NE(t.intern(cplx(0.5)), t.intern(cplx(-0.5)));
  EXPECT_EQ(t.size(), 3u);
}

TEST(TerminalTable, DeepAmplitudeSurvivesAt256Bits) {
  PrecisionConfig cfg{256, 1e-30, ComparisonMode::relative};
  TerminalTable t(cfg);
  const auto zero = t.intern(Complex(256));
  const Real tiny = inv_sqrt2_pow(2048, 256);
  EXPECT_FALSE(tiny.is_zero());
  const auto idx = t.intern(Complex(tiny, Real(256)));
  EXPECT_NE(idx, zero);
  EXPECT_FALSE(t.value(idx).is_zero());
}

TEST(TerminalTable, PrecisionSufficiencyAt128Bits) {
  TerminalTable t;
  const auto zero = t.intern(Complex(128));
  for (long n : {100L, 200L, 400L}) {
    const auto a = t.intern(Complex(inv_sqrt2_pow(n, 128), Real(128)));
    const auto b = t.intern(Complex(inv_sqrt2_pow(n + 2, 128), Real(128)));
    EXPECT_NE(a, zero);
    EXPECT_NE(a, b);
  }
}

TEST(TerminalTable, InternIsIdempotent) {
  TerminalTable t;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const Complex v = cplx(u(rng), u(rng));
    const auto idx = t.intern(v);
    EXPECT_EQ(t.intern(t.value(idx)), idx);
    EXPECT_EQ(t.intern(v), idx);
  }
}

TEST(TerminalTable, ExactModeHoldsDistinctDyadics) {
  TerminalTable t(PrecisionConfig{128, 0.0, ComparisonMode::relative});
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-16, 16);
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < 500; ++i) {
    const int re = num(rng), im = num(rng);
    seen.insert({re, im});
    t.intern(cplx(re / 8.0, im / 8.0));
  }
  EXPECT_EQ(t.size(), seen.size());
}

TEST(TerminalTable, FirstMatchWins) {
  TerminalTable t(PrecisionConfig{128, 0.1, ComparisonMode::relative});
  const auto a = t.intern(cplx(1.0));
  EXPECT_EQ(t.intern(cplx(1.08)), a);
  const auto c = t.intern(cplx(1.15));
  EXPECT_NE(c, a);
  // Within tolerance of both stored values; the earlier one wins.
  EXPECT_EQ(t.intern(cplx(1.07)), a);
  EXPECT_EQ(t.value(a), cplx(1.0));
}

TEST(TerminalTable, ReleaseKeepsIndicesStable) {
  TerminalTable t;
  const auto a = t.intern(cplx(1));
  const auto b = t.intern(cplx(2));
  t.release(a);
  EXPECT_FALSE(t.contains(a));
  EXPECT_TRUE(t.contains(b));
  EXPECT_EQ(t.value(b), cplx(2));
  const auto c = t.intern(cplx(1));
  EXPECT_NE(c, a);
  EXPECT_EQ(t.issued(), 3u);
  EXPECT_EQ(t.size(), 2u);
}

TEST(TerminalTable, RejectsBadConfig) {
  EXPECT_THROW(TerminalTable(PrecisionConfig{4, 1e-30, ComparisonMode::relative}),
               std::invalid_argument);
  EXPECT_THROW(TerminalTable(PrecisionConfig{128, -1.0, ComparisonMode::relative}),
               std::invalid_argument);
}
