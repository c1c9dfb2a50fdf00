#include <gtest/gtest.h>

#include <cmath>

#include "digitstat/errors.hpp"
#include "digitstat/moments.hpp"

using namespace digitstat;

TEST(Moments, DecimalDigits) {
  const MomentSet m = digit_moments(10);
  EXPECT_EQ(m.mu, 4.5);
  EXPECT_EQ(m.sigma2, 8.25);
  EXPECT_EQ(m.alpha3, 30.625);
  EXPECT_NEAR(m.sigma, 2.872, 5e-4);
  EXPECT_DOUBLE_EQ(m.sigma, std::sqrt(8.25));
}

TEST(Moments, Binary) {
  const MomentSet m = digit_moments(2);
  EXPECT_EQ(m.mu, 0.5);
  EXPECT_EQ(m.sigma2, 0.25);
  EXPECT_EQ(m.alpha3, 0.125);
}

TEST(Moments, Hex) {
  const MomentSet m = digit_moments(16);
  EXPECT_EQ(m.mu, 7.5);
  EXPECT_DOUBLE_EQ(m.sigma, 4.60977222864644);
}

// alpha3 by explicit enumeration of |j - mu|^3 over j = 0..q-1.
TEST(Moments, Alpha3MatchesEnumerationForAllBases) {
  for (int q = 2; q <= 36; ++q) {
    double mu = 0;
    for (int j = 0; j < q; ++j) mu += j;
    mu /= q;
    double a3 = 0, var = 0;
    for (int j = 0; j < q; ++j) {
      a3 += std::pow(std::fabs(j - mu), 3);
      var += (j - mu) * (j - mu);
    }
    a3 /= q;
    var /= q;
    const MomentSet m = digit_moments(q);
    EXPECT_NEAR(m.alpha3, a3, 1e-12 * a3) << q;
    EXPECT_NEAR(m.sigma2, var, 1e-12 * var) << q;
    if (q % 2 == 0) EXPECT_DOUBLE_EQ(alpha3_even_closed_form(q), m.alpha3) << q;
  }
}

TEST(Moments, OddBaseDiffersFromEvenClosedForm) {
  // q = 3: values 0,1,2, mu = 1, alpha3 = 2/3.
  EXPECT_DOUBLE_EQ(digit_moments(3).alpha3, 2.0 / 3.0);
  EXPECT_NE(alpha3_even_closed_form(3), 2.0 / 3.0);
}

TEST(Moments, RejectsBaseBelowTwo) {
  EXPECT_THROW(digit_moments(1), UsageError);
  EXPECT_THROW(digit_moments(0), UsageError);
}

TEST(BerryEsseen, DecimalConstant) {
  // 0.4748 * 30.625 / 8.25^1.5 = 0.61362901232431...
  EXPECT_NEAR(berry_esseen_bound(10, 1.0), 0.6136290123243184, 1e-14);
  EXPECT_NEAR(berry_esseen_bound(10, 1e6) * 1e3, 0.6136290123243184, 1e-13);
  for (double n : {1.0, 10.0, 1e9, 1e12}) {
    EXPECT_NEAR(berry_esseen_bound(10, n) * std::sqrt(n), 0.6136, 5e-4);
  }
}

TEST(BerryEsseen, DecreasesLikeInverseSqrt) {
  for (int q : {2, 10, 16}) {
    EXPECT_NEAR(berry_esseen_bound(q, 400) / berry_esseen_bound(q, 100), 0.5, 1e-15);
  }
}

TEST(Normal, FrozenReferenceValues) {
  // High-precision reference values.
  EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429486, 1e-15);
  EXPECT_NEAR(normal_cdf(-1.0), 0.1586552539314570514, 1e-15);
  EXPECT_NEAR(normal_cdf(2.5), 0.99379033467422386, 1e-15);
  EXPECT_NEAR(normal_cdf(-3.7), 0.000107799733477388261, 1e-18);
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_pdf(0.0), 0.39894228040143267794, 1e-16);
  EXPECT_NEAR(normal_pdf(3.0), 0.004431848411938007176, 1e-17);
  EXPECT_NEAR(normal_pdf(1.7), 0.09404907737688693026, 1e-16);
}

TEST(Normal, Symmetry) {
  for (double x = -6; x <= 6; x += 0.37) {
    EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15) << x;
    EXPECT_DOUBLE_EQ(normal_pdf(x), normal_pdf(-x)) << x;
  }
}

TEST(Normal, CdfIsIntegralOfPdf) {
  // Composite Simpson over [-8, x].
  for (double x : {-2.0, -0.5, 0.0, 0.8, 2.2}) {
    const int steps = 4000;
    const double a = -8, h = (x - a) / steps;
    double s = normal_pdf(a) + normal_pdf(x);
    for (int i = 1; i < steps; ++i) s += normal_pdf(a + i * h) * (i % 2 ? 4 : 2);
    EXPECT_NEAR(s * h / 3, normal_cdf(x), 1e-12) << x;
  }
}

TEST(FrequencyVariance, TruebExample) {
  const double v = expected_freq_variance(2.24592e13, 10);
  EXPECT_NEAR(v, 4.00727e-15, 1e-19);
  EXPECT_NEAR(v, 4.01e-15, 0.01 * 4.01e-15);
  EXPECT_NEAR(std::sqrt(v), 0.63e-7, 0.005e-7);
}
