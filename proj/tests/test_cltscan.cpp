#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "digitstat/cltscan.hpp"
#include "digitstat/errors.hpp"
#include "oracles.hpp"

using namespace digitstat;

TEST(Uint128, DecimalRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const uint128 v = (static_cast<uint128>(rng()) << 64) | rng();
    EXPECT_TRUE(parse_uint128(to_decimal(v)) == v);
  }
  EXPECT_EQ(to_decimal(0), "0");
  const uint128 max = ~uint128{0};
  EXPECT_EQ(to_decimal(max), "340282366920938463463374607431768211455");
  EXPECT_THROW(parse_uint128("340282366920938463463374607431768211456"), UsageError);
  EXPECT_THROW(parse_uint128(""), UsageError);
  EXPECT_THROW(parse_uint128("-1"), UsageError);
  EXPECT_THROW(parse_uint128("12a"), UsageError);
}

TEST(Scan, UpdateIsExact) {
  ScanState s{10, 0, 0};
  for (Digit d : {3, 1, 4, 1, 5}) s = scan_update(s, d);
  EXPECT_EQ(s.n, 5u);
  EXPECT_TRUE(s.sum == 14);
  EXPECT_THROW(scan_update(s, 10), UsageError);
}

TEST(Deviation, WorkedExample) {
  // n = 5, S = 20: (20 - 22.5) / (sqrt(8.25) sqrt(5)).
  const MomentSet m = digit_moments(10);
  EXPECT_NEAR(deviation(5, 20, m), -0.38925, 5e-6);
  EXPECT_NEAR(deviation(5, 20, m), -2.5 / std::sqrt(8.25 * 5), 1e-15);
  EXPECT_EQ(deviation(2, 9, m), 0.0);
  EXPECT_THROW(deviation(0, 0, m), UsageError);
}

TEST(Deviation, MatchesBigIntegerOracle) {
  std::mt19937_64 rng(5);
  for (int q : {2, 10, 16, 36}) {
    const MomentSet m = digit_moments(q);
    for (std::size_t len : {1u, 10u, 999u, 100000u}) {
      const auto digits = oracle::random_digits(rng, len, q);
      ScanState s{q, 0, 0};
      for (Digit d : digits) s = scan_update(s, d);
      const double want = oracle::exact_deviation(digits, q);
      EXPECT_NEAR(deviation(s, m), want, 1e-13 * std::max(1.0, std::fabs(want))) << q << " " << len;
    }
  }
}

TEST(Deviation, ExtremeSums) {
  // All nines or all zeros: d = +-sqrt(n) * 4.5 / sigma.
  const MomentSet m = digit_moments(10);
  const std::uint64_t n = 1'000'000'000'000ULL;
  const double want = 4.5 * std::sqrt(static_cast<double>(n)) / m.sigma;
  EXPECT_NEAR(deviation(n, static_cast<uint128>(9) * n, m), want, 1e-12 * want);
  EXPECT_NEAR(deviation(n, 0, m), -want, 1e-12 * want);
}

TEST(Histogram, StepValidation) {
  EXPECT_EQ(HistogramAccumulator::with_step(0.1).bins_per_unit(), 10);
  EXPECT_EQ(HistogramAccumulator::with_step(0.025).bins_per_unit(), 40);
  EXPECT_EQ(HistogramAccumulator::with_step(0.1).bin_count(), 60u);
  EXPECT_EQ(HistogramAccumulator::with_step(0.025).bin_count(), 240u);
  EXPECT_THROW(HistogramAccumulator::with_step(0.3), UsageError);
  EXPECT_THROW(HistogramAccumulator::with_step(0.0), UsageError);
  EXPECT_THROW(HistogramAccumulator::with_step(-0.1), UsageError);
}

TEST(Histogram, EdgesAndBinAssignment) {
  HistogramAccumulator h(10);
  EXPECT_EQ(h.left_edge(0), -3.0);
  EXPECT_EQ(h.right_edge(59), 3.0);
  EXPECT_EQ(h.right_edge(30), 0.1);
  h.add(-3.0);   // underflow (bins are right-closed)
  h.add(-2.95);  // bin 0
  h.add(0.1);    // bin 30: (0, 0.1]
  h.add(0.0);    // bin 29: (-0.1, 0]
  h.add(3.0);    // bin 59
  h.add(3.0000001);
  h.add(-1e300);
  h.add(std::numeric_limits<double>::infinity());
  EXPECT_EQ(h.underflow(), 2u);
  EXPECT_EQ(h.overflow(), 2u);
  EXPECT_EQ(h.bins()[0], 1u);
  EXPECT_EQ(h.bins()[29], 1u);
  EXPECT_EQ(h.bins()[30], 1u);
  EXPECT_EQ(h.bins()[59], 1u);
  EXPECT_EQ(h.total(), 8u);
  EXPECT_THROW(h.add(std::nan("")), UsageError);
}

// Brute force: a value belongs to the unique bin whose edges bracket it.
TEST(Histogram, PropertyMatchesLinearSearch) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> wide(-3.5, 3.5);
  for (int m : {10, 40, 7}) {
    HistogramAccumulator h(m);
    std::vector<std::uint64_t> want(h.bin_count(), 0);
    std::uint64_t under = 0, over = 0;
    for (int i = 0; i < 20000; ++i) {
      // Mix of random points and exact edges.
      double x = wide(rng);
      if (i % 5 == 0) x = static_cast<double>(static_cast<int>(rng() % (6 * m + 1)) - 3 * m) / m;
      h.add(x);
      if (x <= -3.0) {
        ++under;
      } else if (x > 3.0) {
        ++over;
      } else {
        for (std::size_t b = 0; b < h.bin_count(); ++b) {
          if (x > h.left_edge(b) && x <= h.right_edge(b)) {
            ++want[b];
            break;
          }
        }
      }
    }
    EXPECT_EQ(h.bins(), want) << m;
    EXPECT_EQ(h.underflow(), under);
    EXPECT_EQ(h.overflow(), over);
  }
}

TEST(Histogram, ConservationAndCumulativeIsPrefixSum) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.3);
  for (int m : {10, 40}) {
    HistogramAccumulator h(m);
    for (int i = 0; i < 50000; ++i) h.add(normal(rng));
    std::uint64_t total = h.underflow() + h.overflow();
    for (std::uint64_t c : h.bins()) total += c;
    EXPECT_EQ(total, h.total());

    const auto density = hist_density(h);
    const auto cumulative = hist_cumulative(h);
    ASSERT_EQ(cumulative.size(), density.size() + 1);
    EXPECT_EQ(cumulative.front().cum_count, h.underflow());
    std::uint64_t running = h.underflow();
    double frac_sum = 0, area = 0;
    for (std::size_t b = 0; b < density.size(); ++b) {
      running += density[b].count;
      frac_sum += density[b].frac;
      area += density[b].density * h.step();
      EXPECT_EQ(cumulative[b + 1].cum_count, running);
      EXPECT_EQ(cumulative[b + 1].x, density[b].x_right);
    }
    EXPECT_EQ(running + h.overflow(), h.total());
    const double inside = static_cast<double>(h.total() - h.underflow() - h.overflow()) / h.total();
    EXPECT_NEAR(frac_sum, inside, 1e-12);
    EXPECT_NEAR(area, inside, 1e-12);
    EXPECT_NEAR(cumulative.back().cum_frac, inside + static_cast<double>(h.underflow()) / h.total(), 1e-15);
  }
}

TEST(Histogram, ReferenceColumns) {
  HistogramAccumulator h(10);
  h.add(0.05);
  const auto density = hist_density(h);
  EXPECT_DOUBLE_EQ(density[30].phi_ref, normal_pdf(0.05));
  EXPECT_DOUBLE_EQ(density[30].density, 10.0);
  const auto cumulative = hist_cumulative(h);
  EXPECT_DOUBLE_EQ(cumulative[0].phi_ref, normal_cdf(-3.0));
  EXPECT_DOUBLE_EQ(cumulative[31].phi_ref, normal_cdf(0.1));
  EXPECT_THROW(hist_density(HistogramAccumulator(10)), UsageError);
}

TEST(Histogram, MergeEqualsSingleAccumulator) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  HistogramAccumulator whole(40), left(40), right(40);
  for (int i = 0; i < 10000; ++i) {
    const double x = normal(rng);
    whole.add(x);
    (i < 4321 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_TRUE(left == whole);
  EXPECT_THROW(left.merge(HistogramAccumulator(10)), UsageError);
}

TEST(Frequency, RepeatingCycleHasZeroVariance) {
  FrequencyTable t(10);
  for (int i = 0; i < 10000; ++i) t = freq_update(t, static_cast<Digit>(i % 10));
  EXPECT_EQ(t.n(), 10000u);
  EXPECT_EQ(freq_variance(t), 0.0);
  EXPECT_THROW(freq_update(t, 10), UsageError);
  EXPECT_THROW(freq_variance(FrequencyTable(10)), UsageError);
}

TEST(Frequency, VarianceByHand) {
  FrequencyTable t(2);
  for (Digit d : {0, 0, 0, 1}) t.update(d);
  // f = (0.75, 0.25), p = 0.5: ((0.25)^2 + (0.25)^2) / 2
  EXPECT_DOUBLE_EQ(freq_variance(t), 0.0625);
}

TEST(Frequency, RandomDigitsNearModelVariance) {
  // Mean of the per-digit squared error over many trials approaches p(1-p)/n.
  std::mt19937_64 rng(99);
  const std::size_t n = 2000;
  double mean = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    FrequencyTable table(10);
    table.update(oracle::random_digits(rng, n, 10));
    mean += freq_variance(table);
  }
  mean /= trials;
  EXPECT_NEAR(mean / expected_freq_variance(static_cast<double>(n), 10), 1.0, 0.05);
}
