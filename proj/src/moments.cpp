#include "digitstat/moments.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "digitstat/errors.hpp"

namespace digitstat {

MomentSet digit_moments(int q) {
  if (q < 2) throw UsageError("digit_moments: base must be >= 2, got " + std::to_string(q));
  MomentSet m;
  m.q = q;
  m.mu = (q - 1) / 2.0;
  m.sigma2 = (static_cast<double>(q) * q - 1.0) / 12.0;
  m.sigma = std::sqrt(m.sigma2);
  // |j - mu|^3 = |2j - (q-1)|^3 / 8; the integer sum keeps it exact.
  std::int64_t cubes = 0;
  for (std::int64_t j = 0; j < q; ++j) {
    const std::int64_t t = 2 * j - (q - 1);
    cubes += std::abs(t * t * t);
  }
  m.alpha3 = static_cast<double>(cubes) / (8.0 * q);
  if (q % 2 == 0) {
    const double closed = alpha3_even_closed_form(q);
    if (std::abs(closed - m.alpha3) > 1e-12 * closed) {
      throw Error("alpha3 cross-check failed for q=" + std::to_string(q));
    }
  }
  return m;
}

double alpha3_even_closed_form(int q) {
  const double qd = q;
  return qd * (qd * qd - 2.0) / 32.0;
}

double berry_esseen_bound(int q, double n) {
  if (n < 1) throw UsageError("berry_esseen_bound: n must be >= 1");
  const MomentSet m = digit_moments(q);
  const double constant = kBerryEsseenConstant * m.alpha3 / (m.sigma2 * m.sigma);
  return constant / std::sqrt(n);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double expected_freq_variance(double n, int q) {
  if (n < 1) throw UsageError("expected_freq_variance: n must be >= 1");
  if (q < 2) throw UsageError("expected_freq_variance: base must be >= 2");
  const double p = 1.0 / q;
  return p * (1.0 - p) / n;
}

}  // namespace digitstat
