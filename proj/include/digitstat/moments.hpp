#pragma once

// Per-digit moments of the uniform base-q digit model, the Berry-Esseen
// distance bound and standard normal reference functions.

namespace digitstat {

/// Constant of the Berry-Esseen inequality for identically distributed summands.
inline constexpr double kBerryEsseenConstant = 0.4748;

struct MomentSet {
  int q = 10;
  double mu = 0.0;      ///< (q-1)/2
  double sigma2 = 0.0;  ///< (q^2-1)/12
  double sigma = 0.0;
  double alpha3 = 0.0;  ///< E|X - mu|^3, by direct summation
};

/// Throws UsageError for q < 2.
MomentSet digit_moments(int q);

/// q(q^2-2)/32, the closed form of alpha3 that holds for even q only.
double alpha3_even_closed_form(int q);

/// 0.4748 * alpha3 / (sigma^3 sqrt(n)): uniform bound on |F_n(x) - Phi(x)|.
double berry_esseen_bound(int q, double n);

/// Standard normal CDF, via the complementary error function:
/// Phi(x) = erfc(-x / sqrt 2) / 2. Absolute error well below 1e-15.
double normal_cdf(double x);

double normal_pdf(double x);

/// p(1-p)/n with p = 1/q: variance of one digit's observed frequency.
double expected_freq_variance(double n, int q);

}  // namespace digitstat
