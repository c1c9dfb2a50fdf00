// BBP digit extraction for pi in 64-bit fixed point.
//
//   16^d pi = 4 S(1) - 2 S(4) - S(5) - S(6)  (mod 1),
//   S(j)    = sum_k 16^(d-k) / (8k + j)
//
// Every term is a fraction in units of 2^-64 truncated toward zero, so the
// uint64 wrap-around of the sums is exactly "take the fractional part". Each
// truncation loses less than one unit; with d + 17 terms per series the total
// error stays below 4(d + 17) + 8 units, which is < 2^26 for d < 10^7. The
// extracted digit is the top nibble; the next eight hex digits are guards and
// a result is rejected when they are all 0 or all F, i.e. when the error bound
// could reach across a nibble boundary.

#include <cstdint>

#include "digitstat/digitstream.hpp"
#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

std::uint64_t pow16_mod(std::uint64_t exponent, std::uint64_t modulus) {
  if (modulus == 1) return 0;
  std::uint64_t result = 1;
  std::uint64_t base = 16 % modulus;
  while (exponent > 0) {
    if (exponent & 1) result = result * base % modulus;
    base = base * base % modulus;
    exponent >>= 1;
  }
  return result;
}

// frac(16^d * S(j)) in units of 2^-64.
std::uint64_t series_fraction(std::uint64_t d, std::uint64_t j) {
  std::uint64_t sum = 0;
  for (std::uint64_t k = 0; k <= d; ++k) {
    const std::uint64_t m = 8 * k + j;
    const auto numerator = static_cast<unsigned __int128>(pow16_mod(d - k, m)) << 64;
    sum += static_cast<std::uint64_t>(numerator / m);
  }
  for (std::uint64_t t = 1; t < 16; ++t) {
    const std::uint64_t m = 8 * (d + t) + j;
    sum += (std::uint64_t{1} << (64 - 4 * t)) / m;
  }
  return sum;
}

}  // namespace

int bbp_hex_digit(std::uint64_t position) {
  if (position < 1) throw UsageError("bbp: position is 1-based");
  if (position > kBbpMaxPosition) {
    throw PrecisionError("bbp: position " + std::to_string(position) +
                         " is beyond the validated range 1.." +
                         std::to_string(kBbpMaxPosition));
  }
  const std::uint64_t d = position - 1;
  const std::uint64_t x = 4 * series_fraction(d, 1) - 2 * series_fraction(d, 4) -
                          series_fraction(d, 5) - series_fraction(d, 6);
  constexpr std::uint64_t kGuardLow = std::uint64_t{1} << 28;
  constexpr std::uint64_t kLowMask = (std::uint64_t{1} << 60) - 1;
  const std::uint64_t low = x & kLowMask;
  if (low < kGuardLow || low > kLowMask - kGuardLow) {
    throw PrecisionError("bbp: guard digits cannot exclude a carry at position " +
                         std::to_string(position));
  }
  return static_cast<int>(x >> 60);
}

}  // namespace digitstat
