#pragma once

#include <cstdint>

#include "digitstat/digitstream.hpp"

namespace digitstat {

/// Seed-reproducible uniform base-q digits.
///
/// Algorithm: std::mt19937_64 seeded with `seed` (its output sequence is fixed
/// by the C++ standard). With m the largest exponent such that q^m fits in 64
/// bits, each 64-bit draw x is rejected when x >= floor(2^64 / q^m) q^m;
/// otherwise x mod q^m supplies m digits, least significant first. Rejection
/// makes every digit exactly uniform.
DigitStream baseline_digits(std::uint64_t seed, std::uint64_t count, int q);

}  // namespace digitstat
