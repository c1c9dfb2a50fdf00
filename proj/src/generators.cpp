#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "digitstat/digitstream.hpp"
#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

void check_count(std::uint64_t count, std::uint64_t limit, const char* what) {
  if (count < 1) throw UsageError(std::string(what) + ": digit count must be >= 1");
  if (count > limit) {
    throw ResourceError(std::string(what) + ": " + std::to_string(count) +
                        " digits exceeds the budget of " + std::to_string(limit));
  }
}

mpz_class pow10(std::uint64_t exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

// Splits the decimal text of floor(x * 10^count) into integer part and the
// last `count` digits.
Expansion split_scaled(const mpz_class& scaled, std::uint64_t count) {
  std::string text = scaled.get_str(10);
  if (text.size() <= count) text.insert(0, count + 1 - text.size(), '0');
  Expansion out;
  const std::size_t int_len = text.size() - count;
  out.integer_part = text.substr(0, int_len);
  out.fraction.resize(count);
  std::transform(text.begin() + static_cast<std::ptrdiff_t>(int_len), text.end(),
                 out.fraction.begin(), [](char c) { return static_cast<Digit>(c - '0'); });
  return out;
}

// Sum_{k=a+1}^{b} a!/k! = p/q with q = (a+1)(a+2)...b.
void e_split(std::uint64_t a, std::uint64_t b, mpz_class& p, mpz_class& q) {
  if (b - a == 1) {
    p = 1;
    q = b;
    return;
  }
  const std::uint64_t m = a + (b - a) / 2;
  mpz_class p1, q1, p2, q2;
  e_split(a, m, p1, q1);
  e_split(m, b, p2, q2);
  p = p1 * q2 + p2;
  q = q1 * q2;
}

// Smallest N with log10((N+1)!) >= digits.
std::uint64_t e_terms_for(std::uint64_t digits) {
  const double target = static_cast<double>(digits) * std::numbers::ln10;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (std::lgamma(static_cast<double>(hi) + 2.0) < target) hi *= 2;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (std::lgamma(static_cast<double>(mid) + 2.0) < target) lo = mid + 1; else hi = mid;
  }
  return lo;
}

}  // namespace

Expansion sqrt_expansion(std::uint64_t radicand, std::uint64_t count) {
  if (radicand < 1) throw UsageError("sqrt: radicand must be >= 1");
  check_count(count, kMaxGeneratedDigits, "sqrt");
  mpz_class scaled = mpz_class(std::to_string(radicand)) * pow10(2 * count);
  mpz_sqrt(scaled.get_mpz_t(), scaled.get_mpz_t());
  return split_scaled(scaled, count);
}

Expansion e_expansion(std::uint64_t count) {
  check_count(count, kMaxGeneratedDigits, "e");
  // The series tail after N terms is below 2/(N+1)!; choosing
  // (N+1)! >= 10^(count+guard+2) keeps the scaled tail under 0.02.
  std::uint64_t guard = 10;
  for (;;) {
    const std::uint64_t terms = e_terms_for(count + guard + 2);
    mpz_class p, q;
    e_split(0, terms, p, q);
    const mpz_class scale = pow10(count + guard);
    const mpz_class scaled = ((p + q) * scale) / q;  // floor(partial sum * 10^(count+guard))
    // True value lies in [scaled, scaled + 1.02); a carry into the kept digits
    // is only possible when every guard digit is 9.
    const mpz_class guard_unit = pow10(guard);
    const mpz_class low = scaled % guard_unit;
    if (low != guard_unit - 1) return split_scaled(scaled / guard_unit, count);
    guard *= 2;
  }
}

Expansion pi_expansion(std::uint64_t count) {
  check_count(count, kMaxPiDigits, "pi");
  // Rabinowitz-Wagon spigot in mixed radix
  //   pi = 2 + 1/3 (2 + 2/5 (2 + 3/7 (2 + ...)))
  // emitting nine decimal digits per sweep. After each sweep the residual tail
  // R satisfies 0 <= R < 2, so the emitted chunks (which may reach 2*10^9 - 1)
  // under-estimate pi by less than one unit of the last chunk; carries are
  // resolved once at the end and the guard digits absorb the deficit.
  constexpr std::uint64_t kChunkDigits = 9;
  constexpr std::uint64_t kChunkBase = 1'000'000'000ULL;
  std::uint64_t guard = 20;
  for (;;) {
    const std::uint64_t total = count + guard;
    const std::uint64_t sweeps = (total + kChunkDigits - 1) / kChunkDigits;
    const auto positions_for = [](std::uint64_t digits_left) {
      return static_cast<std::uint64_t>(std::ceil(static_cast<double>(digits_left) *
                                                  std::numbers::log2e * std::numbers::ln10)) + 64;
    };
    std::uint64_t length = positions_for(sweeps * kChunkDigits);
    std::vector<std::uint64_t> mixed(length + 1, 2);
    std::vector<std::uint64_t> chunks;
    chunks.reserve(sweeps);
    for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
      std::uint64_t carry = 0;
      for (std::uint64_t i = length; i >= 1; --i) {
        const std::uint64_t x = mixed[i] * kChunkBase + carry;
        const std::uint64_t den = 2 * i + 1;
        const std::uint64_t quot = x / den;
        mixed[i] = x - quot * den;
        carry = quot * i;
      }
      chunks.push_back(carry);
      // Positions past this point only influence digits beyond `total`.
      length = std::min(length, positions_for((sweeps - sweep - 1) * kChunkDigits));
    }
    // Resolve carries: value of (pi - 2) * 10^(9*sweeps).
    std::uint64_t carry = 0;
    for (auto it = chunks.rbegin(); it != chunks.rend(); ++it) {
      const std::uint64_t v = *it + carry;
      *it = v % kChunkBase;
      carry = v / kChunkBase;
    }
    std::vector<Digit> digits;
    digits.reserve(sweeps * kChunkDigits);
    for (std::uint64_t chunk : chunks) {
      char text[kChunkDigits];
      for (int d = kChunkDigits - 1; d >= 0; --d) {
        text[d] = static_cast<char>(chunk % 10);
        chunk /= 10;
      }
      digits.insert(digits.end(), text, text + kChunkDigits);
    }
    const bool all_nines = std::all_of(digits.begin() + static_cast<std::ptrdiff_t>(count),
                                       digits.begin() + static_cast<std::ptrdiff_t>(total),
                                       [](Digit d) { return d == 9; });
    if (!all_nines) {
      digits.resize(count);
      return Expansion{std::to_string(2 + carry), std::move(digits)};
    }
    guard *= 2;
  }
}

namespace {

DigitStream make_generated(Expansion expansion, std::string id, std::uint64_t count,
                           bool include_integer_part) {
  SourceDescriptor source{SourceDescriptor::Kind::generator, std::move(id),
                          "count=" + std::to_string(count)};
  return expansion_stream(std::make_shared<const Expansion>(std::move(expansion)),
                          std::move(source), include_integer_part);
}

}  // namespace

DigitStream gen_sqrt_digits(std::uint64_t radicand, std::uint64_t count,
                            bool include_integer_part) {
  return make_generated(sqrt_expansion(radicand, count), "sqrt:" + std::to_string(radicand),
                        count, include_integer_part);
}

DigitStream gen_e_digits(std::uint64_t count, bool include_integer_part) {
  return make_generated(e_expansion(count), "e", count, include_integer_part);
}

DigitStream gen_pi_digits(std::uint64_t count, bool include_integer_part) {
  return make_generated(pi_expansion(count), "pi", count, include_integer_part);
}

}  // namespace digitstat
