#pragma once

// Borel sliding-pattern ("groupement") counts: every overlapping window of k
// digits is tallied. Frequencies divide by n, the number of digits read;
// chi-square expectations use the window count n - k + 1.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "digitstat/digitstream.hpp"

namespace digitstat {

/// k is capped here unless the caller opts into larger tables.
inline constexpr int kDefaultMaxPatternLength = 4;
/// Hard limit on the number of counters (q^k) even with the override.
inline constexpr std::uint64_t kMaxPatternTable = std::uint64_t{1} << 28;

class PatternCounter {
 public:
  PatternCounter(int q, int k, bool allow_long_patterns = false);

  int q() const noexcept { return q_; }
  int k() const noexcept { return k_; }
  /// Digits consumed by this counter (excluding primed context).
  std::uint64_t n() const noexcept { return n_; }
  /// Number of windows counted so far.
  std::uint64_t windows() const noexcept { return windows_; }
  std::uint64_t table_size() const noexcept { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  void push(Digit digit) {
    code_ = (code_ * static_cast<std::uint64_t>(q_) + digit) % table_size_;
    ++n_;
    if (filled_ + 1 >= static_cast<std::uint64_t>(k_)) {
      ++counts_[code_];
      ++windows_;
    } else {
      ++filled_;
    }
  }
  void push(std::span<const Digit> digits) {
    for (Digit d : digits) push(d);
  }

  /// Seeds the window with the digits that precede this counter's range so
  /// that windows straddling a chunk seam are counted once. Only the last
  /// k-1 digits matter.
  void prime(std::span<const Digit> preceding);

  /// Last min(k-1, digits seen) digits, oldest first.
  std::vector<Digit> window() const;

  /// Adds the counts of a counter that scanned the continuation of this one
  /// (primed with this counter's window).
  void merge(const PatternCounter& later);

  void restore(std::vector<std::uint64_t> counts, std::uint64_t n,
               std::span<const Digit> window);

  std::uint64_t count(std::span<const Digit> pattern) const;
  std::uint64_t encode(std::span<const Digit> pattern) const;
  std::string pattern_text(std::uint64_t code) const;

  friend bool operator==(const PatternCounter& a, const PatternCounter& b) {
    return a.q_ == b.q_ && a.k_ == b.k_ && a.n_ == b.n_ && a.windows_ == b.windows_ &&
           a.counts_ == b.counts_ && a.window() == b.window();
  }

 private:
  int q_;
  int k_;
  std::uint64_t table_size_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t code_ = 0;
  std::uint64_t filled_ = 0;  // digits in the rolling code, capped at k-1
  std::uint64_t n_ = 0;
  std::uint64_t windows_ = 0;
};

/// Reads up to `n` digits of `stream` and counts their k-windows.
PatternCounter pattern_scan(DigitStream& stream, int k, std::uint64_t n,
                            bool allow_long_patterns = false);

/// count(J) / n.
double pattern_freq(const PatternCounter& counter, std::span<const Digit> pattern);

/// (freq - p) / sqrt(p (1-p) / n), p = q^-k. Window overlap is not corrected.
double z_score(const PatternCounter& counter, std::span<const Digit> pattern);
double z_score_for_code(const PatternCounter& counter, std::uint64_t code);

struct ChiSquare {
  double statistic = 0.0;
  std::uint64_t dof = 0;
};

/// sum (count - E)^2 / E with E = (n - k + 1) q^-k; UsageError if E < 1.
ChiSquare chi_square(const PatternCounter& counter);

/// Parses a pattern such as "01" or "3F" into digit values.
std::vector<Digit> parse_pattern(std::string_view text, int q);

}  // namespace digitstat
