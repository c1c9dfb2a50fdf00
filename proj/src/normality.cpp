#include "digitstat/normality.hpp"

#include <cmath>

#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

std::uint64_t checked_table_size(int q, int k, bool allow_long) {
  if (q < kMinBase || q > kMaxBase) throw UsageError("pattern counter: base must be in 2..36");
  if (k < 1) throw UsageError("pattern counter: k must be >= 1");
  if (k > kDefaultMaxPatternLength && !allow_long) {
    throw UsageError("pattern counter: k > 4 needs the long-pattern override");
  }
  std::uint64_t size = 1;
  for (int i = 0; i < k; ++i) {
    size *= static_cast<std::uint64_t>(q);
    if (size > kMaxPatternTable) {
      throw ResourceError("pattern counter: " + std::to_string(q) + "^" + std::to_string(k) +
                          " counters exceed the table budget");
    }
  }
  return size;
}

void require_scanned(const PatternCounter& counter) {
  if (counter.n() < static_cast<std::uint64_t>(counter.k())) {
    throw UsageError("pattern statistics need at least k digits");
  }
}

}  // namespace

PatternCounter::PatternCounter(int q, int k, bool allow_long_patterns)
    : q_(q), k_(k), table_size_(checked_table_size(q, k, allow_long_patterns)) {
  counts_.assign(table_size_, 0);
}

void PatternCounter::prime(std::span<const Digit> preceding) {
  const std::size_t keep = std::min<std::size_t>(preceding.size(), static_cast<std::size_t>(k_ - 1));
  code_ = 0;
  for (Digit d : preceding.last(keep)) code_ = code_ * static_cast<std::uint64_t>(q_) + d;
  filled_ = keep;
}

std::vector<Digit> PatternCounter::window() const {
  std::vector<Digit> out(static_cast<std::size_t>(filled_));
  std::uint64_t code = code_;
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<Digit>(code % static_cast<std::uint64_t>(q_));
    code /= static_cast<std::uint64_t>(q_);
  }
  return out;
}

void PatternCounter::merge(const PatternCounter& later) {
  if (later.q_ != q_ || later.k_ != k_) throw UsageError("pattern counter: layout mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += later.counts_[i];
  windows_ += later.windows_;
  n_ += later.n_;
  if (later.n_ > 0) {
    code_ = later.code_;
    filled_ = later.filled_;
  }
}

void PatternCounter::restore(std::vector<std::uint64_t> counts, std::uint64_t n,
                             std::span<const Digit> window) {
  if (counts.size() != counts_.size()) throw UsageError("pattern counter: table size mismatch");
  counts_ = std::move(counts);
  windows_ = 0;
  for (std::uint64_t c : counts_) windows_ += c;
  n_ = n;
  prime(window);
}

std::uint64_t PatternCounter::encode(std::span<const Digit> pattern) const {
  if (pattern.size() != static_cast<std::size_t>(k_)) {
    throw UsageError("pattern length " + std::to_string(pattern.size()) + " != k = " +
                     std::to_string(k_));
  }
  std::uint64_t code = 0;
  for (Digit d : pattern) {
    if (d >= q_) throw UsageError("pattern digit out of range for base " + std::to_string(q_));
    code = code * static_cast<std::uint64_t>(q_) + d;
  }
  return code;
}

std::uint64_t PatternCounter::count(std::span<const Digit> pattern) const {
  return counts_[encode(pattern)];
}

std::string PatternCounter::pattern_text(std::uint64_t code) const {
  std::string text(static_cast<std::size_t>(k_), '0');
  for (std::size_t i = text.size(); i-- > 0;) {
    text[i] = digit_char(static_cast<int>(code % static_cast<std::uint64_t>(q_)));
    code /= static_cast<std::uint64_t>(q_);
  }
  return text;
}

PatternCounter pattern_scan(DigitStream& stream, int k, std::uint64_t n, bool allow_long_patterns) {
  if (n < static_cast<std::uint64_t>(k)) throw UsageError("pattern_scan: need n >= k");
  PatternCounter counter(stream.base(), k, allow_long_patterns);
  std::vector<Digit> buffer(1 << 16);
  std::uint64_t remaining = n;
  while (remaining > 0) {
    const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, buffer.size()));
    const std::size_t got = stream.read(std::span<Digit>(buffer.data(), want));
    if (got == 0) break;
    counter.push(std::span<const Digit>(buffer.data(), got));
    remaining -= got;
  }
  return counter;
}

double pattern_freq(const PatternCounter& counter, std::span<const Digit> pattern) {
  require_scanned(counter);
  return static_cast<double>(counter.count(pattern)) / static_cast<double>(counter.n());
}

double z_score_for_code(const PatternCounter& counter, std::uint64_t code) {
  require_scanned(counter);
  const double n = static_cast<double>(counter.n());
  const double p = 1.0 / static_cast<double>(counter.table_size());
  const double freq = static_cast<double>(counter.counts().at(code)) / n;
  return (freq - p) / std::sqrt(p * (1.0 - p) / n);
}

double z_score(const PatternCounter& counter, std::span<const Digit> pattern) {
  return z_score_for_code(counter, counter.encode(pattern));
}

ChiSquare chi_square(const PatternCounter& counter) {
  require_scanned(counter);
  const double expected =
      static_cast<double>(counter.windows()) / static_cast<double>(counter.table_size());
  if (expected < 1.0) throw UsageError("chi_square: expected count per pattern is below 1");
  double statistic = 0.0;
  for (std::uint64_t c : counter.counts()) {
    const double diff = static_cast<double>(c) - expected;
    statistic += diff * diff / expected;
  }
  return {statistic, counter.table_size() - 1};
}

std::vector<Digit> parse_pattern(std::string_view text, int q) {
  std::vector<Digit> out;
  for (char c : text) {
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'A' && c <= 'Z') v = c - 'A' + 10;
    else if (c >= 'a' && c <= 'z') v = c - 'a' + 10;
    if (v < 0 || v >= q) throw UsageError("invalid pattern digit '" + std::string(1, c) + "'");
    out.push_back(static_cast<Digit>(v));
  }
  return out;
}

}  // namespace digitstat
