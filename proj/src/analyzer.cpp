#include "digitstat/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

// Chunks below this size are not worth a thread.
constexpr std::size_t kMinParallelChunk = 1 << 16;

std::vector<PatternCounter> make_counters(const AnalyzerOptions& options) {
  std::vector<PatternCounter> counters;
  for (int k : options.pattern_lengths) {
    counters.emplace_back(options.q, k, options.allow_long_patterns);
  }
  return counters;
}

}  // namespace

Analyzer::Analyzer(AnalyzerOptions options)
    : options_(std::move(options)),
      moments_(digit_moments(options_.q)),
      scan_{options_.q, 0, 0},
      histogram_(options_.bins_per_unit),
      frequencies_(options_.q),
      patterns_(make_counters(options_)),
      tail_counts_(options_.tail_thresholds.size(), 0),
      band_counts_(options_.bands.size(), 0),
      envelope_(options_.block_size, options_.points_per_block) {
  if (options_.lil_cutoff < kLilMinN) throw UsageError("LIL cutoff must be >= 10");
  for (const DeviationBand& band : options_.bands) {
    if (!(band.lo <= band.hi)) throw UsageError("deviation band needs lo <= hi");
  }
}

ExactLilPoint Analyzer::make_point(std::uint64_t n, uint128 sum) const {
  const double d = deviation(n, sum, moments_);
  return {n, sum, d, d / lil_divisor(static_cast<double>(n))};
}

void Analyzer::consume(std::span<const Digit> digits, unsigned threads) {
  for (Digit d : digits) {
    if (d >= options_.q) {
      throw UsageError("digit " + std::to_string(d) + " out of range for base " +
                       std::to_string(options_.q));
    }
  }
  const std::size_t pieces =
      std::min<std::size_t>(threads == 0 ? 1 : threads, digits.size() / kMinParallelChunk);
  if (pieces <= 1) {
    consume_sequential(digits);
    return;
  }

  // Sequential prefix pass: entry (n, S) of every chunk.
  std::vector<std::size_t> bounds(pieces + 1);
  for (std::size_t i = 0; i <= pieces; ++i) bounds[i] = digits.size() * i / pieces;
  std::vector<Analyzer> workers;
  workers.reserve(pieces);
  std::uint64_t n = scan_.n;
  uint128 sum = scan_.sum;
  for (std::size_t i = 0; i < pieces; ++i) {
    Analyzer worker = fork(n, sum);
    // Pattern windows that straddle the seam need the preceding digits.
    for (std::size_t c = 0; c < patterns_.size(); ++c) {
      std::vector<Digit> context = patterns_[c].window();
      const std::size_t start = bounds[i];
      const std::size_t need = static_cast<std::size_t>(patterns_[c].k() - 1);
      const std::size_t from = start > need ? start - need : 0;
      context.insert(context.end(), digits.begin() + static_cast<std::ptrdiff_t>(from),
                     digits.begin() + static_cast<std::ptrdiff_t>(start));
      worker.patterns_[c].prime(context);
    }
    workers.push_back(std::move(worker));
    for (std::size_t j = bounds[i]; j < bounds[i + 1]; ++j) sum += digits[j];
    n += bounds[i + 1] - bounds[i];
  }

  {
    std::vector<std::jthread> pool;
    pool.reserve(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
      pool.emplace_back([&, i] {
        workers[i].consume_sequential(digits.subspan(bounds[i], bounds[i + 1] - bounds[i]));
      });
    }
  }
  for (Analyzer& worker : workers) absorb(std::move(worker));
}

void Analyzer::consume_sequential(std::span<const Digit> digits) {
  frequencies_.update(digits);
  for (PatternCounter& counter : patterns_) counter.push(digits);

  std::uint64_t n = scan_.n;
  uint128 sum = scan_.sum;
  const double two_sigma = 2.0 * moments_.sigma;
  const auto q_minus_1 = static_cast<__int128>(options_.q - 1);
  const std::size_t tails = options_.tail_thresholds.size();
  const std::size_t bands = options_.bands.size();
  for (Digit digit : digits) {
    ++n;
    sum += digit;
    // Same expression as deviation(); kept inline for throughput.
    const auto centered2 = static_cast<__int128>(2 * sum) - q_minus_1 * static_cast<__int128>(n);
    const double d = static_cast<double>(centered2) / (two_sigma * std::sqrt(static_cast<double>(n)));
    if (n > options_.burn_in) {
      histogram_.add(d);
      for (std::size_t t = 0; t < tails; ++t) {
        if (d > options_.tail_thresholds[t]) ++tail_counts_[t];
      }
      for (std::size_t b = 0; b < bands; ++b) {
        if (d >= options_.bands[b].lo && d <= options_.bands[b].hi) ++band_counts_[b];
      }
    }
    if (n >= options_.lil_cutoff) {
      envelope_.push({n, sum, d, d / lil_divisor(static_cast<double>(n))});
    }
  }
  scan_.n = n;
  scan_.sum = sum;
}

Analyzer Analyzer::fork(std::uint64_t n, uint128 sum) const {
  Analyzer worker(options_);
  worker.scan_.n = n;
  worker.scan_.sum = sum;
  return worker;
}

void Analyzer::absorb(Analyzer&& later) {
  scan_ = later.scan_;
  histogram_.merge(later.histogram_);
  frequencies_.merge(later.frequencies_);
  for (std::size_t c = 0; c < patterns_.size(); ++c) patterns_[c].merge(later.patterns_[c]);
  for (std::size_t t = 0; t < tail_counts_.size(); ++t) tail_counts_[t] += later.tail_counts_[t];
  for (std::size_t b = 0; b < band_counts_.size(); ++b) band_counts_[b] += later.band_counts_[b];
  envelope_.append(std::move(later.envelope_));
}

void Analyzer::restore(ScanState scan, HistogramAccumulator histogram, FrequencyTable frequencies,
                       std::vector<PatternCounter> patterns, std::vector<std::uint64_t> tail_counts,
                       std::vector<std::uint64_t> band_counts,
                       BlockSeries<ExactLilPoint> envelope) {
  if (scan.q != options_.q || histogram.bins_per_unit() != options_.bins_per_unit ||
      frequencies.q() != options_.q || patterns.size() != patterns_.size() ||
      tail_counts.size() != tail_counts_.size() || band_counts.size() != band_counts_.size() ||
      envelope.block_size() != options_.block_size ||
      envelope.points_per_block() != options_.points_per_block) {
    throw UsageError("analyzer restore: state does not match the options");
  }
  for (std::size_t c = 0; c < patterns.size(); ++c) {
    if (patterns[c].k() != patterns_[c].k()) throw UsageError("analyzer restore: pattern lengths differ");
  }
  scan_ = scan;
  histogram_ = std::move(histogram);
  frequencies_ = std::move(frequencies);
  patterns_ = std::move(patterns);
  tail_counts_ = std::move(tail_counts);
  band_counts_ = std::move(band_counts);
  envelope_ = std::move(envelope);
}

bool Analyzer::same_integer_state(const Analyzer& other) const {
  if (!(scan_ == other.scan_ && histogram_ == other.histogram_ &&
        frequencies_ == other.frequencies_ && patterns_ == other.patterns_ &&
        tail_counts_ == other.tail_counts_ && band_counts_ == other.band_counts_)) {
    return false;
  }
  const auto a = envelope_.buckets();
  const auto b = other.envelope_.buckets();
  if (a.size() != b.size()) return false;
  const auto same = [](const ExactLilPoint& x, const ExactLilPoint& y) {
    return x.n == y.n && x.sum == y.sum;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].block != b[i].block || a[i].slot != b[i].slot || a[i].n_first != b[i].n_first ||
        !same(a[i].min, b[i].min) || !same(a[i].max, b[i].max) || !same(a[i].last, b[i].last)) {
      return false;
    }
  }
  return true;
}

}  // namespace digitstat
