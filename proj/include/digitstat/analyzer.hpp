#pragma once

// One-pass analysis state: exact prefix sum, deviation histogram, digit
// frequencies, sliding-pattern counters, deviation tail/band tallies and the
// block envelope of the LIL series. All integer state merges by addition, so
// a digit range can be cut into chunks, scanned on several threads, and folded
// back with results identical to a sequential scan.

#include <cstdint>
#include <span>
#include <vector>

#include "digitstat/cltscan.hpp"
#include "digitstat/lilscan.hpp"
#include "digitstat/moments.hpp"
#include "digitstat/normality.hpp"

namespace digitstat {

/// LIL point that keeps the exact prefix sum it was computed from, so the
/// floating-point fields can always be rebuilt bit for bit.
struct ExactLilPoint {
  std::uint64_t n = 0;
  uint128 sum = 0;
  double d = 0.0;
  double delta = 0.0;

  LilPoint lil() const { return {n, d, delta}; }
};

/// Closed interval of deviation values whose hit count is tracked.
struct DeviationBand {
  double lo = 0.0;
  double hi = 0.0;
};

struct AnalyzerOptions {
  int q = 10;
  int bins_per_unit = 10;
  std::uint64_t burn_in = 0;
  std::uint64_t block_size = 100'000'000;
  std::uint64_t points_per_block = 1000;
  std::uint64_t lil_cutoff = kLilMinN;
  std::vector<int> pattern_lengths = {1, 2};
  bool allow_long_patterns = false;
  std::vector<double> tail_thresholds = {0.6, 1.0};
  std::vector<DeviationBand> bands = {{-1.48, -0.36}};
};

class Analyzer {
 public:
  explicit Analyzer(AnalyzerOptions options);

  const AnalyzerOptions& options() const noexcept { return options_; }
  const MomentSet& moments() const noexcept { return moments_; }

  /// Scans the next digits. With threads > 1 the span is split into chunks
  /// whose entry (n, S) comes from a sequential prefix pass.
  void consume(std::span<const Digit> digits, unsigned threads = 1);

  const ScanState& scan() const noexcept { return scan_; }
  const HistogramAccumulator& histogram() const noexcept { return histogram_; }
  const FrequencyTable& frequencies() const noexcept { return frequencies_; }
  const std::vector<PatternCounter>& patterns() const noexcept { return patterns_; }
  /// Count of histogram samples with d > tail_thresholds[i].
  const std::vector<std::uint64_t>& tail_counts() const noexcept { return tail_counts_; }
  /// Count of histogram samples with bands[i].lo <= d <= bands[i].hi.
  const std::vector<std::uint64_t>& band_counts() const noexcept { return band_counts_; }
  const BlockSeries<ExactLilPoint>& envelope() const noexcept { return envelope_; }

  /// d and delta rebuilt from (n, S) exactly as the scan computes them.
  ExactLilPoint make_point(std::uint64_t n, uint128 sum) const;

  /// Restores state read from a checkpoint; sizes must match the options.
  void restore(ScanState scan, HistogramAccumulator histogram, FrequencyTable frequencies,
               std::vector<PatternCounter> patterns, std::vector<std::uint64_t> tail_counts,
               std::vector<std::uint64_t> band_counts, BlockSeries<ExactLilPoint> envelope);

  /// Equality of every integer field, including the envelope's (n, S) points.
  bool same_integer_state(const Analyzer& other) const;

 private:
  void consume_sequential(std::span<const Digit> digits);
  Analyzer fork(std::uint64_t n, uint128 sum) const;
  void absorb(Analyzer&& later);

  AnalyzerOptions options_;
  MomentSet moments_;
  ScanState scan_;
  HistogramAccumulator histogram_;
  FrequencyTable frequencies_;
  std::vector<PatternCounter> patterns_;
  std::vector<std::uint64_t> tail_counts_;
  std::vector<std::uint64_t> band_counts_;
  BlockSeries<ExactLilPoint> envelope_;
};

}  // namespace digitstat
