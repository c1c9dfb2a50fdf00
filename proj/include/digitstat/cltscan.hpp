#pragma once

// Streaming prefix sums, the normalized deviation d(n) = (S - mu n)/(sigma sqrt n),
// its density/cumulative histograms, and digit-frequency statistics.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "digitstat/digitstream.hpp"
#include "digitstat/moments.hpp"

namespace digitstat {

using uint128 = unsigned __int128;

std::string to_decimal(uint128 value);
/// Throws UsageError on anything but a plain non-negative decimal integer
/// that fits in 128 bits.
uint128 parse_uint128(std::string_view text);

/// Exact running digit sum. No floating point ever touches `sum`.
struct ScanState {
  int q = 10;
  std::uint64_t n = 0;
  uint128 sum = 0;

  friend bool operator==(const ScanState&, const ScanState&) = default;
};

/// Throws UsageError when `digit` is not a base-q digit.
ScanState scan_update(ScanState state, Digit digit);

/// d(n) from exact integers; throws UsageError when n == 0.
double deviation(const ScanState& state, const MomentSet& moments);
double deviation(std::uint64_t n, uint128 sum, const MomentSet& moments);

/// Bin counts of deviation values over [-3, +3]. Bin b covers
/// (-3 + b*step, -3 + (b+1)*step]; values <= -3 go to underflow and values
/// > +3 to overflow. The step is 1/bins_per_unit so that every edge is the
/// correctly rounded double of an exact rational.
class HistogramAccumulator {
 public:
  static constexpr double kMin = -3.0;
  static constexpr double kMax = 3.0;

  explicit HistogramAccumulator(int bins_per_unit = 10);
  /// Accepts any step that divides 1 exactly (0.1, 0.025, ...).
  static HistogramAccumulator with_step(double step);

  int bins_per_unit() const noexcept { return bins_per_unit_; }
  double step() const noexcept { return 1.0 / bins_per_unit_; }
  std::size_t bin_count() const noexcept { return bins_.size(); }
  double left_edge(std::size_t bin) const { return edges_[bin]; }
  double right_edge(std::size_t bin) const { return edges_[bin + 1]; }

  void add(double d);
  void merge(const HistogramAccumulator& other);

  const std::vector<std::uint64_t>& bins() const noexcept { return bins_; }
  std::uint64_t underflow() const noexcept { return underflow_; }
  std::uint64_t overflow() const noexcept { return overflow_; }
  std::uint64_t total() const noexcept { return total_; }

  /// Reinstates counts read back from a checkpoint.
  void restore(std::vector<std::uint64_t> bins, std::uint64_t underflow,
               std::uint64_t overflow);

  friend bool operator==(const HistogramAccumulator& a, const HistogramAccumulator& b) {
    return a.bins_per_unit_ == b.bins_per_unit_ && a.bins_ == b.bins_ &&
           a.underflow_ == b.underflow_ && a.overflow_ == b.overflow_ && a.total_ == b.total_;
  }

 private:
  int bins_per_unit_;
  std::vector<double> edges_;
  std::vector<std::uint64_t> bins_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t total_ = 0;
};

/// Convenience wrapper for the streaming operation.
HistogramAccumulator hist_accumulate(HistogramAccumulator acc, double d);

struct DensityRow {
  double x_right;
  std::uint64_t count;
  double frac;     ///< count / total
  double density;  ///< count / (total * step), comparable with phi
  double phi_ref;  ///< normal_pdf at the bin midpoint
};

struct CumulativeRow {
  double x;
  std::uint64_t cum_count;  ///< underflow + all bins with right edge <= x
  double cum_frac;
  double phi_ref;           ///< normal_cdf(x)
};

std::vector<DensityRow> hist_density(const HistogramAccumulator& acc);
/// First row is x = -3 (underflow only); then one row per bin right edge.
std::vector<CumulativeRow> hist_cumulative(const HistogramAccumulator& acc);

class FrequencyTable {
 public:
  explicit FrequencyTable(int q = 10);

  int q() const noexcept { return static_cast<int>(counts_.size()); }
  std::uint64_t n() const noexcept { return n_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  void update(Digit digit) {
    ++counts_[digit];
    ++n_;
  }
  void update(std::span<const Digit> digits);
  void merge(const FrequencyTable& other);
  void restore(std::vector<std::uint64_t> counts);

  friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_ = 0;
};

/// Checked single-digit update; throws UsageError for out-of-range digits.
FrequencyTable freq_update(FrequencyTable table, Digit digit);

/// Population variance (1/q) sum_j (count_j/n - 1/q)^2; UsageError when n == 0.
double freq_variance(const FrequencyTable& table);

}  // namespace digitstat
