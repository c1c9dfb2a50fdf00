#pragma once

// LIL-normalized deviation delta(n) = d(n) / sqrt(2 ln ln n), suffix extrema,
// envelope-preserving block downsampling and oscillation summaries.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "digitstat/errors.hpp"

namespace digitstat {

/// Smallest n for which the LIL series is emitted.
inline constexpr std::uint64_t kLilMinN = 10;

/// sqrt(2 ln ln n) with natural logarithms; DomainError for n < 10.
double lil_divisor(double n);
double lil_delta(double d, std::uint64_t n);

struct LilPoint {
  std::uint64_t n = 0;
  double d = 0.0;
  double delta = 0.0;
};

struct SuffixExtrema {
  std::vector<std::uint64_t> indices;
  std::vector<double> suffix_min;
  std::vector<double> suffix_max;
};

/// One reverse pass; suffix_min[i] = min(delta[i], suffix_min[i+1]).
SuffixExtrema suffix_extrema(std::span<const LilPoint> series);
/// Same, for a bare series indexed 1..N.
SuffixExtrema suffix_extrema(std::span<const double> series);

/// min/max of delta over one bucket of the downsampled series, plus the
/// bucket's last point. Ties keep the earliest point.
template <typename Point>
struct EnvelopeBucket {
  std::uint64_t block = 0;
  std::uint64_t slot = 0;
  std::uint64_t n_first = 0;
  Point min{};
  Point max{};
  Point last{};
};

struct BlockSummary {
  std::uint64_t n_from = 0;
  std::uint64_t n_to = 0;
  double min_delta = 0.0;
  double max_delta = 0.0;
};

/// Streaming envelope downsampler. n runs over consecutive blocks of
/// `block_size`; each block is cut into `points_per_block` buckets and every
/// bucket keeps its min, max and last point. Points must arrive with
/// strictly increasing n.
///
/// Point needs members `n` and `delta`.
template <typename Point>
class BlockSeries {
 public:
  using Bucket = EnvelopeBucket<Point>;

  BlockSeries(std::uint64_t block_size, std::uint64_t points_per_block)
      : block_size_(block_size), points_per_block_(points_per_block) {
    if (points_per_block < 1 || block_size < points_per_block) {
      throw UsageError("block_series: need block_size >= points_per_block >= 1");
    }
  }

  std::uint64_t block_size() const noexcept { return block_size_; }
  std::uint64_t points_per_block() const noexcept { return points_per_block_; }

  void push(const Point& p) {
    const std::uint64_t block = (p.n - 1) / block_size_;
    const auto slot = static_cast<std::uint64_t>(
        static_cast<unsigned __int128>((p.n - 1) % block_size_) * points_per_block_ /
        block_size_);
    if (open_ && (open_->block != block || open_->slot != slot)) {
      completed_.push_back(*open_);
      open_.reset();
    }
    if (!open_) {
      open_ = Bucket{block, slot, p.n, p, p, p};
      return;
    }
    if (p.delta < open_->min.delta) open_->min = p;
    if (p.delta > open_->max.delta) open_->max = p;
    open_->last = p;
  }

  /// Appends a series that continues this one (later n only). A bucket split
  /// across the seam is recombined, so chunked and single-pass runs agree.
  void append(BlockSeries&& later) {
    if (later.block_size_ != block_size_ || later.points_per_block_ != points_per_block_) {
      throw UsageError("block_series: cannot merge different layouts");
    }
    std::vector<Bucket> tail = std::move(later.completed_);
    std::optional<Bucket> tail_open = std::move(later.open_);
    Bucket* first = !tail.empty() ? &tail.front() : (tail_open ? &*tail_open : nullptr);
    if (open_ && first && first->block == open_->block && first->slot == open_->slot) {
      Bucket merged = *open_;
      if (first->min.delta < merged.min.delta) merged.min = first->min;
      if (first->max.delta > merged.max.delta) merged.max = first->max;
      merged.last = first->last;
      *first = merged;
      open_.reset();
    }
    if (open_) {
      completed_.push_back(*open_);
      open_.reset();
    }
    completed_.insert(completed_.end(), tail.begin(), tail.end());
    open_ = std::move(tail_open);
  }

  const std::vector<Bucket>& completed() const noexcept { return completed_; }
  const std::optional<Bucket>& open() const noexcept { return open_; }

  /// Every bucket, the open one last.
  std::vector<Bucket> buckets() const {
    std::vector<Bucket> all = completed_;
    if (open_) all.push_back(*open_);
    return all;
  }

  /// Emitted plot rows: each bucket's min, max and last point, ordered by n
  /// without duplicates.
  std::vector<Point> rows() const {
    std::vector<Point> out;
    for (const Bucket& b : buckets()) {
      const Point* picks[3] = {&b.min, &b.max, &b.last};
      std::sort(std::begin(picks), std::end(picks),
                [](const Point* x, const Point* y) { return x->n < y->n; });
      for (const Point* p : picks) {
        if (out.empty() || out.back().n != p->n) out.push_back(*p);
      }
    }
    return out;
  }

  /// Per-block min/max of delta.
  std::vector<BlockSummary> block_summaries() const {
    std::vector<BlockSummary> out;
    std::optional<std::uint64_t> current;
    for (const Bucket& b : buckets()) {
      if (!current || *current != b.block) {
        out.push_back({b.n_first, b.last.n, b.min.delta, b.max.delta});
        current = b.block;
        continue;
      }
      BlockSummary& s = out.back();
      s.n_to = b.last.n;
      s.min_delta = std::min(s.min_delta, b.min.delta);
      s.max_delta = std::max(s.max_delta, b.max.delta);
    }
    return out;
  }

  /// Reinstates state read back from a checkpoint.
  void restore(std::vector<Bucket> completed, std::optional<Bucket> open) {
    completed_ = std::move(completed);
    open_ = std::move(open);
  }

 private:
  std::uint64_t block_size_;
  std::uint64_t points_per_block_;
  std::vector<Bucket> completed_;
  std::optional<Bucket> open_;
};

/// Envelope-downsampled rows of a finished series.
std::vector<LilPoint> block_series(std::span<const LilPoint> series, std::uint64_t block_size,
                                   std::uint64_t points_per_block);

struct OscillationSummary {
  double min_delta = 0.0;
  double max_delta = 0.0;
  double fraction_in = 0.0;  ///< share of points with lo <= delta <= hi
  std::uint64_t points = 0;
};

/// Extrema of delta over points with n_from <= n <= n_to, and the share of
/// those points whose delta lies in [lo, hi].
OscillationSummary oscillation_summary(std::span<const LilPoint> series, std::uint64_t n_from,
                                       std::uint64_t n_to, double lo, double hi);

/// Share of values strictly above `threshold`.
double tail_fraction(std::span<const double> d_values, double threshold);

}  // namespace digitstat
