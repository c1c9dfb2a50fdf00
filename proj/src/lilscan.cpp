#include "digitstat/lilscan.hpp"

#include <cmath>
#include <string>

namespace digitstat {

double lil_divisor(double n) {
  if (!(n >= static_cast<double>(kLilMinN))) {
    throw DomainError("LIL normalization needs n >= 10");
  }
  return std::sqrt(2.0 * std::log(std::log(n)));
}

double lil_delta(double d, std::uint64_t n) {
  if (n < kLilMinN) throw DomainError("LIL normalization needs n >= 10, got " + std::to_string(n));
  return d / lil_divisor(static_cast<double>(n));
}

SuffixExtrema suffix_extrema(std::span<const LilPoint> series) {
  if (series.empty()) throw UsageError("suffix_extrema: empty series");
  const std::size_t size = series.size();
  SuffixExtrema out;
  out.indices.resize(size);
  out.suffix_min.resize(size);
  out.suffix_max.resize(size);
  double lo = series.back().delta;
  double hi = lo;
  for (std::size_t i = size; i-- > 0;) {
    lo = std::min(lo, series[i].delta);
    hi = std::max(hi, series[i].delta);
    out.indices[i] = series[i].n;
    out.suffix_min[i] = lo;
    out.suffix_max[i] = hi;
  }
  return out;
}

SuffixExtrema suffix_extrema(std::span<const double> series) {
  std::vector<LilPoint> points(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) points[i] = {i + 1, 0.0, series[i]};
  return suffix_extrema(std::span<const LilPoint>(points));
}

std::vector<LilPoint> block_series(std::span<const LilPoint> series, std::uint64_t block_size,
                                   std::uint64_t points_per_block) {
  BlockSeries<LilPoint> builder(block_size, points_per_block);
  for (const LilPoint& p : series) builder.push(p);
  return builder.rows();
}

OscillationSummary oscillation_summary(std::span<const LilPoint> series, std::uint64_t n_from,
                                       std::uint64_t n_to, double lo, double hi) {
  if (n_from >= n_to) throw UsageError("oscillation_summary: need n_from < n_to");
  OscillationSummary out;
  std::uint64_t inside = 0;
  for (const LilPoint& p : series) {
    if (p.n < n_from || p.n > n_to) continue;
    if (out.points == 0) {
      out.min_delta = out.max_delta = p.delta;
    } else {
      out.min_delta = std::min(out.min_delta, p.delta);
      out.max_delta = std::max(out.max_delta, p.delta);
    }
    ++out.points;
    if (p.delta >= lo && p.delta <= hi) ++inside;
  }
  if (out.points == 0) throw UsageError("oscillation_summary: no points in range");
  out.fraction_in = static_cast<double>(inside) / static_cast<double>(out.points);
  return out;
}

double tail_fraction(std::span<const double> d_values, double threshold) {
  if (d_values.empty()) throw UsageError("tail_fraction: empty series");
  const auto above = std::count_if(d_values.begin(), d_values.end(),
                                   [threshold](double d) { return d > threshold; });
  return static_cast<double>(above) / static_cast<double>(d_values.size());
}

}  // namespace digitstat
