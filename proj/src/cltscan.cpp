#include "digitstat/cltscan.hpp"

#include <algorithm>
#include <cmath>

#include "digitstat/errors.hpp"

namespace digitstat {

std::string to_decimal(uint128 value) {
  if (value == 0) return "0";
  std::string text;
  while (value > 0) {
    text.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(text.begin(), text.end());
  return text;
}

uint128 parse_uint128(std::string_view text) {
  if (text.empty()) throw UsageError("empty integer");
  constexpr uint128 kMax = ~uint128{0};
  uint128 value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw UsageError("not a decimal integer: '" + std::string(text) + "'");
    const auto digit = static_cast<unsigned>(c - '0');
    if (value > (kMax - digit) / 10) throw UsageError("integer overflows 128 bits");
    value = value * 10 + digit;
  }
  return value;
}

ScanState scan_update(ScanState state, Digit digit) {
  if (digit >= state.q) {
    throw UsageError("digit " + std::to_string(digit) + " out of range for base " +
                     std::to_string(state.q));
  }
  ++state.n;
  state.sum += digit;
  return state;
}

double deviation(std::uint64_t n, uint128 sum, const MomentSet& moments) {
  if (n == 0) throw UsageError("deviation: undefined for n = 0");
  // 2(S - mu n) = 2S - (q-1) n, exact in signed 128-bit.
  const auto centered2 = static_cast<__int128>(2 * sum) -
                         static_cast<__int128>(moments.q - 1) * static_cast<__int128>(n);
  return static_cast<double>(centered2) /
         (2.0 * moments.sigma * std::sqrt(static_cast<double>(n)));
}

double deviation(const ScanState& state, const MomentSet& moments) {
  return deviation(state.n, state.sum, moments);
}

HistogramAccumulator::HistogramAccumulator(int bins_per_unit)
    : bins_per_unit_(bins_per_unit) {
  if (bins_per_unit < 1 || bins_per_unit > 100000) {
    throw UsageError("histogram: bins per unit must be in 1..100000");
  }
  const int count = 6 * bins_per_unit;
  edges_.resize(static_cast<std::size_t>(count) + 1);
  for (int b = 0; b <= count; ++b) {
    edges_[static_cast<std::size_t>(b)] =
        static_cast<double>(b - 3 * bins_per_unit) / bins_per_unit;
  }
  bins_.assign(static_cast<std::size_t>(count), 0);
}

HistogramAccumulator HistogramAccumulator::with_step(double step) {
  if (!(step > 0.0) || step > 1.0) throw UsageError("histogram: step must be in (0, 1]");
  const double per_unit = std::round(1.0 / step);
  if (std::abs(1.0 / per_unit - step) > 1e-12 * step) {
    throw UsageError("histogram: step must divide 1 exactly (e.g. 0.1 or 0.025)");
  }
  return HistogramAccumulator(static_cast<int>(per_unit));
}

void HistogramAccumulator::add(double d) {
  if (std::isnan(d)) throw UsageError("histogram: NaN deviation");
  ++total_;
  if (d <= kMin) {
    ++underflow_;
    return;
  }
  if (d > kMax) {
    ++overflow_;
    return;
  }
  const auto last = static_cast<std::ptrdiff_t>(bins_.size()) - 1;
  auto b = static_cast<std::ptrdiff_t>(std::ceil((d - kMin) * bins_per_unit_)) - 1;
  b = std::clamp<std::ptrdiff_t>(b, 0, last);
  while (b > 0 && d <= edges_[static_cast<std::size_t>(b)]) --b;
  while (b < last && d > edges_[static_cast<std::size_t>(b) + 1]) ++b;
  ++bins_[static_cast<std::size_t>(b)];
}

void HistogramAccumulator::merge(const HistogramAccumulator& other) {
  if (other.bins_per_unit_ != bins_per_unit_) {
    throw UsageError("histogram: cannot merge different steps");
  }
  for (std::size_t b = 0; b < bins_.size(); ++b) bins_[b] += other.bins_[b];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
  total_ += other.total_;
}

void HistogramAccumulator::restore(std::vector<std::uint64_t> bins, std::uint64_t underflow,
                                   std::uint64_t overflow) {
  if (bins.size() != bins_.size()) throw UsageError("histogram: bin count mismatch");
  bins_ = std::move(bins);
  underflow_ = underflow;
  overflow_ = overflow;
  total_ = underflow + overflow;
  for (std::uint64_t c : bins_) total_ += c;
}

HistogramAccumulator hist_accumulate(HistogramAccumulator acc, double d) {
  acc.add(d);
  return acc;
}

std::vector<DensityRow> hist_density(const HistogramAccumulator& acc) {
  if (acc.total() == 0) throw UsageError("hist_density: empty histogram");
  const auto total = static_cast<double>(acc.total());
  std::vector<DensityRow> rows;
  rows.reserve(acc.bin_count());
  for (std::size_t b = 0; b < acc.bin_count(); ++b) {
    const std::uint64_t count = acc.bins()[b];
    const double mid = 0.5 * (acc.left_edge(b) + acc.right_edge(b));
    rows.push_back({acc.right_edge(b), count, static_cast<double>(count) / total,
                    static_cast<double>(count) * acc.bins_per_unit() / total,
                    normal_pdf(mid)});
  }
  return rows;
}

std::vector<CumulativeRow> hist_cumulative(const HistogramAccumulator& acc) {
  if (acc.total() == 0) throw UsageError("hist_cumulative: empty histogram");
  const auto total = static_cast<double>(acc.total());
  std::vector<CumulativeRow> rows;
  rows.reserve(acc.bin_count() + 1);
  std::uint64_t running = acc.underflow();
  rows.push_back({HistogramAccumulator::kMin, running, static_cast<double>(running) / total,
                  normal_cdf(HistogramAccumulator::kMin)});
  for (std::size_t b = 0; b < acc.bin_count(); ++b) {
    running += acc.bins()[b];
    const double x = acc.right_edge(b);
    rows.push_back({x, running, static_cast<double>(running) / total, normal_cdf(x)});
  }
  return rows;
}

FrequencyTable::FrequencyTable(int q) {
  if (q < kMinBase || q > kMaxBase) throw UsageError("frequency table: base must be in 2..36");
  counts_.assign(static_cast<std::size_t>(q), 0);
}

void FrequencyTable::update(std::span<const Digit> digits) {
  for (Digit d : digits) ++counts_[d];
  n_ += digits.size();
}

void FrequencyTable::merge(const FrequencyTable& other) {
  if (other.counts_.size() != counts_.size()) throw UsageError("frequency table: base mismatch");
  for (std::size_t j = 0; j < counts_.size(); ++j) counts_[j] += other.counts_[j];
  n_ += other.n_;
}

void FrequencyTable::restore(std::vector<std::uint64_t> counts) {
  if (counts.size() != counts_.size()) throw UsageError("frequency table: base mismatch");
  counts_ = std::move(counts);
  n_ = 0;
  for (std::uint64_t c : counts_) n_ += c;
}

FrequencyTable freq_update(FrequencyTable table, Digit digit) {
  if (digit >= table.q()) {
    throw UsageError("digit " + std::to_string(digit) + " out of range for base " +
                     std::to_string(table.q()));
  }
  table.update(digit);
  return table;
}

double freq_variance(const FrequencyTable& table) {
  if (table.n() == 0) throw UsageError("freq_variance: empty table");
  const double n = static_cast<double>(table.n());
  const double p = 1.0 / table.q();
  double acc = 0.0;
  for (std::uint64_t c : table.counts()) {
    const double dev = static_cast<double>(c) / n - p;
    acc += dev * dev;
  }
  return acc / table.q();
}

}  // namespace digitstat
