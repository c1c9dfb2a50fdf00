#include "digitstat/baseline.hpp"

#include <random>

#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

class BaselineSource final : public DigitSource {
 public:
  BaselineSource(std::uint64_t seed, std::uint64_t count, int q)
      : seed_(seed), count_(count), q_(static_cast<std::uint64_t>(q)), engine_(seed) {
    // Largest q^m that fits in 64 bits.
    modulus_ = q_;
    per_draw_ = 1;
    while (modulus_ <= UINT64_MAX / q_) {
      modulus_ *= q_;
      ++per_draw_;
    }
    const std::uint64_t excess = (UINT64_MAX % modulus_ + 1) % modulus_;  // 2^64 mod q^m
    limit_ = excess == 0 ? 0 : UINT64_MAX - excess + 1;  // 0 encodes "accept everything"
  }

  std::size_t read(std::span<Digit> out) override {
    std::size_t written = 0;
    while (written < out.size() && produced_ < count_) {
      if (buffered_ == 0) refill();
      out[written++] = static_cast<Digit>(word_ % q_);
      word_ /= q_;
      --buffered_;
      ++produced_;
    }
    return written;
  }

  std::unique_ptr<DigitSource> reopen() const override {
    return std::make_unique<BaselineSource>(seed_, count_, static_cast<int>(q_));
  }

 private:
  void refill() {
    std::uint64_t x = engine_();
    while (limit_ != 0 && x >= limit_) x = engine_();
    word_ = x % modulus_;
    buffered_ = per_draw_;
  }

  std::uint64_t seed_;
  std::uint64_t count_;
  std::uint64_t q_;
  std::mt19937_64 engine_;
  std::uint64_t modulus_ = 0;
  int per_draw_ = 0;
  std::uint64_t limit_ = 0;
  std::uint64_t word_ = 0;
  int buffered_ = 0;
  std::uint64_t produced_ = 0;
};

}  // namespace

DigitStream baseline_digits(std::uint64_t seed, std::uint64_t count, int q) {
  if (q < kMinBase || q > kMaxBase) throw UsageError("baseline: base must be in 2..36");
  SourceDescriptor source{SourceDescriptor::Kind::generator, "baseline",
                          "seed=" + std::to_string(seed) + ",count=" + std::to_string(count) +
                              ",q=" + std::to_string(q)};
  return DigitStream(q, std::move(source), count,
                     std::make_unique<BaselineSource>(seed, count, q));
}

}  // namespace digitstat
