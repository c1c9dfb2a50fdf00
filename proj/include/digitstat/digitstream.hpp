#pragma once

// Verified base-q digit sequences: parsed digit files, exact generators for
// sqrt(m), e and pi, BBP hexadecimal digit extraction, and prefix comparison.
//
// Index convention: digit 1 is the first digit after the radix point. The
// integer part is dropped unless a caller asks for it explicitly.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace digitstat {

using Digit = std::uint8_t;

inline constexpr int kMinBase = 2;
inline constexpr int kMaxBase = 36;

/// Upper bound on digits a generator will materialize in memory.
inline constexpr std::uint64_t kMaxGeneratedDigits = 2'000'000'000ULL;
/// The pi spigot is quadratic in the digit count; past this it is unusable.
inline constexpr std::uint64_t kMaxPiDigits = 10'000'000ULL;
/// Largest BBP position whose fixed-point error bound keeps all eight guard
/// hex digits clean (error < 2^-36 of the extracted fraction).
inline constexpr std::uint64_t kBbpMaxPosition = 10'000'000ULL;

enum class FileFormat { ascii, ascii_with_header };

struct SourceDescriptor {
  enum class Kind { file, generator };

  Kind kind = Kind::generator;
  /// File path, or generator id such as "sqrt:2", "e", "pi", "baseline".
  std::string id;
  /// Free-form parameter string ("count=1000", "format=ascii", ...).
  std::string params;

  std::string to_string() const;
};

/// Producer behind a DigitStream. Implementations fill `out` with as many
/// digits as are available and return the number written; 0 means exhausted.
class DigitSource {
 public:
  virtual ~DigitSource() = default;
  virtual std::size_t read(std::span<Digit> out) = 0;
  /// A fresh source positioned at the first digit, yielding the same sequence.
  virtual std::unique_ptr<DigitSource> reopen() const = 0;
};

/// Single-consumer sequential iterator over base-q digits.
class DigitStream {
 public:
  DigitStream(int base, SourceDescriptor source,
              std::optional<std::uint64_t> length_hint,
              std::unique_ptr<DigitSource> impl);

  DigitStream(DigitStream&&) noexcept = default;
  DigitStream& operator=(DigitStream&&) noexcept = default;

  int base() const noexcept { return base_; }
  const SourceDescriptor& source() const noexcept { return source_; }
  std::optional<std::uint64_t> length_hint() const noexcept {
    return length_hint_;
  }
  /// Number of digits already yielded.
  std::uint64_t cursor() const noexcept { return cursor_; }

  std::optional<Digit> next();
  std::size_t read(std::span<Digit> out);
  /// Discards up to `count` digits; returns how many were skipped.
  std::uint64_t skip(std::uint64_t count);

  DigitStream reopen() const;

 private:
  void check_digits(std::span<const Digit> digits) const;

  int base_;
  SourceDescriptor source_;
  std::optional<std::uint64_t> length_hint_;
  std::unique_ptr<DigitSource> impl_;
  std::uint64_t cursor_ = 0;
};

struct FileOptions {
  FileFormat format = FileFormat::ascii;
  /// Strict: any byte other than a digit or whitespace is a parse error.
  /// Lenient: such bytes are skipped and reported on stderr.
  bool strict = true;
  /// Yield the header's integer-part digits before the fraction.
  bool include_integer_part = false;
};

DigitStream open_digit_file(const std::filesystem::path& path, int base,
                            const FileOptions& options = {});
DigitStream open_digit_file(const std::filesystem::path& path, int base,
                            FileFormat format, bool strict);

/// Looks at the first bytes of a file and reports whether it starts with an
/// "<integer-part>." header.
FileFormat detect_file_format(const std::filesystem::path& path);

/// Exact expansion of a constant: integer part as decimal text, then the
/// fractional digits (truncated, never rounded).
struct Expansion {
  std::string integer_part;
  std::vector<Digit> fraction;
};

Expansion sqrt_expansion(std::uint64_t radicand, std::uint64_t count);
Expansion e_expansion(std::uint64_t count);
Expansion pi_expansion(std::uint64_t count);

/// Wraps an in-memory expansion as a base-10 stream.
DigitStream expansion_stream(std::shared_ptr<const Expansion> expansion,
                             SourceDescriptor source,
                             bool include_integer_part = false);

DigitStream gen_sqrt_digits(std::uint64_t radicand, std::uint64_t count,
                            bool include_integer_part = false);
DigitStream gen_e_digits(std::uint64_t count,
                         bool include_integer_part = false);
DigitStream gen_pi_digits(std::uint64_t count,
                          bool include_integer_part = false);

/// Hexadecimal fractional digit of pi at 1-based `position`, computed with
/// the BBP series without the preceding digits. Valid for positions up to
/// kBbpMaxPosition; throws PrecisionError outside that range or if the guard
/// digits cannot exclude a carry.
int bbp_hex_digit(std::uint64_t position);

struct VerificationReport {
  enum class Status { match, mismatch, short_input };

  std::uint64_t digits_compared = 0;
  std::optional<std::uint64_t> first_mismatch;  // 1-based
  Status status = Status::match;
};

std::string to_string(VerificationReport::Status status);

/// Compares the next `count` digits of both streams.
VerificationReport verify_prefix(DigitStream& a, DigitStream& b,
                                 std::uint64_t count);

/// Character for digit value 0..35 ('0'-'9', then 'A'-'Z').
char digit_char(int value);

}  // namespace digitstat
