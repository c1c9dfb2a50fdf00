#include "digitstat/digitstream.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <iostream>

#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

constexpr std::uint8_t kWhitespace = 0xFE;
constexpr std::uint8_t kInvalid = 0xFF;

constexpr std::array<std::uint8_t, 256> make_char_table() {
  std::array<std::uint8_t, 256> table{};
  for (auto& entry : table) entry = kInvalid;
  for (int c = '0'; c <= '9'; ++c) table[c] = static_cast<std::uint8_t>(c - '0');
  for (int c = 'A'; c <= 'Z'; ++c) table[c] = static_cast<std::uint8_t>(c - 'A' + 10);
  for (int c = 'a'; c <= 'z'; ++c) table[c] = static_cast<std::uint8_t>(c - 'a' + 10);
  table[' '] = kWhitespace;
  table['\t'] = kWhitespace;
  table['\r'] = kWhitespace;
  table['\n'] = kWhitespace;
  return table;
}

constexpr auto kCharTable = make_char_table();

void check_base(int base) {
  if (base < kMinBase || base > kMaxBase) {
    throw UsageError("base must be in 2..36, got " + std::to_string(base));
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open digit file '" + path.string() + "'");
  return file;
}

// Buffered parser for ASCII digit files.
class FileSource final : public DigitSource {
 public:
  FileSource(std::filesystem::path path, int base, FileOptions options)
      : path_(std::move(path)),
        base_(base),
        options_(options),
        file_(open_file(path_)),
        buffer_(kBufferSize) {
    if (options_.format == FileFormat::ascii_with_header) read_header();
  }

  ~FileSource() override {
    if (skipped_ > 0) {
      std::cerr << "warning: skipped " << skipped_ << " invalid byte(s) in '"
                << path_.string() << "'\n";
    }
  }

  std::size_t read(std::span<Digit> out) override {
    std::size_t written = 0;
    while (written < out.size() && pending_pos_ < pending_.size()) {
      out[written++] = pending_[pending_pos_++];
    }
    while (written < out.size()) {
      if (pos_ == end_ && !refill()) break;
      const std::size_t limit = end_;
      std::size_t p = pos_;
      while (p < limit && written < out.size()) {
        const std::uint8_t code = kCharTable[buffer_[p]];
        if (code < base_) {
          out[written++] = code;
        } else if (code != kWhitespace) {
          reject(buffer_[p], code, buffer_offset_ + p);
        }
        ++p;
      }
      pos_ = p;
    }
    return written;
  }

  std::unique_ptr<DigitSource> reopen() const override {
    return std::make_unique<FileSource>(path_, base_, options_);
  }

 private:
  static constexpr std::size_t kBufferSize = 1 << 20;

  bool refill() {
    buffer_offset_ += end_;
    pos_ = 0;
    end_ = std::fread(buffer_.data(), 1, buffer_.size(), file_.get());
    if (end_ == 0 && std::ferror(file_.get())) {
      throw IoError("read error on '" + path_.string() + "'");
    }
    return end_ > 0;
  }

  int peek_byte() {
    if (pos_ == end_ && !refill()) return EOF;
    return buffer_[pos_];
  }

  void reject(unsigned char byte, std::uint8_t code, std::uint64_t offset) {
    if (code != kInvalid) {
      throw ParseError("digit '" + std::string(1, static_cast<char>(byte)) +
                           "' is not valid in base " + std::to_string(base_),
                       offset);
    }
    if (options_.strict) {
      throw ParseError("invalid byte 0x" + hex_byte(byte), offset);
    }
    if (skipped_++ == 0) {
      std::cerr << "warning: skipping invalid byte 0x" << hex_byte(byte)
                << " at byte offset " << offset << " in '" << path_.string()
                << "'\n";
    }
  }

  static std::string hex_byte(unsigned char byte) {
    char text[3];
    std::snprintf(text, sizeof text, "%02X", byte);
    return text;
  }

  // Consumes "<integer-part>." (whitespace allowed anywhere).
  void read_header() {
    bool seen_digit = false;
    for (;;) {
      const int c = peek_byte();
      const std::uint64_t offset = buffer_offset_ + pos_;
      if (c == EOF) throw ParseError("missing '<integer>.' header", offset);
      ++pos_;
      if (c == '.') break;
      const std::uint8_t code = kCharTable[static_cast<unsigned char>(c)];
      if (code == kWhitespace) continue;
      if (code >= base_) {
        throw ParseError("unexpected byte in '<integer>.' header", offset);
      }
      seen_digit = true;
      if (options_.include_integer_part) pending_.push_back(code);
    }
    if (!seen_digit) {
      throw ParseError("empty integer part in header", buffer_offset_ + pos_ - 1);
    }
  }

  std::filesystem::path path_;
  int base_;
  FileOptions options_;
  FilePtr file_;
  std::vector<unsigned char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::uint64_t buffer_offset_ = 0;
  std::vector<Digit> pending_;
  std::size_t pending_pos_ = 0;
  std::uint64_t skipped_ = 0;
};

class ExpansionSource final : public DigitSource {
 public:
  ExpansionSource(std::shared_ptr<const Expansion> expansion,
                  bool include_integer_part)
      : expansion_(std::move(expansion)), include_integer_(include_integer_part) {
    if (include_integer_) {
      for (char c : expansion_->integer_part) prefix_.push_back(static_cast<Digit>(c - '0'));
    }
  }

  std::size_t read(std::span<Digit> out) override {
    std::size_t written = 0;
    while (written < out.size() && prefix_pos_ < prefix_.size()) {
      out[written++] = prefix_[prefix_pos_++];
    }
    const auto& digits = expansion_->fraction;
    const std::size_t n = std::min(out.size() - written, digits.size() - offset_);
    std::copy_n(digits.begin() + static_cast<std::ptrdiff_t>(offset_), n,
                out.begin() + static_cast<std::ptrdiff_t>(written));
    offset_ += n;
    return written + n;
  }

  std::unique_ptr<DigitSource> reopen() const override {
    return std::make_unique<ExpansionSource>(expansion_, include_integer_);
  }

 private:
  std::shared_ptr<const Expansion> expansion_;
  bool include_integer_;
  std::vector<Digit> prefix_;
  std::size_t prefix_pos_ = 0;
  std::size_t offset_ = 0;
};

}  // namespace

std::string SourceDescriptor::to_string() const {
  std::string text = (kind == Kind::file ? "file:" : "gen:") + id;
  if (!params.empty()) text += " (" + params + ")";
  return text;
}

char digit_char(int value) {
  return static_cast<char>(value < 10 ? '0' + value : 'A' + (value - 10));
}

DigitStream::DigitStream(int base, SourceDescriptor source,
                         std::optional<std::uint64_t> length_hint,
                         std::unique_ptr<DigitSource> impl)
    : base_(base),
      source_(std::move(source)),
      length_hint_(length_hint),
      impl_(std::move(impl)) {
  check_base(base_);
  if (!impl_) throw UsageError("DigitStream requires a source");
}

std::optional<Digit> DigitStream::next() {
  Digit digit = 0;
  if (read(std::span<Digit>(&digit, 1)) == 0) return std::nullopt;
  return digit;
}

std::size_t DigitStream::read(std::span<Digit> out) {
  const std::size_t n = impl_->read(out);
  check_digits(out.first(n));
  cursor_ += n;
  return n;
}

std::uint64_t DigitStream::skip(std::uint64_t count) {
  std::vector<Digit> scratch(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1 << 20)));
  std::uint64_t skipped = 0;
  while (skipped < count) {
    const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(count - skipped, scratch.size()));
    const std::size_t got = read(std::span<Digit>(scratch.data(), want));
    if (got == 0) break;
    skipped += got;
  }
  return skipped;
}

DigitStream DigitStream::reopen() const {
  return DigitStream(base_, source_, length_hint_, impl_->reopen());
}

void DigitStream::check_digits(std::span<const Digit> digits) const {
#ifdef NDEBUG
  constexpr std::size_t stride = 4096;
#else
  constexpr std::size_t stride = 1;
#endif
  for (std::size_t i = 0; i < digits.size(); i += stride) {
    if (digits[i] >= base_) {
      throw Error("digit source produced " + std::to_string(digits[i]) +
                  " in base " + std::to_string(base_));
    }
  }
}

DigitStream open_digit_file(const std::filesystem::path& path, int base,
                            const FileOptions& options) {
  check_base(base);
  SourceDescriptor source{SourceDescriptor::Kind::file, path.string(),
                          options.format == FileFormat::ascii ? "format=ascii"
                                                              : "format=ascii-with-header"};
  std::optional<std::uint64_t> hint;
  std::error_code ec;
  if (const auto size = std::filesystem::file_size(path, ec); !ec) hint = size;
  return DigitStream(base, std::move(source), hint,
                     std::make_unique<FileSource>(path, base, options));
}

DigitStream open_digit_file(const std::filesystem::path& path, int base,
                            FileFormat format, bool strict) {
  FileOptions options;
  options.format = format;
  options.strict = strict;
  return open_digit_file(path, base, options);
}

FileFormat detect_file_format(const std::filesystem::path& path) {
  FilePtr file = open_file(path);
  std::array<unsigned char, 256> head{};
  const std::size_t n = std::fread(head.data(), 1, head.size(), file.get());
  bool seen_digit = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t code = kCharTable[head[i]];
    if (head[i] == '.') return seen_digit ? FileFormat::ascii_with_header : FileFormat::ascii;
    if (code == kWhitespace) continue;
    if (code == kInvalid) break;
    seen_digit = true;
  }
  return FileFormat::ascii;
}

DigitStream expansion_stream(std::shared_ptr<const Expansion> expansion,
                             SourceDescriptor source,
                             bool include_integer_part) {
  std::uint64_t length = expansion->fraction.size();
  if (include_integer_part) length += expansion->integer_part.size();
  auto impl = std::make_unique<ExpansionSource>(expansion, include_integer_part);
  return DigitStream(10, std::move(source), length, std::move(impl));
}

std::string to_string(VerificationReport::Status status) {
  switch (status) {
    case VerificationReport::Status::match: return "match";
    case VerificationReport::Status::mismatch: return "mismatch";
    case VerificationReport::Status::short_input: return "short_input";
  }
  return "unknown";
}

VerificationReport verify_prefix(DigitStream& a, DigitStream& b,
                                 std::uint64_t count) {
  if (a.base() != b.base()) {
    throw UsageError("cannot compare streams of base " + std::to_string(a.base()) +
                     " and " + std::to_string(b.base()));
  }
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<Digit> left(kChunk);
  std::vector<Digit> right(kChunk);
  VerificationReport report;
  while (report.digits_compared < count) {
    const auto want = static_cast<std::size_t>(
        std::min<std::uint64_t>(kChunk, count - report.digits_compared));
    // Pull exactly `want` from each side unless a side runs dry.
    std::size_t got_a = 0;
    while (got_a < want) {
      const std::size_t got = a.read(std::span<Digit>(left.data() + got_a, want - got_a));
      if (got == 0) break;
      got_a += got;
    }
    std::size_t got_b = 0;
    while (got_b < want) {
      const std::size_t got = b.read(std::span<Digit>(right.data() + got_b, want - got_b));
      if (got == 0) break;
      got_b += got;
    }
    const std::size_t common = std::min(got_a, got_b);
    const auto diff = std::mismatch(left.begin(), left.begin() + static_cast<std::ptrdiff_t>(common),
                                    right.begin());
    if (diff.first != left.begin() + static_cast<std::ptrdiff_t>(common)) {
      const auto index = static_cast<std::uint64_t>(diff.first - left.begin());
      report.digits_compared += index + 1;
      report.first_mismatch = report.digits_compared;
      report.status = VerificationReport::Status::mismatch;
      return report;
    }
    report.digits_compared += common;
    if (common < want) {
      report.status = VerificationReport::Status::short_input;
      return report;
    }
  }
  return report;
}

}  // namespace digitstat
