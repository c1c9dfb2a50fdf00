#include "digitstat/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

constexpr std::string_view kMagic = "digitstat-checkpoint";

void put_bucket(std::ostringstream& out, const EnvelopeBucket<ExactLilPoint>& b) {
  out << "bucket " << b.block << ' ' << b.slot << ' ' << b.n_first;
  for (const ExactLilPoint* p : {&b.min, &b.max, &b.last}) {
    out << ' ' << p->n << ' ' << to_decimal(p->sum);
  }
  out << '\n';
}

// Token reader over one line that reports corruption as CheckpointError.
class Line {
 public:
  Line(std::string text, std::string_view expected_tag) : in_(std::move(text)) {
    std::string tag;
    in_ >> tag;
    if (tag != expected_tag) {
      throw CheckpointError("checkpoint: expected '" + std::string(expected_tag) + "', found '" +
                            tag + "'");
    }
  }

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw CheckpointError("checkpoint: truncated line");
    return w;
  }

  std::uint64_t u64() {
    const std::string w = word();
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc{} || ptr != w.data() + w.size()) {
      throw CheckpointError("checkpoint: bad integer '" + w + "'");
    }
    return value;
  }

  uint128 u128() {
    const std::string w = word();
    try {
      return parse_uint128(w);
    } catch (const UsageError&) {
      throw CheckpointError("checkpoint: bad integer '" + w + "'");
    }
  }

  std::vector<std::uint64_t> u64s(std::uint64_t count) {
    if (count > kMaxPatternTable) throw CheckpointError("checkpoint: implausible list length");
    std::vector<std::uint64_t> out(static_cast<std::size_t>(count));
    for (auto& v : out) v = u64();
    return out;
  }

  void finish() {
    std::string extra;
    if (in_ >> extra) throw CheckpointError("checkpoint: trailing data '" + extra + "'");
  }

 private:
  std::istringstream in_;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char text[17];
  std::snprintf(text, sizeof text, "%016llx", static_cast<unsigned long long>(value));
  return text;
}

std::string encode_checkpoint(const Analyzer& analyzer, const CheckpointData& meta) {
  std::ostringstream out;
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "fingerprint " << meta.fingerprint << '\n';
  out << "position " << meta.position << '\n';
  const ScanState& scan = analyzer.scan();
  out << "scan " << scan.q << ' ' << scan.n << ' ' << to_decimal(scan.sum) << '\n';

  const HistogramAccumulator& hist = analyzer.histogram();
  out << "histogram " << hist.bins_per_unit() << ' ' << hist.underflow() << ' ' << hist.overflow();
  for (std::uint64_t c : hist.bins()) out << ' ' << c;
  out << '\n';

  out << "frequencies";
  for (std::uint64_t c : analyzer.frequencies().counts()) out << ' ' << c;
  out << '\n';

  out << "tails " << analyzer.tail_counts().size();
  for (std::uint64_t c : analyzer.tail_counts()) out << ' ' << c;
  out << '\n';
  out << "bands " << analyzer.band_counts().size();
  for (std::uint64_t c : analyzer.band_counts()) out << ' ' << c;
  out << '\n';

  for (const PatternCounter& counter : analyzer.patterns()) {
    out << "pattern " << counter.k() << ' ' << counter.n() << ' ';
    const std::vector<Digit> window = counter.window();
    if (window.empty()) {
      out << '-';
    } else {
      for (Digit d : window) out << digit_char(d);
    }
    for (std::uint64_t c : counter.counts()) out << ' ' << c;
    out << '\n';
  }

  const auto& envelope = analyzer.envelope();
  out << "envelope " << envelope.completed().size() << ' ' << (envelope.open() ? 1 : 0) << '\n';
  for (const auto& bucket : envelope.completed()) put_bucket(out, bucket);
  if (envelope.open()) put_bucket(out, *envelope.open());

  std::string body = out.str();
  body += "checksum " + hex64(fnv1a64(body)) + "\n";
  return body;
}

CheckpointData decode_checkpoint(const std::string& text, const std::string& expected_fingerprint,
                                 Analyzer& analyzer) {
  std::vector<std::string> lines;
  std::size_t checksum_at = std::string::npos;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) throw CheckpointError("checkpoint: missing final newline");
      if (text.compare(pos, 9, "checksum ") == 0) checksum_at = pos;
      lines.emplace_back(text.substr(pos, end - pos));
      pos = end + 1;
    }
  }
  if (lines.empty()) throw CheckpointError("checkpoint: empty file");

  {
    Line header(lines.front(), kMagic);
    const std::uint64_t version = header.u64();
    if (version != static_cast<std::uint64_t>(kCheckpointVersion)) {
      throw CheckpointError("checkpoint: unsupported version " + std::to_string(version));
    }
  }
  if (checksum_at == std::string::npos) throw CheckpointError("checkpoint: missing checksum");
  {
    Line line(lines.back(), "checksum");
    if (line.word() != hex64(fnv1a64(std::string_view(text).substr(0, checksum_at)))) {
      throw CheckpointError("checkpoint: checksum mismatch (file is corrupted)");
    }
  }

  std::size_t at = 1;
  const auto next = [&](std::string_view tag) {
    if (at >= lines.size() - 1) throw CheckpointError("checkpoint: truncated");
    return Line(lines[at++], tag);
  };

  CheckpointData meta;
  {
    Line line = next("fingerprint");
    meta.fingerprint = line.word();
    if (meta.fingerprint != expected_fingerprint) {
      throw CheckpointError("checkpoint: configuration fingerprint " + meta.fingerprint +
                            " does not match the live configuration " + expected_fingerprint);
    }
  }
  {
    Line line = next("position");
    meta.position = line.u64();
  }

  const AnalyzerOptions& options = analyzer.options();
  ScanState scan;
  {
    Line line = next("scan");
    scan.q = static_cast<int>(line.u64());
    scan.n = line.u64();
    scan.sum = line.u128();
    line.finish();
  }
  HistogramAccumulator hist(options.bins_per_unit);
  {
    Line line = next("histogram");
    if (line.u64() != static_cast<std::uint64_t>(options.bins_per_unit)) {
      throw CheckpointError("checkpoint: histogram step differs");
    }
    const std::uint64_t under = line.u64();
    const std::uint64_t over = line.u64();
    hist.restore(line.u64s(hist.bin_count()), under, over);
    line.finish();
  }
  FrequencyTable freq(options.q);
  {
    Line line = next("frequencies");
    freq.restore(line.u64s(static_cast<std::size_t>(options.q)));
    line.finish();
  }
  std::vector<std::uint64_t> tails;
  {
    Line line = next("tails");
    tails = line.u64s(line.u64());
    line.finish();
  }
  std::vector<std::uint64_t> bands;
  {
    Line line = next("bands");
    bands = line.u64s(line.u64());
    line.finish();
  }
  std::vector<PatternCounter> patterns;
  for (int k : options.pattern_lengths) {
    Line line = next("pattern");
    if (line.u64() != static_cast<std::uint64_t>(k)) throw CheckpointError("checkpoint: pattern length differs");
    PatternCounter counter(options.q, k, options.allow_long_patterns);
    const std::uint64_t n = line.u64();
    const std::string window_text = line.word();
    std::vector<Digit> window;
    if (window_text != "-") {
      try {
        window = parse_pattern(window_text, options.q);
      } catch (const UsageError&) {
        throw CheckpointError("checkpoint: bad pattern window");
      }
    }
    counter.restore(line.u64s(counter.table_size()), n, window);
    line.finish();
    patterns.push_back(std::move(counter));
  }

  BlockSeries<ExactLilPoint> envelope(options.block_size, options.points_per_block);
  {
    Line line = next("envelope");
    const std::uint64_t completed = line.u64();
    const std::uint64_t has_open = line.u64();
    line.finish();
    const auto read_bucket = [&] {
      Line b = next("bucket");
      EnvelopeBucket<ExactLilPoint> bucket;
      bucket.block = b.u64();
      bucket.slot = b.u64();
      bucket.n_first = b.u64();
      for (ExactLilPoint* p : {&bucket.min, &bucket.max, &bucket.last}) {
        const std::uint64_t n = b.u64();
        const uint128 sum = b.u128();
        if (n < options.lil_cutoff) throw CheckpointError("checkpoint: envelope point below cutoff");
        *p = analyzer.make_point(n, sum);
      }
      b.finish();
      return bucket;
    };
    std::vector<EnvelopeBucket<ExactLilPoint>> buckets;
    for (std::uint64_t i = 0; i < completed; ++i) buckets.push_back(read_bucket());
    std::optional<EnvelopeBucket<ExactLilPoint>> open;
    if (has_open == 1) open = read_bucket();
    envelope.restore(std::move(buckets), std::move(open));
  }
  if (at != lines.size() - 1) throw CheckpointError("checkpoint: unexpected extra lines");

  // Cross-field consistency.
  if (freq.n() != scan.n || meta.position != scan.n) {
    throw CheckpointError("checkpoint: digit counts disagree");
  }
  for (const PatternCounter& counter : patterns) {
    if (counter.n() != scan.n) throw CheckpointError("checkpoint: pattern counter out of step");
  }
  try {
    analyzer.restore(scan, std::move(hist), std::move(freq), std::move(patterns), std::move(tails),
                     std::move(bands), std::move(envelope));
  } catch (const UsageError& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  return meta;
}

void checkpoint_save(const std::filesystem::path& path, const Analyzer& analyzer,
                     const CheckpointData& meta) {
  const std::string text = encode_checkpoint(analyzer, meta);
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint '" + temp.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      std::filesystem::remove(temp, ignored);
      throw IoError("writing checkpoint '" + temp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

CheckpointData checkpoint_load(const std::filesystem::path& path,
                               const std::string& expected_fingerprint, Analyzer& analyzer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_checkpoint(buffer.str(), expected_fingerprint, analyzer);
}

}  // namespace digitstat
