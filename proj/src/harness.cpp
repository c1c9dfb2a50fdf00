#include "digitstat/harness.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <sstream>

#include "digitstat/baseline.hpp"
#include "digitstat/checkpoint.hpp"
#include "digitstat/errors.hpp"

namespace digitstat {

namespace {

constexpr std::size_t kReadChunk = 1 << 22;

std::uint64_t parse_radicand(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 1) {
    throw UsageError("bad sqrt radicand '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char text[64];
  const auto [ptr, ec] = std::to_chars(text, text + sizeof text, value);
  return std::string(text, ptr);
}

SourceSpec SourceSpec::parse(const std::string& text) {
  std::string body = text;
  const bool explicit_gen = body.rfind("gen:", 0) == 0;
  if (explicit_gen) body = body.substr(4);
  SourceSpec spec;
  if (body == "sqrt2") {
    spec.kind = Kind::sqrt;
    spec.radicand = 2;
  } else if (body.rfind("sqrt:", 0) == 0) {
    spec.kind = Kind::sqrt;
    spec.radicand = parse_radicand(std::string_view(body).substr(5));
  } else if (body == "e") {
    spec.kind = Kind::e;
  } else if (body == "pi") {
    spec.kind = Kind::pi;
  } else if (body == "baseline") {
    spec.kind = Kind::baseline;
  } else if (explicit_gen) {
    throw UsageError("unknown generator '" + text + "'");
  } else {
    if (text.empty()) throw UsageError("empty source");
    spec.kind = Kind::file;
    spec.path = text;
  }
  return spec;
}

std::string SourceSpec::canonical() const {
  switch (kind) {
    case Kind::file: return "file:" + std::filesystem::absolute(path).lexically_normal().string();
    case Kind::sqrt: return "gen:sqrt:" + std::to_string(radicand);
    case Kind::e: return "gen:e";
    case Kind::pi: return "gen:pi";
    case Kind::baseline: return "gen:baseline";
  }
  return "";
}

void RunConfig::validate() const {
  if (base < kMinBase || base > kMaxBase) throw UsageError("--base must be in 2..36");
  if (max_digits < 1) throw UsageError("--digits must be >= 1");
  const bool standard_step = step == 0.1 || step == 0.025;
  if (!standard_step && !allow_any_step) {
    throw UsageError("--step must be 0.1 or 0.025 (use --allow-any-step to override)");
  }
  (void)HistogramAccumulator::with_step(step);
  if (points_per_block < 1 || block_size < points_per_block) {
    throw UsageError("need --block-size >= --points-per-block >= 1");
  }
  if (lil_cutoff < kLilMinN) throw UsageError("--lil-cutoff must be >= 10");
  if (k_list.empty()) throw UsageError("--k needs at least one pattern length");
  for (int k : k_list) {
    if (k < 1) throw UsageError("--k values must be >= 1");
    if (k > kDefaultMaxPatternLength && !allow_long_patterns) {
      throw UsageError("--k above 4 requires --allow-long-patterns");
    }
  }
  if (resume && !checkpoint_path) throw UsageError("--resume requires --checkpoint");
  const SourceSpec spec = SourceSpec::parse(source);
  if (spec.is_generator() && spec.kind != SourceSpec::Kind::baseline && base != 10) {
    throw UsageError("constant generators produce base-10 digits only");
  }
}

AnalyzerOptions RunConfig::analyzer_options() const {
  AnalyzerOptions options;
  options.q = base;
  options.bins_per_unit = HistogramAccumulator::with_step(step).bins_per_unit();
  options.burn_in = burn_in;
  options.block_size = block_size;
  options.points_per_block = points_per_block;
  options.lil_cutoff = lil_cutoff;
  options.pattern_lengths = k_list;
  options.allow_long_patterns = allow_long_patterns;
  options.tail_thresholds = tail_thresholds;
  options.bands = bands;
  return options;
}

std::string RunConfig::fingerprint() const {
  const SourceSpec spec = SourceSpec::parse(source);
  std::ostringstream key;
  key << "source=" << spec.canonical() << ";base=" << base
      << ";bins_per_unit=" << HistogramAccumulator::with_step(step).bins_per_unit()
      << ";burn_in=" << burn_in << ";block=" << block_size << ";ppb=" << points_per_block
      << ";cutoff=" << lil_cutoff << ";k=";
  for (int k : k_list) key << k << ',';
  key << ";long=" << allow_long_patterns << ";tails=";
  for (double t : tail_thresholds) key << format_double(t) << ',';
  key << ";bands=";
  for (const DeviationBand& b : bands) key << format_double(b.lo) << ':' << format_double(b.hi) << ',';
  if (spec.kind == SourceSpec::Kind::baseline) key << ";seed=" << seed;
  if (spec.kind == SourceSpec::Kind::file) {
    key << ";format=" << (file_format ? static_cast<int>(*file_format) : -1)
        << ";strict=" << strict;
  }
  key << ";intpart=" << include_integer_part;
  return hex64(fnv1a64(key.str()));
}

DigitStream open_source(const SourceSpec& spec, int base, std::uint64_t count,
                        const RunConfig& config) {
  switch (spec.kind) {
    case SourceSpec::Kind::file: {
      FileOptions options;
      options.format = config.file_format ? *config.file_format : detect_file_format(spec.path);
      options.strict = config.strict;
      options.include_integer_part = config.include_integer_part;
      return open_digit_file(spec.path, base, options);
    }
    case SourceSpec::Kind::sqrt:
      return gen_sqrt_digits(spec.radicand, count, config.include_integer_part);
    case SourceSpec::Kind::e:
      return gen_e_digits(count, config.include_integer_part);
    case SourceSpec::Kind::pi:
      return gen_pi_digits(count, config.include_integer_part);
    case SourceSpec::Kind::baseline:
      return baseline_digits(config.seed, count, base);
  }
  throw UsageError("unknown source kind");
}

RunResult run_analysis(const RunConfig& config) {
  config.validate();
  const SourceSpec spec = SourceSpec::parse(config.source);
  const std::string fingerprint = config.fingerprint();
  Analyzer analyzer(config.analyzer_options());

  RunResult result;
  if (config.resume) {
    if (!std::filesystem::exists(*config.checkpoint_path)) {
      throw IoError("--resume: checkpoint '" + config.checkpoint_path->string() + "' not found");
    }
    result.resumed_from = checkpoint_load(*config.checkpoint_path, fingerprint, analyzer).position;
    if (result.resumed_from > config.max_digits) {
      throw UsageError("checkpoint is at n=" + std::to_string(result.resumed_from) +
                       ", beyond --digits " + std::to_string(config.max_digits));
    }
  }

  DigitStream stream = open_source(spec, config.base, config.max_digits, config);
  if (result.resumed_from > 0 && stream.skip(result.resumed_from) != result.resumed_from) {
    throw ParseError("source is shorter than the checkpoint position",
                     result.resumed_from);
  }

  const auto save = [&] {
    if (config.checkpoint_path) {
      checkpoint_save(*config.checkpoint_path, analyzer, {fingerprint, analyzer.scan().n});
    }
  };

  std::vector<Digit> buffer(kReadChunk);
  while (analyzer.scan().n < config.max_digits) {
    std::uint64_t want = std::min<std::uint64_t>(kReadChunk, config.max_digits - analyzer.scan().n);
    if (config.checkpoint_interval > 0) {
      const std::uint64_t next =
          (analyzer.scan().n / config.checkpoint_interval + 1) * config.checkpoint_interval;
      want = std::min(want, next - analyzer.scan().n);
    }
    std::size_t got = 0;
    while (got < want) {
      const std::size_t n = stream.read(std::span<Digit>(buffer.data() + got, want - got));
      if (n == 0) break;
      got += n;
    }
    analyzer.consume(std::span<const Digit>(buffer.data(), got), config.threads);
    if (got < want) {
      result.source_exhausted = true;
      break;
    }
    if (config.checkpoint_interval > 0 && analyzer.scan().n % config.checkpoint_interval == 0) {
      save();
    }
  }
  save();

  if (result.source_exhausted) {
    std::cerr << "warning: source ended after " << analyzer.scan().n << " digits (requested "
              << config.max_digits << ")\n";
  }
  result.digits = analyzer.scan().n;
  result.files = write_reports(analyzer, config, result.summary_text);
  return result;
}

}  // namespace digitstat
