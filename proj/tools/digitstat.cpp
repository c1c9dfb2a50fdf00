// digitstat command-line front end: analyze, generate, verify, bbp.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/harness.hpp"

namespace ds = digitstat;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kMismatch = 3 };

constexpr const char* kOutDirEnv = "DIGITSTAT_OUT_DIR";

std::vector<ds::DeviationBand> parse_bands(const std::vector<std::string>& texts) {
  std::vector<ds::DeviationBand> bands;
  for (const std::string& text : texts) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ds::UsageError("--band expects lo:hi, got '" + text + "'");
    try {
      std::size_t used_lo = 0, used_hi = 0;
      const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
      ds::DeviationBand band{std::stod(lo, &used_lo), std::stod(hi, &used_hi)};
      if (used_lo != lo.size() || used_hi != hi.size()) throw std::invalid_argument(text);
      bands.push_back(band);
    } catch (const std::logic_error&) {
      throw ds::UsageError("--band expects lo:hi, got '" + text + "'");
    }
  }
  return bands;
}

ds::Expansion expand(const std::string& constant, std::uint64_t digits) {
  const ds::SourceSpec spec = ds::SourceSpec::parse(constant);
  switch (spec.kind) {
    case ds::SourceSpec::Kind::sqrt: return ds::sqrt_expansion(spec.radicand, digits);
    case ds::SourceSpec::Kind::e: return ds::e_expansion(digits);
    case ds::SourceSpec::Kind::pi: return ds::pi_expansion(digits);
    default: throw ds::UsageError("--constant must be sqrt:<m>, e or pi");
  }
}

void write_expansion(const ds::Expansion& expansion, const std::string& path, bool header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ds::IoError("cannot open '" + path + "' for writing");
  if (header) out << expansion.integer_part << '.';
  std::string buffer;
  buffer.reserve(1 << 20);
  for (ds::Digit d : expansion.fraction) {
    buffer.push_back(static_cast<char>('0' + d));
    if (buffer.size() == buffer.capacity()) {
      out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
      buffer.clear();
    }
  }
  buffer.push_back('\n');
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out.close();
  if (!out) throw ds::IoError("writing '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digit statistics for expansions of mathematical constants"};
  app.require_subcommand(1);

  ds::RunConfig config;
  std::string format = "auto";
  bool lenient = false;
  std::vector<std::string> band_texts;
  std::string out_dir;
  std::string checkpoint;
  if (const char* env = std::getenv(kOutDirEnv)) out_dir = env;
  if (out_dir.empty()) out_dir = config.out_dir.string();

  CLI::App* analyze = app.add_subcommand("analyze", "Stream a digit source through the test battery");
  analyze->add_option("--source", config.source, "File path, gen:sqrt2, gen:sqrt:<m>, gen:e, gen:pi or gen:baseline")
      ->required();
  analyze->add_option("--base", config.base, "Digit base q")->capture_default_str();
  analyze->add_option("--digits", config.max_digits, "Number of digits to analyze")->required();
  analyze->add_option("--step", config.step, "Histogram bin width (0.1 or 0.025)")->capture_default_str();
  analyze->add_option("--burn-in", config.burn_in, "Leading n excluded from histogram and tail counts")
      ->capture_default_str();
  analyze->add_option("--block-size", config.block_size, "LIL envelope block length")->capture_default_str();
  analyze->add_option("--points-per-block", config.points_per_block, "Envelope buckets per block")
      ->capture_default_str();
  analyze->add_option("--lil-cutoff", config.lil_cutoff, "First n of the LIL series")->capture_default_str();
  analyze->add_option("--k", config.k_list, "Pattern lengths, comma separated")->delimiter(',')
      ->capture_default_str();
  analyze->add_flag("--allow-long-patterns", config.allow_long_patterns, "Permit k above 4");
  analyze->add_flag("--allow-any-step", config.allow_any_step, "Permit other bin widths of the form 1/m");
  analyze->add_option("--tail", config.tail_thresholds, "Thresholds t for the share of d > t")
      ->delimiter(',')->capture_default_str();
  analyze->add_option("--band", band_texts, "Deviation band lo:hi whose share is reported (repeatable)");
  analyze->add_option("--out", out_dir, "Output directory (default $" + std::string(kOutDirEnv) + " or digitstat-out)");
  analyze->add_option("--checkpoint", checkpoint, "Checkpoint file");
  analyze->add_option("--checkpoint-every", config.checkpoint_interval, "Checkpoint interval in digits (0: end only)");
  analyze->add_flag("--resume", config.resume, "Continue from --checkpoint");
  analyze->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  analyze->add_option("--seed", config.seed, "Seed for gen:baseline")->capture_default_str();
  analyze->add_option("--format", format, "Input file format")
      ->check(CLI::IsMember({"auto", "ascii", "header"}))->capture_default_str();
  analyze->add_flag("--lenient", lenient, "Skip stray bytes in input files instead of failing");
  analyze->add_flag("--with-integer-part", config.include_integer_part, "Analyze the integer part digits too");
  analyze->add_flag("--svg", config.svg, "Also write SVG charts");

  std::string constant;
  std::uint64_t gen_digits = 0;
  std::string gen_out;
  bool no_header = false;
  CLI::App* generate = app.add_subcommand("generate", "Write digits of a constant to a file");
  generate->add_option("--constant", constant, "sqrt:<m>, e or pi")->required();
  generate->add_option("--digits", gen_digits, "Fractional digits to write")->required();
  generate->add_option("--out", gen_out, "Output file")->required();
  generate->add_flag("--no-header", no_header, "Omit the '<integer part>.' prefix");

  std::string verify_file, against;
  std::uint64_t prefix = 0;
  int verify_base = 10;
  CLI::App* verify = app.add_subcommand("verify", "Compare a digit file against a generator");
  verify->add_option("--file", verify_file, "Digit file")->required();
  verify->add_option("--against", against, "Generator spec (gen:sqrt2, sqrt:<m>, e, pi) or another file")
      ->required();
  verify->add_option("--prefix", prefix, "Number of leading fractional digits to compare")->required();
  verify->add_option("--base", verify_base, "Digit base of the file")->capture_default_str();

  std::uint64_t position = 0;
  std::uint64_t count = 1;
  CLI::App* bbp = app.add_subcommand("bbp", "Hexadecimal digits of pi at a given position");
  bbp->add_option("--position", position, "1-based position after the radix point")->required();
  bbp->add_option("--count", count, "Number of consecutive digits")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) {
      config.out_dir = out_dir;
      if (!checkpoint.empty()) config.checkpoint_path = checkpoint;
      config.strict = !lenient;
      if (format == "ascii") config.file_format = ds::FileFormat::ascii;
      if (format == "header") config.file_format = ds::FileFormat::ascii_with_header;
      if (!band_texts.empty()) config.bands = parse_bands(band_texts);
      const ds::RunResult result = ds::run_analysis(config);
      std::cout << result.summary_text;
      if (result.resumed_from > 0) std::cout << "resumed from n=" << result.resumed_from << "\n";
      std::cout << "wrote " << result.files.size() << " files to " << config.out_dir.string() << "\n";
      return kOk;
    }
    if (*generate) {
      write_expansion(expand(constant, gen_digits), gen_out, !no_header);
      return kOk;
    }
    if (*verify) {
      ds::RunConfig source_config;
      ds::DigitStream file = ds::open_source(ds::SourceSpec::parse(verify_file), verify_base, prefix, source_config);
      ds::DigitStream reference = ds::open_source(ds::SourceSpec::parse(against), verify_base, prefix, source_config);
      const ds::VerificationReport report = ds::verify_prefix(file, reference, prefix);
      std::cout << ds::to_string(report.status) << ": " << report.digits_compared << " digits compared";
      if (report.first_mismatch) std::cout << ", first mismatch at digit " << *report.first_mismatch;
      std::cout << "\n";
      switch (report.status) {
        case ds::VerificationReport::Status::match: return kOk;
        case ds::VerificationReport::Status::mismatch: return kMismatch;
        case ds::VerificationReport::Status::short_input: return kData;
      }
    }
    if (*bbp) {
      if (count < 1) throw ds::UsageError("--count must be >= 1");
      std::string digits;
      for (std::uint64_t i = 0; i < count; ++i) digits.push_back(ds::digit_char(ds::bbp_hex_digit(position + i)));
      std::cout << digits << "\n";
      return kOk;
    }
  } catch (const ds::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ds::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ds::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kData;
  }
  return kUsage;
}
