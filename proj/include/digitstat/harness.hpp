#pragma once

// Full-stream analysis runs: configuration, source resolution, checkpointed
// streaming over the Analyzer, and report emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "digitstat/analyzer.hpp"
#include "digitstat/digitstream.hpp"

namespace digitstat {

/// Parsed `--source` / `--against` value.
struct SourceSpec {
  enum class Kind { file, sqrt, e, pi, baseline };

  Kind kind = Kind::file;
  std::filesystem::path path;
  std::uint64_t radicand = 2;  // for sqrt

  /// Accepts "gen:sqrt2", "gen:sqrt:<m>", "gen:e", "gen:pi", "gen:baseline"
  /// (the "gen:" prefix is optional for the generator forms, and "sqrt2" is
  /// short for "sqrt:2"); anything else is a file path.
  static SourceSpec parse(const std::string& text);
  std::string canonical() const;
  bool is_generator() const noexcept { return kind != Kind::file; }
};

struct RunConfig {
  std::string source = "gen:sqrt2";
  int base = 10;
  std::uint64_t max_digits = 1'000'000;
  double step = 0.1;
  bool allow_any_step = false;
  std::uint64_t burn_in = 0;
  std::uint64_t block_size = 100'000'000;
  std::uint64_t points_per_block = 1000;
  std::uint64_t lil_cutoff = kLilMinN;
  std::vector<int> k_list = {1, 2};
  bool allow_long_patterns = false;
  std::vector<double> tail_thresholds = {0.6, 1.0};
  std::vector<DeviationBand> bands = {{-1.48, -0.36}};
  std::uint64_t seed = 1;

  /// Input file handling; nullopt means detect the header.
  std::optional<FileFormat> file_format;
  bool strict = true;
  bool include_integer_part = false;

  std::filesystem::path out_dir = "digitstat-out";
  std::optional<std::filesystem::path> checkpoint_path;
  /// Save a checkpoint every this many digits (0: only at the end of the run).
  std::uint64_t checkpoint_interval = 0;
  bool resume = false;
  unsigned threads = 1;
  bool svg = false;

  /// Throws UsageError on inconsistent settings.
  void validate() const;
  AnalyzerOptions analyzer_options() const;
  /// Hash of every setting that changes results. The digit budget, output
  /// location, checkpoint cadence and thread count are excluded: they do not
  /// alter the state at a given n.
  std::string fingerprint() const;
};

/// Opens the configured source for `count` digits.
DigitStream open_source(const SourceSpec& spec, int base, std::uint64_t count,
                        const RunConfig& config);

struct RunResult {
  std::uint64_t digits = 0;          ///< final n
  std::uint64_t resumed_from = 0;    ///< n restored from a checkpoint
  bool source_exhausted = false;     ///< source ended before max_digits
  std::vector<std::filesystem::path> files;
  std::string summary_text;
};

/// One streaming pass; writes every report into config.out_dir.
RunResult run_analysis(const RunConfig& config);

/// Writes the report bundle for the current analyzer state.
std::vector<std::filesystem::path> write_reports(const Analyzer& analyzer, const RunConfig& config,
                                                 std::string& summary_text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace digitstat
