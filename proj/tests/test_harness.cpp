#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "digitstat/analyzer.hpp"
#include "digitstat/baseline.hpp"
#include "digitstat/checkpoint.hpp"
#include "digitstat/errors.hpp"
#include "digitstat/harness.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace digitstat;
using testutil::read_text;
using testutil::TempDir;

namespace {

AnalyzerOptions small_options() {
  AnalyzerOptions o;
  o.block_size = 50'000;
  o.points_per_block = 100;
  o.pattern_lengths = {1, 2, 3};
  o.burn_in = 7;
  o.bands = {{-1.48, -0.36}, {0.0, 0.5}};
  return o;
}

RunConfig small_config(const std::filesystem::path& out) {
  RunConfig c;
  c.source = "gen:sqrt2";
  c.max_digits = 1'000'000;
  c.block_size = 100'000;
  c.points_per_block = 200;
  c.k_list = {1, 2, 3};
  c.burn_in = 100;
  c.out_dir = out;
  return c;
}

std::vector<std::string> report_names(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

void expect_same_reports(const std::filesystem::path& a, const std::filesystem::path& b) {
  const auto names = report_names(a);
  ASSERT_EQ(names, report_names(b));
  for (const std::string& name : names) {
    EXPECT_EQ(read_text(a / name), read_text(b / name)) << name;
  }
}

// The documented baseline algorithm, restated independently.
std::vector<Digit> baseline_reference(std::uint64_t seed, std::size_t count, int q) {
  std::mt19937_64 engine(seed);
  unsigned __int128 modulus = 1;
  int per_draw = 0;
  while (modulus * q < (static_cast<unsigned __int128>(1) << 64)) {
    modulus *= q;
    ++per_draw;
  }
  const unsigned __int128 two64 = static_cast<unsigned __int128>(1) << 64;
  const unsigned __int128 accept_below = two64 / modulus * modulus;
  std::vector<Digit> out;
  while (out.size() < count) {
    std::uint64_t x = engine();
    while (x >= accept_below) x = engine();
    std::uint64_t word = static_cast<std::uint64_t>(x % modulus);
    for (int i = 0; i < per_draw && out.size() < count; ++i) {
      out.push_back(static_cast<Digit>(word % q));
      word /= q;
    }
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(DIGITSTAT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Analyzer, ThreadedEqualsSequential) {
  std::mt19937_64 rng(31);
  const auto digits = oracle::random_digits(rng, 700'001, 10);
  Analyzer one(small_options()), many(small_options()), chunked(small_options());
  one.consume(digits, 1);
  many.consume(digits, 4);
  std::size_t at = 0;
  while (at < digits.size()) {
    const std::size_t len = std::min<std::size_t>(digits.size() - at, 1 + rng() % 150'000);
    chunked.consume(std::span<const Digit>(digits.data() + at, len), 3);
    at += len;
  }
  EXPECT_TRUE(one.same_integer_state(many));
  EXPECT_TRUE(one.same_integer_state(chunked));
  EXPECT_EQ(one.histogram().total(), digits.size() - 7);
}

TEST(Analyzer, TalliesMatchDirectComputation) {
  std::mt19937_64 rng(32);
  const auto digits = oracle::random_digits(rng, 20'000, 10);
  AnalyzerOptions o = small_options();
  Analyzer a(o);
  a.consume(digits);
  std::vector<double> d;
  std::uint64_t sum = 0, in_band = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    sum += digits[i];
    const double x = deviation(i + 1, sum, a.moments());
    if (i + 1 > o.burn_in) {
      d.push_back(x);
      if (x >= -1.48 && x <= -0.36) ++in_band;
    }
  }
  EXPECT_EQ(a.tail_counts()[0], static_cast<std::uint64_t>(std::llround(tail_fraction(d, 0.6) * d.size())));
  EXPECT_EQ(a.tail_counts()[1], static_cast<std::uint64_t>(std::llround(tail_fraction(d, 1.0) * d.size())));
  EXPECT_EQ(a.band_counts()[0], in_band);
  EXPECT_TRUE(a.scan().sum == sum);
}

TEST(Analyzer, RejectsOutOfRangeDigits) {
  Analyzer a(small_options());
  const std::vector<Digit> bad = {1, 2, 10};
  EXPECT_THROW(a.consume(bad), UsageError);
}

TEST(Checkpoint, RoundTripIsLossless) {
  std::mt19937_64 rng(33);
  const auto digits = oracle::random_digits(rng, 123'457, 10);
  Analyzer a(small_options());
  a.consume(digits);
  const std::string text = encode_checkpoint(a, {"abc", a.scan().n});
  Analyzer b(small_options());
  const CheckpointData meta = decode_checkpoint(text, "abc", b);
  EXPECT_EQ(meta.position, digits.size());
  EXPECT_TRUE(a.same_integer_state(b));
  EXPECT_EQ(encode_checkpoint(b, meta), text);

  // Continuing both gives the same state.
  const auto more = oracle::random_digits(rng, 54'321, 10);
  a.consume(more);
  b.consume(more);
  EXPECT_TRUE(a.same_integer_state(b));
}

TEST(Checkpoint, RejectsMismatchAndCorruption) {
  Analyzer a(small_options());
  a.consume(std::vector<Digit>(5000, 7));
  const std::string text = encode_checkpoint(a, {"abc", a.scan().n});
  {
    Analyzer b(small_options());
    EXPECT_THROW(decode_checkpoint(text, "abd", b), CheckpointError);
  }
  {
    std::string bad = text;
    bad[bad.find("scan 10 ") + 8] = '9';
    Analyzer b(small_options());
    EXPECT_THROW(decode_checkpoint(bad, "abc", b), CheckpointError);
  }
  {
    std::string bad = text;
    bad.replace(bad.find("checkpoint 1"), 12, "checkpoint 2");
    Analyzer b(small_options());
    EXPECT_THROW(decode_checkpoint(bad, "abc", b), CheckpointError);
  }
  {
    Analyzer b(small_options());
    EXPECT_THROW(decode_checkpoint(text.substr(0, text.size() / 2), "abc", b), CheckpointError);
    EXPECT_THROW(decode_checkpoint("", "abc", b), CheckpointError);
  }
  {
    AnalyzerOptions other = small_options();
    other.bins_per_unit = 40;
    Analyzer b(other);
    EXPECT_THROW(decode_checkpoint(text, "abc", b), CheckpointError);
  }
}

TEST(Checkpoint, FingerprintCoversResultSettings) {
  RunConfig a;
  RunConfig b = a;
  b.max_digits = 5;
  b.threads = 8;
  b.out_dir = "elsewhere";
  b.checkpoint_interval = 100;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  for (auto change : std::vector<void (*)(RunConfig&)>{
           [](RunConfig& c) { c.base = 16; c.source = "gen:baseline"; },
           [](RunConfig& c) { c.step = 0.025; },
           [](RunConfig& c) { c.burn_in = 1; },
           [](RunConfig& c) { c.block_size = 1000; },
           [](RunConfig& c) { c.k_list = {1}; },
           [](RunConfig& c) { c.source = "gen:e"; },
           [](RunConfig& c) { c.include_integer_part = true; },
           [](RunConfig& c) { c.tail_thresholds = {0.5}; },
       }) {
    RunConfig c = a;
    change(c);
    EXPECT_NE(c.fingerprint(), a.fingerprint());
  }
}

TEST(Run, StraightEqualsFourCheckpointedLegs) {
  TempDir dir;
  RunConfig straight = small_config(dir / "straight");
  run_analysis(straight);

  RunConfig leg = small_config(dir / "legs");
  leg.checkpoint_path = dir / "state.ckpt";
  for (int i = 1; i <= 4; ++i) {
    leg.max_digits = 250'000ULL * i;
    leg.resume = i > 1;
    const RunResult r = run_analysis(leg);
    EXPECT_EQ(r.resumed_from, 250'000ULL * (i - 1));
    EXPECT_EQ(r.digits, 250'000ULL * i);
  }
  expect_same_reports(dir / "straight", dir / "legs");
}

TEST(Run, PeriodicCheckpointsAndThreadsDoNotChangeResults) {
  TempDir dir;
  RunConfig a = small_config(dir / "a");
  a.max_digits = 300'000;
  run_analysis(a);
  RunConfig b = small_config(dir / "b");
  b.max_digits = 300'000;
  b.threads = 4;
  b.checkpoint_path = dir / "b.ckpt";
  b.checkpoint_interval = 70'000;
  run_analysis(b);
  expect_same_reports(dir / "a", dir / "b");
  Analyzer restored(b.analyzer_options());
  EXPECT_EQ(checkpoint_load(dir / "b.ckpt", b.fingerprint(), restored).position, 300'000u);
}

TEST(Run, DeterministicOutput) {
  TempDir dir;
  RunConfig a = small_config(dir / "a");
  a.max_digits = 200'000;
  a.svg = true;
  RunConfig b = a;
  b.out_dir = dir / "b";
  run_analysis(a);
  run_analysis(b);
  expect_same_reports(dir / "a", dir / "b");
}

TEST(Run, ResumeGuards) {
  TempDir dir;
  RunConfig c = small_config(dir / "out");
  c.max_digits = 20'000;
  c.checkpoint_path = dir / "s.ckpt";
  c.resume = true;
  EXPECT_THROW(run_analysis(c), IoError);  // no checkpoint yet
  c.resume = false;
  run_analysis(c);
  c.resume = true;
  c.max_digits = 10'000;
  EXPECT_THROW(run_analysis(c), UsageError);  // checkpoint beyond --digits
  c.max_digits = 30'000;
  c.step = 0.025;
  EXPECT_THROW(run_analysis(c), CheckpointError);  // different configuration
  c.step = 0.1;
  c.source = "gen:e";
  EXPECT_THROW(run_analysis(c), CheckpointError);
}

TEST(Run, ConfigValidation) {
  RunConfig c;
  c.step = 0.05;
  EXPECT_THROW(c.validate(), UsageError);
  c.allow_any_step = true;
  EXPECT_NO_THROW(c.validate());
  c = RunConfig{};
  c.max_digits = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = RunConfig{};
  c.base = 16;
  EXPECT_THROW(c.validate(), UsageError);  // constant generators are decimal
  c.source = "gen:baseline";
  EXPECT_NO_THROW(c.validate());
  c = RunConfig{};
  c.lil_cutoff = 5;
  EXPECT_THROW(c.validate(), UsageError);
  c = RunConfig{};
  c.k_list = {5};
  EXPECT_THROW(c.validate(), UsageError);
  c.resume = true;
  c.k_list = {1};
  EXPECT_THROW(c.validate(), UsageError);
  EXPECT_THROW(SourceSpec::parse("gen:tau"), UsageError);
  EXPECT_EQ(SourceSpec::parse("gen:sqrt:3").radicand, 3u);
  EXPECT_EQ(SourceSpec::parse("sqrt2").kind, SourceSpec::Kind::sqrt);
  EXPECT_EQ(SourceSpec::parse("digits.txt").kind, SourceSpec::Kind::file);
}

TEST(Run, PiSummaryMatchesIndependentSum) {
  TempDir dir;
  RunConfig c;
  c.source = "gen:pi";
  c.max_digits = 100'000;
  c.out_dir = dir / "out";
  run_analysis(c);
  const auto json = nlohmann::json::parse(read_text(dir / "out" / "summary.json"));
  const auto digits = oracle::pi_machin(100'000, 10);
  std::uint64_t sum = 0;
  for (Digit d : digits) sum += d;
  EXPECT_EQ(json["digits"].get<std::uint64_t>(), 100'000u);
  EXPECT_EQ(json["digit_sum"].get<std::string>(), std::to_string(sum));
  const double d = json["d"].get<double>();
  EXPECT_NEAR(d, oracle::exact_deviation(digits, 10), 1e-12 * std::fabs(d));
  const double delta = json["delta"].get<double>();
  EXPECT_NEAR(delta * std::sqrt(2 * std::log(std::log(1e5))), d, 1e-12 * std::fabs(d));
}

TEST(Run, RepeatingCycleGivesZeroVarianceAndChiSquare) {
  TempDir dir;
  std::string text;
  for (int i = 0; i < 10'000; ++i) text.push_back(static_cast<char>('0' + i % 10));
  testutil::write_text(dir / "cycle.txt", text);
  RunConfig c;
  c.source = (dir / "cycle.txt").string();
  c.max_digits = 10'000;
  c.k_list = {1};
  c.out_dir = dir / "out";
  run_analysis(c);
  const auto json = nlohmann::json::parse(read_text(dir / "out" / "summary.json"));
  EXPECT_EQ(json["frequency_variance"]["observed"].get<double>(), 0.0);
  EXPECT_EQ(json["normality"][0]["chi_square"].get<double>(), 0.0);
  EXPECT_EQ(read_text(dir / "out" / "normality_summary.csv"), "k,windows,chi_square,dof\n1,10000,0,9\n");
}

TEST(Run, ShortFileIsReported) {
  TempDir dir;
  testutil::write_text(dir / "short.txt", "3.1415926535");
  RunConfig c;
  c.source = (dir / "short.txt").string();
  c.max_digits = 1000;
  c.out_dir = dir / "out";
  const RunResult r = run_analysis(c);
  EXPECT_TRUE(r.source_exhausted);
  EXPECT_EQ(r.digits, 10u);
  EXPECT_EQ(read_text(dir / "out" / "frequency.csv"),
            "digit,count,freq\n0,0,0\n1,2,0.2\n2,1,0.1\n3,1,0.1\n4,1,0.1\n5,3,0.3\n6,1,0.1\n"
            "7,0,0\n8,0,0\n9,1,0.1\n");
}

TEST(Run, TooShortForLilWritesHeadersOnly) {
  TempDir dir;
  testutil::write_text(dir / "tiny.txt", "14159");
  RunConfig c;
  c.source = (dir / "tiny.txt").string();
  c.max_digits = 5;
  c.out_dir = dir / "out";
  const RunResult r = run_analysis(c);
  EXPECT_EQ(r.digits, 5u);
  EXPECT_EQ(read_text(dir / "out" / "lil_series.csv"), "n,delta\n");
  EXPECT_EQ(read_text(dir / "out" / "suffix_extrema.csv"), "n,suffix_min,suffix_max\n");
}

TEST(Run, CsvHeaders) {
  TempDir dir;
  RunConfig c = small_config(dir / "out");
  c.max_digits = 5000;
  run_analysis(c);
  const auto first_line = [&](const std::string& name) {
    const std::string text = read_text(dir / "out" / name);
    return text.substr(0, text.find('\n'));
  };
  EXPECT_EQ(first_line("density.csv"), "x_right,count,frac,density,phi_ref");
  EXPECT_EQ(first_line("cumulative.csv"), "x,cum_frac,Phi_ref");
  EXPECT_EQ(first_line("frequency.csv"), "digit,count,freq");
  EXPECT_EQ(first_line("lil_series.csv"), "n,delta");
  EXPECT_EQ(first_line("suffix_extrema.csv"), "n,suffix_min,suffix_max");
  EXPECT_EQ(first_line("lil_blocks.csv"), "n_from,n_to,min_delta,max_delta");
  EXPECT_EQ(first_line("normality_k2.csv"), "pattern,count,freq,expected,z");
  EXPECT_EQ(first_line("normality_summary.csv"), "k,windows,chi_square,dof");
}

TEST(Baseline, MatchesDocumentedAlgorithm) {
  for (int q : {2, 3, 10, 16, 36}) {
    DigitStream s = baseline_digits(42, 5000, q);
    EXPECT_EQ(testutil::drain(s), baseline_reference(42, 5000, q)) << q;
  }
}

TEST(Baseline, SeedReproducible) {
  DigitStream a = baseline_digits(1, 10'000, 10), b = baseline_digits(1, 10'000, 10);
  DigitStream c = baseline_digits(2, 10'000, 10);
  const auto da = testutil::drain(a);
  EXPECT_EQ(da, testutil::drain(b));
  EXPECT_NE(da, testutil::drain(c));
  DigitStream again = a.reopen();
  EXPECT_EQ(testutil::drain(again), da);
  EXPECT_THROW(baseline_digits(1, 1, 1), UsageError);
}

TEST(Baseline, MeanDigitSeedOne) {
  DigitStream s = baseline_digits(1, 1'000'000, 10);
  const auto digits = testutil::drain(s);
  double sum = 0;
  for (Digit d : digits) sum += d;
  EXPECT_NEAR(sum / digits.size(), 4.5, 0.01);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const std::string out = (dir / "out").string();
  EXPECT_EQ(run_cli("bbp --position 1 --count 4"), 0);
  EXPECT_EQ(run_cli("bbp"), 1);
  EXPECT_EQ(run_cli("bbp --position 0"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("analyze --source gen:sqrt2 --digits 1000 --step 0.3 --out " + out), 1);
  EXPECT_EQ(run_cli("analyze --source " + (dir / "missing.txt").string() + " --digits 10 --out " + out), 2);

  testutil::write_text(dir / "bad.txt", "12;45");
  EXPECT_EQ(run_cli("analyze --source " + (dir / "bad.txt").string() + " --digits 10 --out " + out), 2);
  EXPECT_EQ(run_cli("analyze --source " + (dir / "bad.txt").string() + " --lenient --digits 10 --out " + out), 0);
  testutil::write_text(dir / "letters.txt", "12x45");
  EXPECT_EQ(run_cli("analyze --source " + (dir / "letters.txt").string() + " --lenient --digits 10 --out " + out), 2);

  const std::string file = (dir / "s2.txt").string();
  EXPECT_EQ(run_cli("generate --constant sqrt:2 --digits 500 --out " + file), 0);
  EXPECT_EQ(read_text(file).substr(0, 12), "1.4142135623");
  EXPECT_EQ(run_cli("verify --file " + file + " --against gen:sqrt2 --prefix 500"), 0);
  EXPECT_EQ(run_cli("verify --file " + file + " --against gen:e --prefix 500"), 3);
  EXPECT_EQ(run_cli("verify --file " + file + " --against gen:sqrt2 --prefix 600"), 2);
}

TEST(Cli, OutputDirectoryPrecedence) {
  TempDir dir;
  const std::string env_dir = (dir / "from_env").string();
  const std::string flag_dir = (dir / "from_flag").string();
  ASSERT_EQ(setenv("DIGITSTAT_OUT_DIR", env_dir.c_str(), 1), 0);
  EXPECT_EQ(run_cli("analyze --source gen:e --digits 2000"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "from_env" / "summary.txt"));
  EXPECT_EQ(run_cli("analyze --source gen:e --digits 2000 --out " + flag_dir), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "from_flag" / "summary.txt"));
  unsetenv("DIGITSTAT_OUT_DIR");
}
