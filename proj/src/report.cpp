#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "digitstat/errors.hpp"
#include "digitstat/harness.hpp"
#include "json.hpp"

namespace digitstat {

namespace {

using Json = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& files) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("writing '" + path.string() + "' failed");
  files.push_back(path);
}

std::string fmt(double value) { return format_double(value); }

double ratio(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(part) / static_cast<double>(whole);
}

Json json_number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

struct Curve {
  std::vector<std::pair<double, double>> points;
  std::string color;
  bool steps = false;
};

// Minimal line chart: frame, min/max axis labels, one polyline per curve.
std::string svg_chart(const std::string& title, const std::vector<Curve>& curves) {
  constexpr double kW = 720, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Curve& c : curves) {
    for (const auto& [x, y] : c.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 < x1)) {
    x0 = 0;
    x1 = 1;
  }
  if (!(y0 < y1)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  const auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n"
      << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
      << kH - kT - kB << "\" fill=\"none\" stroke=\"#444\"/>\n";
  svg << "<text x=\"" << kL << "\" y=\"" << kH - kB + 18 << "\">" << fmt(x0) << "</text>\n"
      << "<text x=\"" << kW - kR << "\" y=\"" << kH - kB + 18 << "\" text-anchor=\"end\">"
      << fmt(x1) << "</text>\n"
      << "<text x=\"" << kL - 6 << "\" y=\"" << kH - kB << "\" text-anchor=\"end\">" << fmt(y0)
      << "</text>\n"
      << "<text x=\"" << kL - 6 << "\" y=\"" << kT + 10 << "\" text-anchor=\"end\">" << fmt(y1)
      << "</text>\n";
  if (y0 < 0 && y1 > 0) {
    svg << "<line x1=\"" << kL << "\" x2=\"" << kW - kR << "\" y1=\"" << py(0) << "\" y2=\""
        << py(0) << "\" stroke=\"#bbb\"/>\n";
  }
  for (const Curve& c : curves) {
    svg << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.2\" points=\"";
    double prev_y = 0;
    bool first = true;
    for (const auto& [x, y] : c.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (c.steps && !first) svg << px(x) << ',' << py(prev_y) << ' ';
      svg << px(x) << ',' << py(y) << ' ';
      prev_y = y;
      first = false;
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::filesystem::path> write_reports(const Analyzer& analyzer, const RunConfig& config,
                                                 std::string& summary_text) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create '" + config.out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> files;
  const auto path = [&](const std::string& name) { return config.out_dir / name; };

  const AnalyzerOptions& options = analyzer.options();
  const ScanState& scan = analyzer.scan();
  const MomentSet& moments = analyzer.moments();
  const HistogramAccumulator& hist = analyzer.histogram();

  const std::vector<DensityRow> density = hist.total() ? hist_density(hist) : std::vector<DensityRow>{};
  const std::vector<CumulativeRow> cumulative =
      hist.total() ? hist_cumulative(hist) : std::vector<CumulativeRow>{};
  {
    std::string csv = "x_right,count,frac,density,phi_ref\n";
    for (const DensityRow& r : density) {
      csv += fmt(r.x_right) + ',' + std::to_string(r.count) + ',' + fmt(r.frac) + ',' +
             fmt(r.density) + ',' + fmt(r.phi_ref) + '\n';
    }
    write_file(path("density.csv"), csv, files);
  }
  {
    std::string csv = "x,cum_frac,Phi_ref\n";
    for (const CumulativeRow& r : cumulative) {
      csv += fmt(r.x) + ',' + fmt(r.cum_frac) + ',' + fmt(r.phi_ref) + '\n';
    }
    write_file(path("cumulative.csv"), csv, files);
  }

  const FrequencyTable& freq = analyzer.frequencies();
  {
    std::string csv = "digit,count,freq\n";
    for (int j = 0; j < freq.q(); ++j) {
      const std::uint64_t c = freq.counts()[static_cast<std::size_t>(j)];
      csv += std::string(1, digit_char(static_cast<Digit>(j))) + ',' + std::to_string(c) + ',' +
             fmt(ratio(c, freq.n())) + '\n';
    }
    write_file(path("frequency.csv"), csv, files);
  }

  const std::vector<ExactLilPoint> rows = analyzer.envelope().rows();
  std::vector<LilPoint> lil;
  lil.reserve(rows.size());
  for (const ExactLilPoint& p : rows) lil.push_back(p.lil());
  const SuffixExtrema extrema =
      lil.empty() ? SuffixExtrema{} : suffix_extrema(std::span<const LilPoint>(lil));
  {
    std::string csv = "n,delta\n";
    for (const LilPoint& p : lil) csv += std::to_string(p.n) + ',' + fmt(p.delta) + '\n';
    write_file(path("lil_series.csv"), csv, files);
  }
  {
    std::string csv = "n,suffix_min,suffix_max\n";
    for (std::size_t i = 0; i < extrema.indices.size(); ++i) {
      csv += std::to_string(extrema.indices[i]) + ',' + fmt(extrema.suffix_min[i]) + ',' +
             fmt(extrema.suffix_max[i]) + '\n';
    }
    write_file(path("suffix_extrema.csv"), csv, files);
  }
  const std::vector<BlockSummary> blocks = analyzer.envelope().block_summaries();
  {
    std::string csv = "n_from,n_to,min_delta,max_delta\n";
    for (const BlockSummary& b : blocks) {
      csv += std::to_string(b.n_from) + ',' + std::to_string(b.n_to) + ',' + fmt(b.min_delta) +
             ',' + fmt(b.max_delta) + '\n';
    }
    write_file(path("lil_blocks.csv"), csv, files);
  }

  Json normality = Json::array();
  {
    std::string summary_csv = "k,windows,chi_square,dof\n";
    for (const PatternCounter& counter : analyzer.patterns()) {
      const double expected = 1.0 / static_cast<double>(counter.table_size());
      std::string csv = "pattern,count,freq,expected,z\n";
      for (std::uint64_t code = 0; code < counter.table_size(); ++code) {
        const std::uint64_t c = counter.counts()[code];
        csv += counter.pattern_text(code) + ',' + std::to_string(c) + ',' +
               fmt(ratio(c, counter.n())) + ',' + fmt(expected) + ',' +
               (counter.n() ? fmt(z_score_for_code(counter, code)) : std::string("nan")) + '\n';
      }
      write_file(path("normality_k" + std::to_string(counter.k()) + ".csv"), csv, files);

      Json entry = {{"k", counter.k()}, {"windows", counter.windows()}};
      summary_csv += std::to_string(counter.k()) + ',' + std::to_string(counter.windows()) + ',';
      try {
        const ChiSquare chi = chi_square(counter);
        summary_csv += fmt(chi.statistic) + ',' + std::to_string(chi.dof) + '\n';
        entry["chi_square"] = json_number(chi.statistic);
        entry["dof"] = chi.dof;
      } catch (const UsageError&) {
        summary_csv += ",\n";
        entry["chi_square"] = nullptr;
        entry["dof"] = nullptr;
      }
      normality.push_back(entry);
    }
    write_file(path("normality_summary.csv"), summary_csv, files);
  }

  const double n = static_cast<double>(scan.n);
  const double d = scan.n ? deviation(scan, moments) : std::numeric_limits<double>::quiet_NaN();
  const double delta = scan.n >= kLilMinN ? d / lil_divisor(n) : std::numeric_limits<double>::quiet_NaN();
  const double bound = scan.n ? berry_esseen_bound(options.q, n) : std::numeric_limits<double>::quiet_NaN();
  const double var_obs = scan.n ? freq_variance(freq) : std::numeric_limits<double>::quiet_NaN();
  const double var_exp = scan.n ? expected_freq_variance(n, options.q) : std::numeric_limits<double>::quiet_NaN();

  Json json;
  json["source"] = config.source;
  json["base"] = options.q;
  json["digits"] = scan.n;
  json["digit_sum"] = to_decimal(scan.sum);
  json["mean"] = moments.mu;
  json["sigma"] = moments.sigma;
  json["alpha3"] = moments.alpha3;
  json["berry_esseen_bound"] = json_number(bound);
  json["d"] = json_number(d);
  json["delta"] = json_number(delta);
  json["histogram"] = {{"step", hist.step()},
                       {"burn_in", options.burn_in},
                       {"samples", hist.total()},
                       {"underflow", hist.underflow()},
                       {"overflow", hist.overflow()}};
  json["frequency_variance"] = {{"observed", json_number(var_obs)},
                                {"expected", json_number(var_exp)}};
  Json tails = Json::array();
  for (std::size_t t = 0; t < options.tail_thresholds.size(); ++t) {
    tails.push_back({{"threshold", options.tail_thresholds[t]},
                     {"count", analyzer.tail_counts()[t]},
                     {"fraction", json_number(ratio(analyzer.tail_counts()[t], hist.total()))},
                     {"normal", 1.0 - normal_cdf(options.tail_thresholds[t])}});
  }
  json["tails"] = tails;
  Json bands = Json::array();
  for (std::size_t b = 0; b < options.bands.size(); ++b) {
    const DeviationBand& band = options.bands[b];
    bands.push_back({{"lo", band.lo},
                     {"hi", band.hi},
                     {"count", analyzer.band_counts()[b]},
                     {"fraction", json_number(ratio(analyzer.band_counts()[b], hist.total()))},
                     {"normal", normal_cdf(band.hi) - normal_cdf(band.lo)}});
  }
  json["bands"] = bands;
  Json block_json = Json::array();
  for (const BlockSummary& b : blocks) {
    block_json.push_back({{"n_from", b.n_from},
                          {"n_to", b.n_to},
                          {"min_delta", b.min_delta},
                          {"max_delta", b.max_delta}});
  }
  json["lil_blocks"] = block_json;
  json["normality"] = normality;
  write_file(path("summary.json"), json.dump(2) + "\n", files);

  std::ostringstream text;
  const auto line = [&text](const std::string& label, const std::string& value) {
    text << label << std::string(label.size() < 24 ? 24 - label.size() : 1, ' ') << value << "\n";
  };
  line("source", config.source);
  line("base", std::to_string(options.q));
  line("digits", std::to_string(scan.n));
  line("digit sum", to_decimal(scan.sum));
  line("mean, sigma", fmt(moments.mu) + ", " + fmt(moments.sigma));
  line("d(n)", fmt(d));
  line("delta(n)", fmt(delta));
  line("Berry-Esseen bound", fmt(bound));
  line("histogram", "step " + fmt(hist.step()) + ", " + std::to_string(hist.total()) +
                        " samples after burn-in " + std::to_string(options.burn_in) +
                        ", underflow " + std::to_string(hist.underflow()) + ", overflow " +
                        std::to_string(hist.overflow()));
  line("freq variance", "observed " + fmt(var_obs) + ", expected " + fmt(var_exp));
  for (std::size_t t = 0; t < options.tail_thresholds.size(); ++t) {
    line("P(d > " + fmt(options.tail_thresholds[t]) + ")",
         fmt(ratio(analyzer.tail_counts()[t], hist.total())) + " (normal " +
             fmt(1.0 - normal_cdf(options.tail_thresholds[t])) + ")");
  }
  for (std::size_t b = 0; b < options.bands.size(); ++b) {
    const DeviationBand& band = options.bands[b];
    line("P(" + fmt(band.lo) + " <= d <= " + fmt(band.hi) + ")",
         fmt(ratio(analyzer.band_counts()[b], hist.total())) + " (normal " +
             fmt(normal_cdf(band.hi) - normal_cdf(band.lo)) + ")");
  }
  for (const BlockSummary& b : blocks) {
    line("delta on [" + std::to_string(b.n_from) + ", " + std::to_string(b.n_to) + "]",
         "min " + fmt(b.min_delta) + ", max " + fmt(b.max_delta));
  }
  for (const Json& entry : normality) {
    line("patterns k=" + std::to_string(entry["k"].get<int>()),
         "windows " + entry["windows"].dump() + ", chi-square " + entry["chi_square"].dump() +
             ", dof " + entry["dof"].dump());
  }
  summary_text = text.str();
  write_file(path("summary.txt"), summary_text, files);

  if (config.svg) {
    Curve observed{{}, "#1f5fbf", true}, reference{{}, "#d0402a", false};
    for (const DensityRow& r : density) {
      observed.points.emplace_back(r.x_right, r.density);
      reference.points.emplace_back(r.x_right - hist.step() / 2, r.phi_ref);
    }
    write_file(path("density.svg"), svg_chart("density of d(n) vs normal pdf", {observed, reference}),
               files);

    Curve cum{{}, "#1f5fbf", true}, cdf{{}, "#d0402a", false};
    for (const CumulativeRow& r : cumulative) {
      cum.points.emplace_back(r.x, r.cum_frac);
      cdf.points.emplace_back(r.x, r.phi_ref);
    }
    write_file(path("cumulative.svg"), svg_chart("cumulative of d(n) vs normal cdf", {cum, cdf}),
               files);

    Curve series{{}, "#1f5fbf", false}, lo{{}, "#2a9d4a", false}, hi{{}, "#d0402a", false};
    for (const LilPoint& p : lil) series.points.emplace_back(static_cast<double>(p.n), p.delta);
    for (std::size_t i = 0; i < extrema.indices.size(); ++i) {
      lo.points.emplace_back(static_cast<double>(extrema.indices[i]), extrema.suffix_min[i]);
      hi.points.emplace_back(static_cast<double>(extrema.indices[i]), extrema.suffix_max[i]);
    }
    write_file(path("lil.svg"), svg_chart("delta(n) with suffix extrema", {series, lo, hi}), files);
  }
  return files;
}

}  // namespace digitstat
