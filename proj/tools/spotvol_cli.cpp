// spotvol: volatility of hourly day-ahead prices from low-rank residuals.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <regex>

#include "spotvol/pipeline.hpp"

namespace fs = std::filesystem;
using namespace spotvol;

namespace {

struct CliOptions {
  RunConfig config;
  std::string format = "auto";
  std::string zone = "CET";
  std::string dst_policy = "interpolate,mean";
  std::string estimator = "trimmed";
  std::string out;
};

void add_ingest_options(CLI::App& cmd, CliOptions& o) {
  cmd.add_option("--format", o.format, "Input layout: auto, long or wide")
      ->check(CLI::IsMember({"auto", "long", "wide"}));
  cmd.add_option("--zone", o.zone, "Zone rule for wide files (CET, UTC, +HH:MM)");
  cmd.add_option("--dst-policy", o.dst_policy, "Spring gap and fall duplicate handling, e.g. interpolate,mean");
  cmd.add_option("--gap-limit", o.config.gap_limit, "Longest gap (hours) filled by interpolation");
}

void add_analysis_options(CLI::App& cmd, CliOptions& o) {
  add_ingest_options(cmd, o);
  cmd.add_option("--rank", o.config.rank, "Truncation rank p")->check(CLI::PositiveNumber);
  cmd.add_option("--trim", o.config.trim, "Trim quantile q for the bulk fit");
  cmd.add_option("--permutations", o.config.permutations, "Permutations for the seasonality test");
  cmd.add_option("--seed", o.config.seed, "Seed for the permutation test");
  cmd.add_option("--estimator", o.estimator, "Volatility estimator: trimmed or censored")
      ->check(CLI::IsMember({"trimmed", "censored"}));
  cmd.add_option("--out", o.out, "Output directory");
}

void finalize(CliOptions& o) {
  if (o.format == "long") o.config.format = CsvFormat::long_form;
  else if (o.format == "wide") o.config.format = CsvFormat::wide;
  const auto zone = parse_zone(o.zone);
  if (!zone) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown zone '{}'", o.zone));
  o.config.wide_zone = *zone;
  o.config.dst_policy = parse_dst_policy(o.dst_policy);
  o.config.estimator = o.estimator == "censored" ? Estimator::censored : Estimator::trimmed;
  if (!o.out.empty()) o.config.out_dir = o.out;
}

void print_failures(const std::vector<YearFailure>& failures) {
  for (const auto& f : failures)
    std::cerr << fmt::format("error: {} [{}] {}: {}\n", f.input, f.stage, to_string(f.kind), f.message);
}

void print_year(const YearReport& r) {
  std::cout << fmt::format("{}: mu_hat={:.4f} tail_median={} L_obs={:.4f} p={:.4g} imputed={}\n", r.year,
                           r.volatility(),
                           r.residuals.tail_median ? fmt::format("{:.4f}", *r.residuals.tail_median) : "n/a",
                           r.seasonality.l_observed, r.seasonality.p_value, r.manifest.imputed_cells);
}

void print_trend(const TrendReport& t) {
  std::cout << fmt::format("trend: slope={:.4f} per year, 95% CI [{:.4f}, {:.4f}], stderr={:.4f}, dof={}\n",
                           t.trend.slope, t.trend.ci_low, t.trend.ci_high, t.trend.stderr_slope, t.trend.dof);
}

int cmd_ingest_check(CliOptions& o, const std::string& input) {
  finalize(o);
  const auto series = load_series(input, o.config);
  const auto result = calendarize(series, o.config.dst_policy, o.config.gap_limit);
  const auto doc = manifest_to_json(result.manifest).dump(2);
  if (o.out.empty()) {
    std::cout << doc << '\n';
  } else {
    std::ofstream(o.out, std::ios::binary) << doc << '\n';
  }
  return 0;
}

int cmd_analyze_year(CliOptions& o, const std::string& input, const std::string& synth) {
  finalize(o);
  if (input.empty() == synth.empty()) throw Error(ErrorKind::InvalidArgument, "give exactly one of INPUT or --synth");
  if (!synth.empty()) o.config.synth_spec = synth;
  else o.config.inputs = {input};
  const auto result = run_batch(o.config);
  print_failures(result.failures);
  for (const auto& r : result.reports) print_year(r);
  return result.exit_code;
}

int cmd_analyze_trend(CliOptions& o, const std::vector<std::string>& inputs) {
  finalize(o);
  o.config.inputs = inputs;
  const auto result = run_batch(o.config, true);
  print_failures(result.failures);
  for (const auto& r : result.reports) print_year(r);
  if (result.trend) print_trend(*result.trend);
  if (result.trend_failure) print_failures({*result.trend_failure});
  return result.exit_code;
}

int cmd_synth(const std::string& spec_path, const std::string& out, std::optional<std::uint64_t> seed) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open {}", spec_path));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
  auto spec = synth_spec_from_json(doc);
  if (seed) spec.seed = *seed;
  const auto series = generate(spec);
  if (out.empty()) {
    write_long_csv(std::cout, series);
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, fmt::format("cannot open {} for writing", out));
    write_long_csv(file, series);
  }
  return 0;
}

int cmd_report(CliOptions& o, const std::string& dir) {
  if (o.out.empty()) o.out = dir;
  finalize(o);
  std::vector<fs::path> files;
  const std::regex pattern(R"(year_\d+\.json)");
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<YearSummary> years;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedRow, fmt::format("{}: {}", f.string(), e.what()));
    }
    years.push_back(year_summary_from_json(doc));
    o.config.inputs.push_back(f.filename().string());
  }
  const auto trend = analyze_trend(o.config, years);
  std::cout << "year  mu_hat   fitted   tail_median\n";
  for (const auto& r : trend.rows)
    std::cout << fmt::format("{}  {:7.4f}  {:7.4f}  {}\n", r.year, r.mu_hat, r.fitted,
                             r.tail_median ? fmt::format("{:.4f}", *r.tail_median) : "n/a");
  print_trend(trend);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volatility of hourly day-ahead prices from low-rank residuals"};
  app.require_subcommand(1);

  CliOptions opts;
  std::string input, synth, dir, spec_path, synth_out;
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> synth_seed;

  auto* ingest = app.add_subcommand("ingest-check", "Parse and calendarize one file; print the ingest manifest");
  ingest->add_option("input", input, "Price CSV")->required();
  add_ingest_options(*ingest, opts);
  ingest->add_option("--out", opts.out, "Write the manifest here instead of stdout");

  auto* year = app.add_subcommand("analyze-year", "Analyze one year and write its report and plot data");
  year->add_option("input", input, "Price CSV");
  year->add_option("--synth", synth, "Analyze a synthetic year from this spec instead");
  add_analysis_options(*year, opts);

  auto* trend = app.add_subcommand("analyze-trend", "Analyze several years and fit the volatility trend");
  trend->add_option("inputs", inputs, "One price CSV per year")->required();
  trend->add_option("--jobs", opts.config.jobs, "Years analyzed concurrently")->check(CLI::PositiveNumber);
  add_analysis_options(*trend, opts);

  auto* gen = app.add_subcommand("synth", "Generate a synthetic hourly series in long CSV format");
  gen->add_option("--spec", spec_path, "Synth spec JSON")->required();
  gen->add_option("--out", synth_out, "Output CSV (stdout if omitted)");
  gen->add_option("--seed", synth_seed, "Override the seed in the spec");

  auto* report = app.add_subcommand("report", "Rebuild the trend outputs from year_<Y>.json files");
  report->add_option("dir", dir, "Directory holding year reports")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", opts.out, "Output directory (defaults to DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest_check(opts, input);
    if (*year) return cmd_analyze_year(opts, input, synth);
    if (*trend) return cmd_analyze_trend(opts, inputs);
    if (*gen) return cmd_synth(spec_path, synth_out, synth_seed);
    if (*report) return cmd_report(opts, dir);
  } catch (const Error& e) {
    std::cerr << fmt::format("error: {}: {}\n", to_string(e.kind()), e.what());
    if (const auto* rows = dynamic_cast<const MalformedRowError*>(&e))
      for (const auto& issue : rows->issues()) std::cerr << fmt::format("  line {}: {}\n", issue.line, issue.reason);
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
