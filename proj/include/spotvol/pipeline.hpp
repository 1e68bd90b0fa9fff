#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spotvol/error.hpp"
#include "spotvol/ingest.hpp"
#include "spotvol/residual_stats.hpp"
#include "spotvol/seasonality.hpp"
#include "spotvol/synth.hpp"
#include "spotvol/trend.hpp"

namespace spotvol {

enum class Estimator { trimmed, censored };

struct RunConfig {
  std::vector<std::string> inputs;
  std::optional<std::string> synth_spec;  // path to a synth spec used instead of inputs
  int rank = kDefaultRank;
  double trim = kDefaultTrimQuantile;
  int permutations = kDefaultPermutations;
  std::uint64_t seed = 0;
  DstPolicy dst_policy;
  std::size_t gap_limit = kDefaultGapLimit;
  int jobs = 1;
  std::filesystem::path out_dir = ".";
  std::optional<CsvFormat> format;  // detected from the header when unset
  Zone wide_zone = Zone::central_european();
  Estimator estimator = Estimator::trimmed;

  /// Everything except the output directory, so reports stay comparable across runs.
  nlohmann::ordered_json to_json() const;
};

/// A module error annotated with the pipeline stage that raised it.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, ErrorKind kind, const std::string& message);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

int exit_code_for(ErrorCategory category);

struct YearInput {
  std::string label;  // echoed into the report
  std::variant<std::filesystem::path, PriceSeries> source;
};

struct YearReport {
  int year = 0;
  std::string input;
  IngestManifest manifest;
  std::vector<double> spectrum;
  int rank = kDefaultRank;
  double frobenius_error = 0.0;
  ResidualAnalysis residuals;  // probplot left empty; it lives in the CSV
  Estimator estimator = Estimator::trimmed;
  std::optional<std::string> tail_median_note;
  std::optional<std::string> probplot_note;
  SeasonalityTest seasonality;
  std::map<std::string, std::string> files;  // role -> file name inside the output directory

  double volatility() const {
    return estimator == Estimator::censored ? residuals.mu_hat_censored : residuals.mu_hat;
  }
  nlohmann::ordered_json to_json(const RunConfig& config) const;
};

/// The subset of a year report the multi-year trend needs.
struct YearSummary {
  int year = 0;
  double mu_hat = 0.0;
  std::optional<double> tail_median;
  std::vector<double> spectrum;
};

YearSummary summarize(const YearReport& report);
YearSummary year_summary_from_json(const nlohmann::json& doc);

nlohmann::ordered_json manifest_to_json(const IngestManifest& manifest);

PriceSeries load_series(const std::filesystem::path& path, const RunConfig& config);

/// ingest -> calendarize -> decompose -> truncate -> residuals -> bulk fit ->
/// tail median -> probability plot -> angular momentum -> permutation test.
/// Writes `year_<Y>.json` and the plot CSVs into config.out_dir.
YearReport analyze_year(const RunConfig& config, const YearInput& input);

struct TrendReport {
  VolatilityTrend trend;
  std::vector<YearValue> tail;
  std::vector<TrendRow> rows;
  std::map<std::string, std::string> files;

  nlohmann::ordered_json to_json(const RunConfig& config) const;
};

/// Writes trend.json, trend.csv and the multi-year spectrum.csv.
TrendReport analyze_trend(const RunConfig& config, std::vector<YearSummary> years,
                          const nlohmann::ordered_json& failures = nlohmann::ordered_json::array());

struct YearFailure {
  std::string input;
  std::string stage;
  ErrorKind kind = ErrorKind::Io;
  std::string message;
};

struct BatchResult {
  std::vector<YearReport> reports;  // sorted by year
  std::vector<YearFailure> failures;
  std::optional<TrendReport> trend;
  std::optional<YearFailure> trend_failure;
  int exit_code = 0;
};

/// Runs every input year with at most config.jobs concurrent workers and,
/// when asked, the trend over the successful years. A failing year is
/// recorded and skipped; the exit code reflects it.
BatchResult run_batch(const RunConfig& config, bool with_trend = false);

}  // namespace spotvol
