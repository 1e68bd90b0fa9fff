#include "spotvol/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "spotvol/lowrank.hpp"

namespace spotvol {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

PipelineError::PipelineError(std::string stage, ErrorKind kind, const std::string& message)
    : Error(kind, fmt::format("[{}] {}", stage, message)), stage_(std::move(stage)) {}

int exit_code_for(ErrorCategory category) { return category == ErrorCategory::input ? 2 : 3; }

namespace {

template <class F>
auto run_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e.kind(), e.what());
  } catch (const std::bad_alloc&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, ErrorKind::Io, e.what());
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot open {} for writing", path.string()));
  body(out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing {}", path.string()));
}

const char* estimator_name(Estimator e) { return e == Estimator::censored ? "censored" : "trimmed"; }

const char* format_name(CsvFormat f) { return f == CsvFormat::wide ? "wide" : "long"; }

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["inputs"] = inputs;
  j["synth_spec"] = synth_spec ? ordered_json(*synth_spec) : ordered_json(nullptr);
  j["rank"] = rank;
  j["trim"] = trim;
  j["permutations"] = permutations;
  j["seed"] = seed;
  j["dst_policy"] = to_string(dst_policy);
  j["gap_limit"] = gap_limit;
  j["format"] = format ? ordered_json(format_name(*format)) : ordered_json("auto");
  j["wide_zone"] = wide_zone.name();
  j["estimator"] = estimator_name(estimator);
  return j;
}

ordered_json manifest_to_json(const IngestManifest& m) {
  ordered_json gaps = ordered_json::array();
  for (const auto& g : m.filled_gaps) gaps.push_back({{"start", g.start}, {"length", g.length}, {"dst", g.dst}});
  ordered_json j;
  j["year"] = m.year;
  j["days"] = m.days;
  j["cells"] = m.cells;
  j["observed_cells"] = m.observed_cells;
  j["imputed_cells"] = m.imputed_cells;
  j["missing_input_slots"] = m.missing_input_slots;
  j["absent_cells"] = m.absent_cells;
  j["dst_gap_cells"] = m.dst_gap_cells;
  j["collapsed_duplicate_hours"] = m.collapsed_duplicate_hours;
  j["filled_gaps"] = gaps;
  j["dst_policy"] = to_string(m.policy);
  j["gap_limit"] = m.gap_limit;
  j["zone"] = m.zone;
  return j;
}

ordered_json YearReport::to_json(const RunConfig& config) const {
  ordered_json j;
  j["year"] = year;
  j["input"] = input;
  j["config"] = config.to_json();
  j["ingest"] = manifest_to_json(manifest);

  std::vector<double> normalized;
  for (double s : spectrum) normalized.push_back(spectrum.empty() || spectrum.front() == 0.0 ? 0.0 : s / spectrum.front());
  j["decomposition"] = {{"rank", rank},
                        {"frobenius_error", frobenius_error},
                        {"spectrum", spectrum},
                        {"spectrum_normalized", normalized}};

  ordered_json r;
  r["n_observed"] = residuals.n;
  r["n_imputed"] = manifest.imputed_cells;
  r["trim_quantile"] = residuals.trim_quantile;
  r["cutoff"] = residuals.cutoff;
  r["mu_hat"] = residuals.mu_hat;
  r["mu_hat_untrimmed"] = residuals.mu_hat_untrimmed;
  r["mu_hat_censored"] = residuals.mu_hat_censored;
  r["estimator"] = estimator_name(estimator);
  r["volatility"] = volatility();
  r["tail_median"] = optional_number(residuals.tail_median);
  if (tail_median_note) r["tail_median_note"] = *tail_median_note;
  if (probplot_note) r["probplot_note"] = *probplot_note;
  j["residuals"] = r;

  ordered_json s;
  s["l_observed"] = seasonality.l_observed;
  s["p_value"] = seasonality.p_value;
  s["n_permutations"] = seasonality.n_permutations;
  s["seed"] = seasonality.seed;
  s["imputed_cells"] = seasonality.imputed_cells;
  s["permutation_min"] = seasonality.summary.min;
  s["permutation_max"] = seasonality.summary.max;
  s["permutation_mean"] = seasonality.summary.mean;
  j["seasonality"] = s;

  ordered_json f;
  for (const auto& [role, name] : files) f[role] = name;
  j["files"] = f;
  return j;
}

YearSummary summarize(const YearReport& report) {
  return {report.year, report.volatility(), report.residuals.tail_median, report.spectrum};
}

YearSummary year_summary_from_json(const json& doc) {
  try {
    YearSummary s;
    s.year = doc.at("year").get<int>();
    const auto& r = doc.at("residuals");
    s.mu_hat = r.at("volatility").get<double>();
    if (!r.at("tail_median").is_null()) s.tail_median = r.at("tail_median").get<double>();
    s.spectrum = doc.at("decomposition").at("spectrum").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedRow, fmt::format("year report: {}", e.what()));
  }
}

PriceSeries load_series(const fs::path& path, const RunConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  ParseOptions options;
  options.format = config.format.value_or(detect_csv_format(text));
  options.zone = config.wide_zone;
  options.market_label = path.filename().string();
  return parse_price_csv(std::string_view{text}, options);
}

YearReport analyze_year(const RunConfig& config, const YearInput& input) {
  YearReport report;
  report.input = input.label;
  report.rank = config.rank;
  report.estimator = config.estimator;

  const PriceSeries series = run_stage("ingest", [&] {
    if (const auto* path = std::get_if<fs::path>(&input.source)) return load_series(*path, config);
    return std::get<PriceSeries>(input.source);
  });
  auto calendarized = run_stage("calendarize", [&] { return calendarize(series, config.dst_policy, config.gap_limit); });
  const DayMatrix& matrix = calendarized.matrix;
  report.year = matrix.year;
  report.manifest = std::move(calendarized.manifest);

  const auto decomposition = run_stage("decompose", [&] { return decompose(matrix); });
  report.spectrum.assign(decomposition.singular_values.data(),
                         decomposition.singular_values.data() + decomposition.singular_values.size());
  const auto model = run_stage("truncate", [&] { return truncate(decomposition, config.rank); });
  report.frobenius_error = model.frobenius_error;
  const auto residuals = run_stage("residual_series", [&] { return residual_series(matrix, model); });

  report.residuals = run_stage("fit_bulk_exponential", [&] { return fit_bulk_exponential(residuals, config.trim); });
  try {
    report.residuals.tail_median = tail_median(residuals, config.trim);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooFewTailPoints) throw PipelineError("tail_median", e.kind(), e.what());
    report.tail_median_note = e.what();
  }
  std::vector<ProbPoint> probplot;
  if (report.volatility() > 0.0) {
    probplot = run_stage("probplot_points", [&] { return probplot_points(residuals, report.volatility()); });
  } else {
    report.probplot_note = "volatility estimate is zero; probability plot omitted";
  }
  report.seasonality = run_stage("permutation_test", [&] {
    return permutation_test(residuals, config.permutations, config.seed);
  });

  const std::string y = std::to_string(report.year);
  report.files = {{"report", "year_" + y + ".json"},       {"spectrum", "spectrum_" + y + ".csv"},
                  {"profiles", "u_" + y + ".csv"},         {"amplitudes", "v_" + y + ".csv"},
                  {"residuals", "residuals_" + y + ".csv"}, {"probplot", "probplot_" + y + ".csv"},
                  {"permutation_histogram", "permutation_hist_" + y + ".csv"}};

  run_stage("write", [&] {
    const fs::path& dir = config.out_dir;
    fs::create_directories(dir);
    const int columns = std::max(config.rank, 2);
    write_file(dir / report.files.at("spectrum"), [&](std::ostream& o) {
      write_spectrum_csv(o, spectrum_report({{report.year, decomposition}}));
    });
    write_file(dir / report.files.at("profiles"), [&](std::ostream& o) { write_profiles_csv(o, decomposition, columns); });
    write_file(dir / report.files.at("amplitudes"), [&](std::ostream& o) { write_amplitudes_csv(o, decomposition, columns); });
    write_file(dir / report.files.at("residuals"), [&](std::ostream& o) {
      o << "index,date,hour,value,approximation,residual,abs_residual,flag\n";
      const auto hours = static_cast<std::size_t>(matrix.hours());
      for (std::size_t i = 0; i < residuals.size(); ++i) {
        const auto day = i / hours;
        const auto hour = i % hours;
        o << fmt::format("{},{},{},{},{},{},{},{}\n", i + 1, format_date(matrix.day_labels[day]), hour,
                         matrix.values.data()[i], model.approximation.data()[i], residuals.residuals[i],
                         std::abs(residuals.residuals[i]), to_string(residuals.mask[i]));
      }
    });
    write_file(dir / report.files.at("probplot"), [&](std::ostream& o) { write_probplot_csv(o, probplot); });
    write_file(dir / report.files.at("permutation_histogram"),
               [&](std::ostream& o) { write_histogram_csv(o, report.seasonality.summary); });
    write_file(dir / report.files.at("report"), [&](std::ostream& o) { o << report.to_json(config).dump(2) << '\n'; });
    return 0;
  });
  return report;
}

ordered_json TrendReport::to_json(const RunConfig& config) const {
  ordered_json years = ordered_json::array();
  for (const auto& r : rows)
    years.push_back({{"year", r.year}, {"mu_hat", r.mu_hat}, {"fitted", r.fitted}, {"tail_median", optional_number(r.tail_median)}});
  ordered_json tail_series = ordered_json::array();
  for (const auto& p : tail) tail_series.push_back({{"year", p.year}, {"tail_median", p.value}});
  ordered_json j;
  j["config"] = config.to_json();
  j["years"] = years;
  j["regression"] = {{"slope", trend.slope},
                     {"intercept", trend.intercept},
                     {"ci95", {trend.ci_low, trend.ci_high}},
                     {"stderr", trend.stderr_slope},
                     {"residual_std_error", trend.residual_std_error},
                     {"t_critical", trend.t_critical},
                     {"dof", trend.dof}};
  j["tail_trend"] = tail_series;
  ordered_json f;
  for (const auto& [role, name] : files) f[role] = name;
  j["files"] = f;
  return j;
}

TrendReport analyze_trend(const RunConfig& config, std::vector<YearSummary> years, const ordered_json& failures) {
  std::sort(years.begin(), years.end(), [](const YearSummary& a, const YearSummary& b) { return a.year < b.year; });
  TrendReport report;
  std::vector<YearValue> points;
  std::vector<YearValue> tails;
  for (const auto& y : years) {
    points.push_back({y.year, y.mu_hat});
    if (y.tail_median) tails.push_back({y.year, *y.tail_median});
  }
  report.trend = run_stage("fit_trend", [&] { return fit_trend(points); });
  report.tail = tail_trend(tails);
  for (const auto& y : years) report.rows.push_back({y.year, y.mu_hat, report.trend.fitted(y.year), y.tail_median});
  report.files = {{"report", "trend.json"}, {"trend", "trend.csv"}, {"spectrum", "spectrum.csv"}};

  run_stage("write", [&] {
    const fs::path& dir = config.out_dir;
    fs::create_directories(dir);
    write_file(dir / "trend.csv", [&](std::ostream& o) { write_trend_csv(o, report.rows); });
    write_file(dir / "spectrum.csv", [&](std::ostream& o) {
      SpectrumTable table;
      for (const auto& y : years) {
        const double lead = y.spectrum.empty() ? 0.0 : y.spectrum.front();
        for (std::size_t k = 0; k < y.spectrum.size(); ++k)
          table.rows.push_back({y.year, static_cast<int>(k + 1), y.spectrum[k], lead > 0.0 ? y.spectrum[k] / lead : 0.0});
      }
      write_spectrum_csv(o, table);
    });
    auto doc = report.to_json(config);
    doc["failures"] = failures;
    write_file(dir / "trend.json", [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    return 0;
  });
  return report;
}

namespace {

YearFailure failure_from(const std::string& input, const std::exception& e) {
  YearFailure f;
  f.input = input;
  f.message = e.what();
  if (const auto* pe = dynamic_cast<const PipelineError*>(&e)) {
    f.stage = pe->stage();
    f.kind = pe->kind();
  } else if (const auto* err = dynamic_cast<const Error*>(&e)) {
    f.stage = "unknown";
    f.kind = err->kind();
  } else {
    f.stage = "unknown";
    f.kind = ErrorKind::Io;
  }
  return f;
}

ordered_json failures_to_json(const std::vector<YearFailure>& failures) {
  ordered_json out = ordered_json::array();
  for (const auto& f : failures)
    out.push_back({{"input", f.input}, {"stage", f.stage}, {"error", to_string(f.kind)}, {"message", f.message}});
  return out;
}

}  // namespace

BatchResult run_batch(const RunConfig& config, bool with_trend) {
  std::vector<YearInput> inputs;
  if (config.synth_spec) {
    std::ifstream in(*config.synth_spec, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open {}", *config.synth_spec));
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidSpec, fmt::format("synth spec: {}", e.what()));
    }
    inputs.push_back({"synth:" + fs::path(*config.synth_spec).filename().string(), generate(synth_spec_from_json(doc))});
  }
  for (const auto& path : config.inputs) inputs.push_back({path, fs::path(path)});

  std::vector<std::optional<YearReport>> slots(inputs.size());
  std::vector<std::optional<YearFailure>> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        slots[i] = analyze_year(config, inputs[i]);
      } catch (const std::exception& e) {
        errors[i] = failure_from(inputs[i].label, e);
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::clamp(config.jobs, 1, std::max(1, static_cast<int>(inputs.size()))));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }

  BatchResult result;
  std::set<int> seen;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (errors[i]) {
      result.failures.push_back(*errors[i]);
    } else if (!seen.insert(slots[i]->year).second) {
      result.failures.push_back({inputs[i].label, "assemble", ErrorKind::InvalidArgument,
                                 fmt::format("year {} supplied more than once", slots[i]->year)});
    } else {
      result.reports.push_back(std::move(*slots[i]));
    }
  }
  std::sort(result.reports.begin(), result.reports.end(),
            [](const YearReport& a, const YearReport& b) { return a.year < b.year; });

  if (with_trend) {
    std::vector<YearSummary> summaries;
    for (const auto& r : result.reports) summaries.push_back(summarize(r));
    try {
      result.trend = analyze_trend(config, std::move(summaries), failures_to_json(result.failures));
    } catch (const std::exception& e) {
      result.trend_failure = failure_from("trend", e);
    }
  }

  for (const auto& f : result.failures)
    if (result.exit_code == 0) result.exit_code = exit_code_for(category_of(f.kind));
  if (result.exit_code == 0 && result.trend_failure)
    result.exit_code = exit_code_for(category_of(result.trend_failure->kind));
  return result;
}

}  // namespace spotvol
