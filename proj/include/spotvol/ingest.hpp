#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "spotvol/civil_time.hpp"

namespace spotvol {

inline constexpr int kHoursPerDay = 24;

enum class SlotFlag { observed, imputed, missing };
std::string_view to_string(SlotFlag flag);

struct Observation {
  Timestamp time;
  double value = 0.0;  // EUR/MWh; meaningless when flag == missing
  SlotFlag flag = SlotFlag::observed;
};

/// Hourly observations sorted in local civil order. Zero and negative prices are valid.
struct PriceSeries {
  std::vector<Observation> observations;
  std::string market_label;
  int year = 0;
  Zone zone = Zone::utc();
};

enum class CsvFormat { long_form, wide };

struct ParseOptions {
  CsvFormat format = CsvFormat::long_form;
  /// Zone rule for wide files, whose rows carry no offsets. Long files infer it.
  Zone zone = Zone::central_european();
  std::string market_label;
};

/// Long format: header `timestamp,price`. Wide format: header `date,h1,...,h24`
/// with an optional trailing `h3b` column holding the repeated fall-back hour.
/// Empty price cells become `missing` slots.
PriceSeries parse_price_csv(std::istream& source, const ParseOptions& options);
PriceSeries parse_price_csv(std::string_view text, const ParseOptions& options);

/// Looks at the header line only; defaults to long when it cannot tell.
CsvFormat detect_csv_format(std::string_view text);

void write_long_csv(std::ostream& out, const PriceSeries& series);

enum class SpringGapPolicy { interpolate, previous };
enum class FallDuplicatePolicy { mean, first, last };

struct DstPolicy {
  SpringGapPolicy spring = SpringGapPolicy::interpolate;
  FallDuplicatePolicy fall = FallDuplicatePolicy::mean;
};

std::string to_string(const DstPolicy& policy);
/// "interpolate,mean" style; either half may be omitted.
DstPolicy parse_dst_policy(std::string_view text);

/// 24 x D hour-by-day grid; column d holds hours 0..23 of day_labels[d].
struct DayMatrix {
  Eigen::MatrixXd values;
  std::vector<SlotFlag> mask;  // column-major, same layout as values
  std::vector<std::chrono::sys_days> day_labels;
  int year = 0;

  Eigen::Index hours() const { return values.rows(); }
  Eigen::Index days() const { return values.cols(); }
  SlotFlag flag(Eigen::Index hour, Eigen::Index day) const {
    return mask[static_cast<std::size_t>(day * values.rows() + hour)];
  }
  /// Values in hour order (column-major).
  std::vector<double> flatten() const;
  std::size_t count(SlotFlag flag) const;
};

struct FilledGap {
  std::string start;
  std::size_t length = 0;
  bool dst = false;  // contains a nonexistent spring-forward hour
};

struct IngestManifest {
  int year = 0;
  std::size_t days = 0;
  std::size_t cells = 0;
  std::size_t observed_cells = 0;
  std::size_t imputed_cells = 0;
  std::size_t missing_input_slots = 0;  // rows present but flagged missing
  std::size_t absent_cells = 0;         // cells without any source row
  std::size_t dst_gap_cells = 0;
  std::size_t collapsed_duplicate_hours = 0;
  std::vector<FilledGap> filled_gaps;
  DstPolicy policy;
  std::size_t gap_limit = 0;
  std::string zone;
};

struct Calendarized {
  DayMatrix matrix;
  IngestManifest manifest;
};

inline constexpr std::size_t kDefaultGapLimit = 6;

Calendarized calendarize(const PriceSeries& series, const DstPolicy& policy = {},
                         std::size_t gap_limit = kDefaultGapLimit);

}  // namespace spotvol
