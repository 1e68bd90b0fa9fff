#include "spotvol/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include "spotvol/error.hpp"

namespace spotvol {

using namespace std::chrono;

std::string_view to_string(SlotFlag flag) {
  switch (flag) {
    case SlotFlag::observed: return "observed";
    case SlotFlag::imputed: return "imputed";
    case SlotFlag::missing: return "missing";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Line> lines;
  std::size_t number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(start, nl - start);
    if (!trim(line).empty()) lines.push_back({number, line});
    ++number;
    start = nl + 1;
  }
  return lines;
}

// Empty cell -> nullopt value with ok = true.
struct PriceCell {
  bool ok = true;
  std::optional<double> value;
  std::string reason;
};

PriceCell parse_price(std::string_view s) {
  if (s.empty()) return {};
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    return {false, std::nullopt, fmt::format("invalid price '{}'", s)};
  if (!std::isfinite(v)) return {false, std::nullopt, fmt::format("non-finite price '{}'", s)};
  return {true, v, {}};
}

PriceSeries parse_long(const std::vector<Line>& lines, std::vector<RowIssue>& issues) {
  PriceSeries series;
  const auto header = split_fields(lines.front().text);
  if (header.size() != 2 || lower(header[0]) != "timestamp" || lower(header[1]) != "price") {
    issues.push_back({lines.front().number, "expected header 'timestamp,price'"});
    return series;
  }
  std::vector<std::size_t> line_of;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != 2) {
      issues.push_back({lines[i].number, fmt::format("expected 2 fields, found {}", fields.size())});
      continue;
    }
    std::string why;
    const auto ts = parse_iso8601(fields[0], &why);
    if (!ts) {
      issues.push_back({lines[i].number, why});
      continue;
    }
    const auto price = parse_price(fields[1]);
    if (!price.ok) {
      issues.push_back({lines[i].number, price.reason});
      continue;
    }
    series.observations.push_back(
        {*ts, price.value.value_or(0.0), price.value ? SlotFlag::observed : SlotFlag::missing});
    line_of.push_back(lines[i].number);
  }
  if (series.observations.empty()) return series;

  std::set<int> offsets;
  for (const auto& o : series.observations) offsets.insert(o.time.offset_minutes);
  if (offsets.size() == 1) {
    series.zone = Zone::fixed(*offsets.begin());
  } else if (offsets == std::set<int>{60, 120}) {
    series.zone = Zone::central_european();
    for (std::size_t i = 0; i < series.observations.size(); ++i) {
      const auto& t = series.observations[i].time;
      if (!series.zone.accepts(t.local_day, t.hour, t.offset_minutes))
        issues.push_back({line_of[i], "UTC offset inconsistent with the CET/CEST switching rule"});
    }
  } else {
    const int first = series.observations.front().time.offset_minutes;
    for (std::size_t i = 0; i < series.observations.size(); ++i) {
      if (series.observations[i].time.offset_minutes != first) {
        issues.push_back({line_of[i], "mixed UTC offsets that match no known zone rule"});
        break;
      }
    }
  }
  return series;
}

PriceSeries parse_wide(const std::vector<Line>& lines, const Zone& zone, std::vector<RowIssue>& issues) {
  PriceSeries series;
  series.zone = zone;
  const auto header = split_fields(lines.front().text);
  bool header_ok = header.size() == 25 || header.size() == 26;
  if (header_ok) header_ok = lower(header[0]) == "date";
  for (int k = 1; header_ok && k <= kHoursPerDay; ++k) header_ok = lower(header[k]) == fmt::format("h{}", k);
  if (header_ok && header.size() == 26) header_ok = lower(header[25]) == "h3b";
  if (!header_ok) {
    issues.push_back({lines.front().number, "expected header 'date,h1,...,h24' (optionally ',h3b')"});
    return series;
  }
  const bool has_h3b = header.size() == 26;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text);
    if (fields.size() != header.size()) {
      issues.push_back({lines[i].number, fmt::format("expected {} fields, found {}", header.size(), fields.size())});
      continue;
    }
    const auto day = parse_date(fields[0]);
    if (!day) {
      issues.push_back({lines[i].number, fmt::format("invalid date '{}'", fields[0])});
      continue;
    }
    std::vector<Observation> row;
    bool row_ok = true;
    for (int hour = 0; hour < kHoursPerDay && row_ok; ++hour) {
      const auto price = parse_price(fields[static_cast<std::size_t>(hour) + 1]);
      if (!price.ok) {
        issues.push_back({lines[i].number, fmt::format("h{}: {}", hour + 1, price.reason)});
        row_ok = false;
        break;
      }
      const Timestamp ts{*day, hour, zone.offset_at(*day, hour)};
      if (zone.is_nonexistent(*day, hour) || !price.value) {
        row.push_back({ts, 0.0, SlotFlag::missing});
      } else {
        row.push_back({ts, *price.value, SlotFlag::observed});
      }
    }
    if (row_ok && has_h3b) {
      const auto price = parse_price(fields[25]);
      if (!price.ok) {
        issues.push_back({lines[i].number, fmt::format("h3b: {}", price.reason)});
        row_ok = false;
      } else if (price.value) {
        if (!zone.is_repeated(*day, 2)) {
          issues.push_back({lines[i].number, "h3b value on a day without a repeated hour"});
          row_ok = false;
        } else {
          row.push_back({Timestamp{*day, 2, zone.offset_at(*day, 2, true)}, *price.value, SlotFlag::observed});
        }
      }
    }
    if (row_ok) series.observations.insert(series.observations.end(), row.begin(), row.end());
  }
  return series;
}

}  // namespace

CsvFormat detect_csv_format(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) return CsvFormat::long_form;
  const auto header = split_fields(lines.front().text);
  if (!header.empty() && lower(header[0]) == "date") return CsvFormat::wide;
  return CsvFormat::long_form;
}

PriceSeries parse_price_csv(std::string_view text, const ParseOptions& options) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyInput, "input contains no header and no rows");

  std::vector<RowIssue> issues;
  PriceSeries series = options.format == CsvFormat::long_form ? parse_long(lines, issues)
                                                              : parse_wide(lines, options.zone, issues);
  if (!issues.empty()) throw MalformedRowError(std::move(issues));
  if (series.observations.empty()) throw Error(ErrorKind::EmptyInput, "input contains no data rows");

  std::stable_sort(series.observations.begin(), series.observations.end(),
                   [](const Observation& a, const Observation& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < series.observations.size(); ++i) {
    if (series.observations[i].time == series.observations[i - 1].time)
      throw Error(ErrorKind::DuplicateTimestamp,
                  fmt::format("duplicate timestamp {}", format_iso8601(series.observations[i].time)));
  }
  std::vector<std::pair<sys_seconds, std::size_t>> instants;
  for (std::size_t i = 0; i < series.observations.size(); ++i)
    if (series.observations[i].flag != SlotFlag::missing) instants.emplace_back(series.observations[i].time.utc(), i);
  std::sort(instants.begin(), instants.end());
  for (std::size_t i = 1; i < instants.size(); ++i) {
    if (instants[i].first == instants[i - 1].first)
      throw Error(ErrorKind::DuplicateTimestamp,
                  fmt::format("timestamps {} and {} denote the same instant",
                              format_iso8601(series.observations[instants[i - 1].second].time),
                              format_iso8601(series.observations[instants[i].second].time)));
  }

  series.market_label = options.market_label;
  series.year = series.observations.front().time.local_year();
  return series;
}

PriceSeries parse_price_csv(std::istream& source, const ParseOptions& options) {
  const std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return parse_price_csv(std::string_view{text}, options);
}

void write_long_csv(std::ostream& out, const PriceSeries& series) {
  out << "timestamp,price\n";
  for (const auto& o : series.observations) {
    out << format_iso8601(o.time) << ',';
    if (o.flag != SlotFlag::missing) out << fmt::format("{}", o.value);
    out << '\n';
  }
}

std::string to_string(const DstPolicy& policy) {
  const char* spring = policy.spring == SpringGapPolicy::interpolate ? "interpolate" : "previous";
  const char* fall = policy.fall == FallDuplicatePolicy::mean    ? "mean"
                     : policy.fall == FallDuplicatePolicy::first ? "first"
                                                                 : "last";
  return fmt::format("{},{}", spring, fall);
}

DstPolicy parse_dst_policy(std::string_view text) {
  DstPolicy policy;
  for (const auto part : split_fields(text)) {
    if (part.empty()) continue;
    if (part == "interpolate") policy.spring = SpringGapPolicy::interpolate;
    else if (part == "previous") policy.spring = SpringGapPolicy::previous;
    else if (part == "mean") policy.fall = FallDuplicatePolicy::mean;
    else if (part == "first") policy.fall = FallDuplicatePolicy::first;
    else if (part == "last") policy.fall = FallDuplicatePolicy::last;
    else throw Error(ErrorKind::InvalidArgument, fmt::format("unknown DST policy token '{}'", part));
  }
  return policy;
}

std::vector<double> DayMatrix::flatten() const {
  return {values.data(), values.data() + values.size()};
}

std::size_t DayMatrix::count(SlotFlag f) const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), f));
}

Calendarized calendarize(const PriceSeries& series, const DstPolicy& policy, std::size_t gap_limit) {
  const int y = series.year;
  const int n_days = days_in_year(y);
  const sys_days first_day{year{y} / January / 1};
  const std::size_t n_cells = static_cast<std::size_t>(n_days) * kHoursPerDay;

  IngestManifest manifest;
  manifest.year = y;
  manifest.days = static_cast<std::size_t>(n_days);
  manifest.cells = n_cells;
  manifest.policy = policy;
  manifest.gap_limit = gap_limit;
  manifest.zone = series.zone.name();

  struct Cell {
    double sum = 0.0, first = 0.0, last = 0.0;
    int count = 0;
    bool missing_row = false;
  };
  std::vector<Cell> cells(n_cells);
  for (const auto& o : series.observations) {
    if (o.time.local_year() != y)
      throw Error(ErrorKind::WrongYearSpan,
                  fmt::format("observation {} lies outside calendar year {}", format_iso8601(o.time), y));
    const auto day = (o.time.local_day - first_day).count();
    auto& cell = cells[static_cast<std::size_t>(day) * kHoursPerDay + static_cast<std::size_t>(o.time.hour)];
    if (o.flag == SlotFlag::missing) {
      cell.missing_row = true;
      ++manifest.missing_input_slots;
      continue;
    }
    if (cell.count == 0) cell.first = o.value;
    cell.last = o.value;
    cell.sum += o.value;
    ++cell.count;
  }

  DayMatrix m;
  m.year = y;
  m.values = Eigen::MatrixXd::Zero(kHoursPerDay, n_days);
  m.mask.assign(n_cells, SlotFlag::missing);
  m.day_labels.reserve(static_cast<std::size_t>(n_days));
  for (int d = 0; d < n_days; ++d) m.day_labels.push_back(first_day + days{d});

  double* v = m.values.data();
  std::vector<bool> dst(n_cells, false);
  for (std::size_t i = 0; i < n_cells; ++i) {
    const auto& c = cells[i];
    if (c.count > 0) {
      switch (policy.fall) {
        case FallDuplicatePolicy::mean: v[i] = c.sum / c.count; break;
        case FallDuplicatePolicy::first: v[i] = c.first; break;
        case FallDuplicatePolicy::last: v[i] = c.last; break;
      }
      if (c.count == 1) v[i] = c.first;
      manifest.collapsed_duplicate_hours += static_cast<std::size_t>(c.count - 1);
      m.mask[i] = SlotFlag::observed;
      ++manifest.observed_cells;
      continue;
    }
    const auto day = m.day_labels[i / kHoursPerDay];
    const int hour = static_cast<int>(i % kHoursPerDay);
    if (series.zone.is_nonexistent(day, hour)) {
      dst[i] = true;
      ++manifest.dst_gap_cells;
    } else if (!c.missing_row) {
      ++manifest.absent_cells;
    }
  }
  if (manifest.observed_cells == 0) throw Error(ErrorKind::EmptyInput, "series has no observed values");

  auto label = [&](std::size_t i) {
    const auto day = m.day_labels[i / kHoursPerDay];
    const int hour = static_cast<int>(i % kHoursPerDay);
    return format_iso8601(Timestamp{day, hour, series.zone.offset_at(day, hour)});
  };

  std::size_t i = 0;
  while (i < n_cells) {
    if (m.mask[i] == SlotFlag::observed) {
      ++i;
      continue;
    }
    std::size_t end = i;
    std::size_t ordinary = 0;
    bool has_dst = false;
    while (end < n_cells && m.mask[end] != SlotFlag::observed) {
      if (dst[end]) has_dst = true;
      else ++ordinary;
      ++end;
    }
    if (ordinary > gap_limit) throw GapTooLongError(label(i), end - i, gap_limit);

    const bool has_left = i > 0;
    const bool has_right = end < n_cells;
    const bool carry_previous = policy.spring == SpringGapPolicy::previous && ordinary == 0;
    for (std::size_t k = i; k < end; ++k) {
      if (has_left && has_right && !carry_previous) {
        const double t = static_cast<double>(k - i + 1) / static_cast<double>(end - i + 1);
        v[k] = v[i - 1] + (v[end] - v[i - 1]) * t;
      } else {
        v[k] = has_left ? v[i - 1] : v[end];
      }
      m.mask[k] = SlotFlag::imputed;
    }
    manifest.imputed_cells += end - i;
    manifest.filled_gaps.push_back({label(i), end - i, has_dst});
    i = end;
  }

  return {std::move(m), std::move(manifest)};
}

}  // namespace spotvol
