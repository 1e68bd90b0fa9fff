#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace spotvol {

/// An hourly slot written in local civil time together with its UTC offset.
struct Timestamp {
  std::chrono::sys_days local_day{};
  int hour = 0;  // local hour of day, 0..23
  int offset_minutes = 0;

  std::chrono::sys_seconds utc() const;
  std::chrono::year_month_day date() const { return std::chrono::year_month_day{local_day}; }
  int local_year() const { return static_cast<int>(date().year()); }

  // Local civil order; the two instances of a repeated fall-back hour sort by UTC.
  friend std::strong_ordering operator<=>(const Timestamp& a, const Timestamp& b) {
    if (auto c = a.local_day <=> b.local_day; c != 0) return c;
    if (auto c = a.hour <=> b.hour; c != 0) return c;
    return b.offset_minutes <=> a.offset_minutes;
  }
  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Accepts `YYYY-MM-DDTHH:MM[:SS](Z|+HH:MM|-HH:MM|+HHMM)`; a space may replace `T`.
/// Only whole hours are accepted. On failure `why` receives a short reason.
std::optional<Timestamp> parse_iso8601(std::string_view text, std::string* why = nullptr);
std::string format_iso8601(const Timestamp& ts);

std::optional<std::chrono::sys_days> parse_date(std::string_view text);
std::string format_date(std::chrono::sys_days day);

int days_in_year(int year);

/// Zone rule used to map local hours to UTC offsets.
class Zone {
 public:
  enum class Kind { fixed, central_european };

  static Zone fixed(int offset_minutes) { return Zone{Kind::fixed, offset_minutes}; }
  static Zone utc() { return fixed(0); }
  /// CET/CEST with the EU switching rule (last Sunday of March / October, 01:00 UTC).
  static Zone central_european() { return Zone{Kind::central_european, 60}; }

  Kind kind() const noexcept { return kind_; }
  std::string name() const;

  /// Offset of a local hour. `second_occurrence` selects the later instance of a repeated hour.
  int offset_at(std::chrono::sys_days day, int hour, bool second_occurrence = false) const;
  bool is_nonexistent(std::chrono::sys_days day, int hour) const;
  bool is_repeated(std::chrono::sys_days day, int hour) const;
  /// Whether `offset_minutes` is a valid offset for this local hour.
  bool accepts(std::chrono::sys_days day, int hour, int offset_minutes) const;

  friend bool operator==(const Zone&, const Zone&) = default;

 private:
  Zone(Kind kind, int offset) : kind_(kind), offset_minutes_(offset) {}

  Kind kind_;
  int offset_minutes_;
};

/// "UTC", "Z", "CET", "Europe/Berlin" or a fixed "+HH:MM" offset.
std::optional<Zone> parse_zone(std::string_view text);

std::chrono::sys_days dst_start_day(int year);
std::chrono::sys_days dst_end_day(int year);

}  // namespace spotvol
