#include "spotvol/civil_time.hpp"

#include <charconv>
#include <fmt/format.h>

namespace spotvol {

using namespace std::chrono;

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<int> parse_offset(std::string_view s) {
  if (s == "Z" || s == "z") return 0;
  if (s.size() < 5 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  const int sign = s[0] == '-' ? -1 : 1;
  std::string_view body = s.substr(1);
  int hh = 0, mm = 0;
  if (body.size() == 5 && body[2] == ':') {
    if (!parse_int(body.substr(0, 2), hh) || !parse_int(body.substr(3, 2), mm)) return std::nullopt;
  } else if (body.size() == 4) {
    if (!parse_int(body.substr(0, 2), hh) || !parse_int(body.substr(2, 2), mm)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (hh > 14 || mm > 59) return std::nullopt;
  return sign * (hh * 60 + mm);
}

std::string format_offset(int minutes) {
  const char sign = minutes < 0 ? '-' : '+';
  const int a = minutes < 0 ? -minutes : minutes;
  return fmt::format("{}{:02}:{:02}", sign, a / 60, a % 60);
}

}  // namespace

sys_seconds Timestamp::utc() const {
  return sys_seconds{local_day} + hours{hour} - minutes{offset_minutes};
}

std::optional<sys_days> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(sys_days d) {
  const year_month_day ymd{d};
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::optional<Timestamp> parse_iso8601(std::string_view text, std::string* why) {
  auto fail = [&](const char* reason) -> std::optional<Timestamp> {
    if (why) *why = reason;
    return std::nullopt;
  };
  if (text.size() < 16) return fail("timestamp too short");
  const auto day = parse_date(text.substr(0, 10));
  if (!day) return fail("invalid date");
  if (text[10] != 'T' && text[10] != ' ') return fail("expected 'T' between date and time");
  int hh = 0, mm = 0, ss = 0;
  if (text[13] != ':' || !parse_int(text.substr(11, 2), hh) || !parse_int(text.substr(14, 2), mm))
    return fail("invalid time of day");
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (text.size() < pos + 3 || !parse_int(text.substr(pos + 1, 2), ss)) return fail("invalid seconds");
    pos += 3;
  }
  if (hh > 23 || mm > 59 || ss > 59) return fail("time of day out of range");
  if (mm != 0 || ss != 0) return fail("timestamp is not on a whole hour");
  if (pos >= text.size()) return fail("missing UTC offset");
  const auto offset = parse_offset(text.substr(pos));
  if (!offset) return fail("invalid UTC offset");
  return Timestamp{*day, hh, *offset};
}

std::string format_iso8601(const Timestamp& ts) {
  return fmt::format("{}T{:02}:00{}", format_date(ts.local_day), ts.hour, format_offset(ts.offset_minutes));
}

int days_in_year(int y) { return year{y}.is_leap() ? 366 : 365; }

sys_days dst_start_day(int y) { return sys_days{year{y} / March / Sunday[last]}; }
sys_days dst_end_day(int y) { return sys_days{year{y} / October / Sunday[last]}; }

std::string Zone::name() const {
  if (kind_ == Kind::central_european) return "CET";
  if (offset_minutes_ == 0) return "UTC";
  return format_offset(offset_minutes_);
}

int Zone::offset_at(sys_days d, int hour, bool second_occurrence) const {
  if (kind_ == Kind::fixed) return offset_minutes_;
  const int y = static_cast<int>(year_month_day{d}.year());
  const sys_days start = dst_start_day(y);
  const sys_days end = dst_end_day(y);
  if (d == start) return hour < 2 ? 60 : 120;
  if (d == end) {
    if (hour < 2) return 120;
    if (hour == 2) return second_occurrence ? 60 : 120;
    return 60;
  }
  return (d > start && d < end) ? 120 : 60;
}

bool Zone::is_nonexistent(sys_days d, int hour) const {
  if (kind_ == Kind::fixed) return false;
  return hour == 2 && d == dst_start_day(static_cast<int>(year_month_day{d}.year()));
}

bool Zone::is_repeated(sys_days d, int hour) const {
  if (kind_ == Kind::fixed) return false;
  return hour == 2 && d == dst_end_day(static_cast<int>(year_month_day{d}.year()));
}

bool Zone::accepts(sys_days d, int hour, int offset) const {
  if (is_repeated(d, hour)) return offset == 60 || offset == 120;
  return offset == offset_at(d, hour);
}

std::optional<Zone> parse_zone(std::string_view text) {
  if (text == "UTC" || text == "utc" || text == "Z") return Zone::utc();
  if (text == "CET" || text == "cet" || text == "Europe/Berlin" || text == "CET/CEST")
    return Zone::central_european();
  if (auto off = parse_offset(text)) return Zone::fixed(*off);
  return std::nullopt;
}

}  // namespace spotvol
