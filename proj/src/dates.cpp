#include "bondlab/dates.hpp"

#include <charconv>
#include <cstdio>

#include "bondlab/errors.hpp"

namespace bondlab {
namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("malformed date/time '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const int y = parse_int(text.substr(0, 4), text);
  const int m = parse_int(text.substr(5, 2), text);
  const int d = parse_int(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw Error("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Month parse_month(std::string_view text) {
  if (text.size() != 7 && text.size() != 10) {
    throw Error("malformed month '" + std::string(text) + "' (expected YYYY-MM)");
  }
  if (text[4] != '-') throw Error("malformed month '" + std::string(text) + "'");
  const int y = parse_int(text.substr(0, 4), text);
  const int m = parse_int(text.substr(5, 2), text);
  const Month ym{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)}};
  if (!ym.ok()) throw Error("invalid month '" + std::string(text) + "'");
  return ym;
}

std::string format_month(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()),
                static_cast<unsigned>(m.month()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  Timestamp ts;
  ts.day = parse_date(text.substr(0, std::min<std::size_t>(10, text.size())));
  if (text.size() == 10) return ts;
  if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    throw Error("malformed timestamp '" + std::string(text) + "'");
  }
  const int hh = parse_int(text.substr(11, 2), text);
  const int mm = parse_int(text.substr(14, 2), text);
  int ss = 0;
  if (text.size() >= 19) {
    if (text[16] != ':') throw Error("malformed timestamp '" + std::string(text) + "'");
    ss = parse_int(text.substr(17, 2), text);
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    throw Error("time out of range in '" + std::string(text) + "'");
  }
  ts.seconds = hh * 3600 + mm * 60 + ss;
  return ts;
}

std::string format_timestamp(const Timestamp& ts) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", ts.seconds / 3600, (ts.seconds / 60) % 60,
                ts.seconds % 60);
  return format_date(ts.day) + buf;
}

Month month_of(Date d) {
  const std::chrono::year_month_day ymd{d};
  return Month{ymd.year(), ymd.month()};
}

Date first_day(Month m) { return Date{m / std::chrono::day{1}}; }

Date last_day(Month m) { return Date{m / std::chrono::last}; }

}  // namespace bondlab
