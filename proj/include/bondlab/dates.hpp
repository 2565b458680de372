#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace bondlab {

using Date = std::chrono::sys_days;
using Month = std::chrono::year_month;

// Intraday timestamp: calendar day plus seconds after midnight.
struct Timestamp {
  Date day;
  std::int32_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;
};

// ISO-8601 "YYYY-MM-DD". Throws bondlab::Error on malformed input.
Date parse_date(std::string_view text);
std::string format_date(Date d);

// "YYYY-MM" (a trailing "-DD" is accepted and ignored).
Month parse_month(std::string_view text);
std::string format_month(Month m);

// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" or with a space separator.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp& ts);

Month month_of(Date d);
Date first_day(Month m);
Date last_day(Month m);

// Sequential integer index of a month (year*12 + month-1); consecutive
// months differ by exactly one.
inline int month_index(Month m) {
  return static_cast<int>(m.year()) * 12 + static_cast<int>(static_cast<unsigned>(m.month())) - 1;
}

inline bool is_weekend(Date d) {
  const std::chrono::weekday wd{d};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

}  // namespace bondlab
