#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bondlab/dates.hpp"

namespace bondlab {

enum class WindowSide { first_n, last_n };

// Business days between two bounds: weekdays minus a supplied holiday list.
class TradingCalendar {
 public:
  TradingCalendar(Date first, Date last, std::span<const Date> holidays = {});

  // Calendar covering whole years [first_year, last_year].
  static TradingCalendar for_years(int first_year, int last_year,
                                   std::span<const Date> holidays = {});

  Date first() const noexcept { return first_; }
  Date last() const noexcept { return last_; }
  const std::vector<Date>& days() const noexcept { return days_; }

  bool is_business_day(Date d) const;
  bool covers(Month m) const;

  // All business days of the month, ascending. Throws RangeError when the
  // month lies outside the calendar span.
  std::vector<Date> business_days(Month m) const;

  // Number of business days in (from, to]; negative when to < from.
  std::ptrdiff_t business_days_between(Date from, Date to) const;

 private:
  Date first_;
  Date last_;
  std::vector<Date> days_;
};

// One ISO date per line; blank lines and lines starting with '#' are skipped.
std::vector<Date> load_holidays(const std::filesystem::path& path);

// The first or last `n` business days of `month`.
std::vector<Date> window_dates(const TradingCalendar& calendar, Month month, WindowSide which,
                               std::size_t n);

}  // namespace bondlab
