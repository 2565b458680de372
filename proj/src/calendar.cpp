#include "bondlab/calendar.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include "bondlab/errors.hpp"

namespace bondlab {

TradingCalendar::TradingCalendar(Date first, Date last, std::span<const Date> holidays)
    : first_(first), last_(last) {
  if (last < first) throw RangeError("calendar end precedes start");
  std::vector<Date> hol(holidays.begin(), holidays.end());
  std::sort(hol.begin(), hol.end());
  for (Date d = first; d <= last; d += std::chrono::days{1}) {
    if (is_weekend(d)) continue;
    if (std::binary_search(hol.begin(), hol.end(), d)) continue;
    days_.push_back(d);
  }
}

TradingCalendar TradingCalendar::for_years(int first_year, int last_year,
                                           std::span<const Date> holidays) {
  using namespace std::chrono;
  return TradingCalendar(Date{year{first_year} / January / 1}, Date{year{last_year} / December / 31},
                         holidays);
}

bool TradingCalendar::is_business_day(Date d) const {
  return std::binary_search(days_.begin(), days_.end(), d);
}

bool TradingCalendar::covers(Month m) const {
  return month_index(m) >= month_index(month_of(first_)) &&
         month_index(m) <= month_index(month_of(last_));
}

std::vector<Date> TradingCalendar::business_days(Month m) const {
  if (!covers(m)) throw RangeError("month " + format_month(m) + " outside calendar span");
  auto lo = std::lower_bound(days_.begin(), days_.end(), first_day(m));
  auto hi = std::upper_bound(days_.begin(), days_.end(), last_day(m));
  return {lo, hi};
}

std::ptrdiff_t TradingCalendar::business_days_between(Date from, Date to) const {
  if (to < from) return -business_days_between(to, from);
  auto lo = std::upper_bound(days_.begin(), days_.end(), from);
  auto hi = std::upper_bound(days_.begin(), days_.end(), to);
  return hi - lo;
}

std::vector<Date> load_holidays(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open holiday file " + path.string());
  std::vector<Date> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_date(line));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Date> window_dates(const TradingCalendar& calendar, Month month, WindowSide which,
                               std::size_t n) {
  if (n < 1) throw RangeError("window length must be at least 1");
  auto days = calendar.business_days(month);
  if (days.size() <= n) return days;
  if (which == WindowSide::first_n) return {days.begin(), days.begin() + static_cast<std::ptrdiff_t>(n)};
  return {days.end() - static_cast<std::ptrdiff_t>(n), days.end()};
}

}  // namespace bondlab
