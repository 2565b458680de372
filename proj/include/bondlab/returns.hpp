#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bondlab/calendar.hpp"
#include "bondlab/panel.hpp"

namespace bondlab::returns {

struct ReturnFlags {
  bool default_event = false;
  bool trading_in_default = false;
  bool capped = false;
  bool begin_discarded = false;  // p_bgn_next violated the one-day gap
};

// Returns realized over month t+1 for a position formed at month-end t.
struct MonthlyReturnSet {
  std::optional<double> r_end;
  std::optional<double> r_bgn;
  std::optional<double> lib;
  std::optional<double> r_excess;
  std::optional<double> r_duradj;
  ReturnFlags flags;
};

std::string format_flags(const ReturnFlags& f);

struct EndReturn {
  double value = 0.0;
  ReturnFlags flags;
};

// Total return from month-end t to month-end t+1. A bond that moves into
// default at t+1 drops the coupon and the t+1 accrued interest; a bond in
// default at both ends earns the clean-price return capped at the standard
// return. Throws ComputationError on a nonpositive denominator or a missing
// month-end price.
EndReturn month_end_return(const BondMonth& t, const BondMonth& t1);

// Return from the first trade of month t+1 (t.p_bgn_next) to month-end t+1.
// nullopt when either price is missing.
std::optional<double> month_begin_return(const BondMonth& t, const BondMonth& t1);

// Clean-price change between the month-end signal price and the month-begin
// execution price.
double lib_component(double p_end_t, double p_bgn_t1);

struct KeyRateNode {
  double duration = 0.0;
  double ret = 0.0;
};

class KeyRateTable {
 public:
  void add(Month m, double duration, double ret);
  // Nodes for one month, ascending in duration. Throws ConfigError if none.
  const std::vector<KeyRateNode>& nodes(Month m) const;
  bool has(Month m) const { return table_.count(month_index(m)) > 0; }
  static KeyRateTable load(const std::filesystem::path& path);

 private:
  std::map<int, std::vector<KeyRateNode>> table_;
};

class RiskFreeSeries {
 public:
  void set(Month m, double rate) { rates_[month_index(m)] = rate; }
  // Throws ConfigError when the month has no rate.
  double at(Month m) const;
  bool has(Month m) const { return rates_.count(month_index(m)) > 0; }
  static RiskFreeSeries load(const std::filesystem::path& path);

 private:
  std::map<int, double> rates_;
};

// Linear interpolation of the Treasury node returns at `duration`, clamped
// to the end nodes, subtracted from r.
double duration_adjusted(double r, double duration, const std::vector<KeyRateNode>& nodes);

struct SelectionOptions {
  std::size_t window = 5;   // business days at each month edge
  std::size_t max_gap = 10; // business days back for the gapped signal price
  bool reversal_signal = true;
};

struct SelectionLog {
  std::vector<std::string> messages;
};

// Month-end and month-begin prices from a cleaned daily panel. Also attaches
// the built-in short-term reversal signal `str` (minus the month-t return)
// and its gapped variant computed from a price at least one business day
// before the month-end price.
MonthlyPanel select_monthly_prices(const DailyPanel& daily, const TradingCalendar& calendar,
                                   const SelectionOptions& options = {},
                                   SelectionLog* log = nullptr);

// A calendar spanning every year of the daily panel plus the following year.
TradingCalendar calendar_for(const DailyPanel& daily, std::span<const Date> holidays = {});

struct FormationRow {
  BondMonth cell;
  MonthlyReturnSet fwd;              // realized over month t+1
  std::optional<double> r_prev;      // r_end realized over month t
  std::optional<double> p_end_prev;  // previous observed month-end price
  bool excluded = false;             // removed at formation by a filter
};

struct FactorPanel {
  std::vector<Month> months;                    // ascending formation months
  std::vector<std::vector<FormationRow>> rows;  // cross-sections, sorted by bond_id

  std::size_t size() const noexcept { return months.size(); }
};

struct ReturnContext {
  const RiskFreeSeries* risk_free = nullptr;
  const KeyRateTable* key_rates = nullptr;
};

// Link consecutive months per bond and compute the forward return set for
// every cell.
FactorPanel build_factor_panel(MonthlyPanel panel, const ReturnContext& ctx = {},
                               std::vector<std::string>* log = nullptr);

// Value-weighted mean excess return (r_end minus the risk-free rate when
// available) over every row with a valid return; keyed by realization month.
std::vector<std::pair<Month, double>> market_factor(const FactorPanel& panel);

// Monthly schema extended with r_end,r_bgn,lib,r_excess,r_duradj,flags.
void write_monthly_returns(std::ostream& out, const FactorPanel& panel);

}  // namespace bondlab::returns
