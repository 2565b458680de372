#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bondlab/dates.hpp"

namespace bondlab {

// Prices are percent of par throughout (100.0 = par).

struct TransactionRecord {
  std::string bond_id;
  Timestamp timestamp;
  double price = 0.0;
  double volume = 0.0;
  std::int64_t seq = 0;
};

struct DailyBondRecord {
  std::string bond_id;
  Date date;
  double vwap_price = 0.0;
  std::optional<double> high;
  std::optional<double> low;
  double accrued_interest = 0.0;
  double coupon_paid = 0.0;
  std::optional<int> rating_sp;     // 1..22, 22 = D
  std::optional<int> rating_moody;  // 1..21, 21 = D
  std::optional<double> duration;
  double amount_outstanding = 0.0;
};

struct DatedPrice {
  double price = 0.0;
  Date date;
};

inline constexpr int kDefaultRating = 22;

struct BondMonth {
  std::string bond_id;
  std::string firm_id;
  Month month;
  std::optional<DatedPrice> p_end;
  std::optional<DatedPrice> p_bgn_next;
  double ai_end = 0.0;
  // Accrued interest at the month-begin trade of t+1; when absent the
  // month-end accrued interest of t is used.
  std::optional<double> ai_bgn_next;
  double coupon_next = 0.0;
  bool in_default = false;
  double market_value = 0.0;
  int rating = 0;  // 0 = unrated
  std::optional<double> maturity_years;
  std::optional<double> duration;
  // NaN marks a missing signal value.
  std::map<std::string, double> signals;
  std::map<std::string, double> signals_gapped;
};

using TransactionPanel = std::vector<TransactionRecord>;
using DailyPanel = std::vector<DailyBondRecord>;
using MonthlyPanel = std::vector<BondMonth>;

enum class Schema { transaction, daily, monthly };

using Panel = std::variant<TransactionPanel, DailyPanel, MonthlyPanel>;

bool is_investment_grade(int rating);
bool is_high_yield(int rating);

TransactionPanel load_transactions(const std::filesystem::path& path);
DailyPanel load_daily(const std::filesystem::path& path);
MonthlyPanel load_monthly(const std::filesystem::path& path);
Panel load_panel(const std::filesystem::path& path, Schema schema);

// Stream variants used by the file loaders (and by tests).
TransactionPanel read_transactions(std::istream& in, const std::string& source = "<stream>");
DailyPanel read_daily(std::istream& in, const std::string& source = "<stream>");
MonthlyPanel read_monthly(std::istream& in, const std::string& source = "<stream>");

// Guess the schema from a header row; nullopt if none matches.
std::optional<Schema> detect_schema(const std::filesystem::path& path);

void write_transactions(std::ostream& out, const TransactionPanel& panel);
void write_daily(std::ostream& out, const DailyPanel& panel);
void write_monthly(std::ostream& out, const MonthlyPanel& panel);

// Column layout shared by the monthly writers: fixed schema columns, then
// sig_<name> for every signal and sig_gap_<name> for every gapped signal.
std::vector<std::string> monthly_columns(const MonthlyPanel& panel);
std::vector<std::string> monthly_fields(const BondMonth& cell,
                                        const std::vector<std::string>& columns);

std::vector<std::string> signal_names(const MonthlyPanel& panel);

void sort_panel(TransactionPanel& panel);
void sort_panel(DailyPanel& panel);
void sort_panel(MonthlyPanel& panel);

}  // namespace bondlab
