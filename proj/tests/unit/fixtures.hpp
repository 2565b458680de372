#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bondlab/dates.hpp"
#include "bondlab/panel.hpp"

namespace fx {

using namespace std::chrono;

inline bondlab::Date ymd(int y, unsigned m, unsigned d) {
  return sys_days{year{y} / month{m} / day{d}};
}

inline bondlab::Month ym(int y, unsigned m) { return year{y} / month{m}; }

// One bond's trades, one per day starting 2024-01-02, seq ascending.
inline bondlab::TransactionPanel trades(const std::vector<double>& prices,
                                        const std::string& bond = "B1") {
  bondlab::TransactionPanel out;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    bondlab::TransactionRecord r;
    r.bond_id = bond;
    r.timestamp.day = ymd(2024, 1, 2) + days{static_cast<int>(i)};
    r.timestamp.seconds = 36000;
    r.price = prices[i];
    r.volume = 100.0;
    r.seq = static_cast<std::int64_t>(i + 1);
    out.push_back(r);
  }
  return out;
}

inline bondlab::DailyPanel daily(const std::vector<double>& prices,
                                 const std::string& bond = "B1") {
  bondlab::DailyPanel out;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    bondlab::DailyBondRecord r;
    r.bond_id = bond;
    r.date = ymd(2024, 1, 2) + days{static_cast<int>(i)};
    r.vwap_price = prices[i];
    r.amount_outstanding = 1000.0;
    out.push_back(r);
  }
  return out;
}

inline bondlab::BondMonth cell(double p_end, bondlab::Month m = ym(2024, 1)) {
  bondlab::BondMonth c;
  c.bond_id = "B1";
  c.firm_id = "F1";
  c.month = m;
  c.p_end = bondlab::DatedPrice{p_end, bondlab::last_day(m)};
  c.market_value = 100.0;
  c.rating = 5;
  return c;
}

// Random monthly panel with a fat-tailed return process, month-begin prices
// and a signal "sig" plus its gapped copy. Some cells are skipped so bonds
// enter and leave.
inline bondlab::MonthlyPanel random_monthly(std::uint64_t seed, int bonds, int months) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::student_t_distribution<double> fat(3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bondlab::MonthlyPanel out;
  for (int b = 0; b < bonds; ++b) {
    double price = 80.0 + 40.0 * u(gen);
    const std::string id = "B" + std::to_string(1000 + b);
    for (int t = 0; t < months; ++t) {
      const auto m = ym(2010, 1) + std::chrono::months{t};
      price = std::clamp(price * (1.0 + 0.03 * fat(gen)), 5.0, 250.0);
      if (u(gen) < 0.05) continue;
      bondlab::BondMonth c = cell(price, m);
      c.bond_id = id;
      c.firm_id = "F" + std::to_string(b / 3);
      c.market_value = 10.0 + 90.0 * u(gen);
      c.rating = 1 + static_cast<int>(u(gen) * 21.0);
      c.maturity_years = 1.0 + 20.0 * u(gen);
      c.p_bgn_next = bondlab::DatedPrice{price * (1.0 + 0.004 * z(gen)),
                                         bondlab::first_day(m + std::chrono::months{1})};
      c.signals["sig"] = z(gen);
      c.signals_gapped["sig"] = c.signals["sig"] + 0.1 * z(gen);
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace fx
