#include "bondlab/daily_clean.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/parallel.hpp"

namespace bondlab::daily {
namespace {

double round4(double x) { return std::round(x * 1e4) / 1e4; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void DistressedParams::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(key, "must be positive");
  };
  positive(tau_low, "distressed.tau_low");
  positive(tau_high, "distressed.tau_high");
  positive(tau_plateau, "distressed.tau_plateau");
  positive(tau_intraday, "distressed.tau_intraday");
  auto above_one = [](double v, const char* key) {
    if (!(v > 1.0)) throw ConfigError(key, "must exceed 1");
  };
  above_one(rho_anomaly, "distressed.rho_anomaly");
  above_one(rho_spike, "distressed.rho_spike");
  above_one(rho_recovery, "distressed.rho_recovery");
  above_one(rho_plateau, "distressed.rho_plateau");
  if (!(gamma_range > 0.0 && gamma_range < 1.0)) {
    throw ConfigError("distressed.gamma_range", "must lie in (0,1)");
  }
  if (window < 1) throw ConfigError("distressed.window", "must be at least 1");
  if (run_min < 1) throw ConfigError("distressed.run_min", "must be at least 1");
}

bool is_round(double price, const DistressedParams& p) {
  const double r = round4(price);
  return std::any_of(p.round_set.begin(), p.round_set.end(),
                     [&](double v) { return round4(v) == r; });
}

std::vector<DailyFlag> flag_downward_anomalies(std::span<const DailyBondRecord> s,
                                               const DistressedParams& p) {
  std::vector<DailyFlag> out;
  const std::size_t n = s.size();
  const std::size_t L = static_cast<std::size_t>(p.window);
  for (std::size_t t = 0; t < n; ++t) {
    const double price = s[t].vwap_price;
    if (!(price < p.tau_low || is_round(price, p))) continue;
    std::vector<double> higher;
    const std::size_t lo = t >= L ? t - L : 0;
    const std::size_t hi = std::min(n - 1, t + L);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (k != t && s[k].vwap_price > price) higher.push_back(s[k].vwap_price);
    }
    if (higher.empty()) continue;
    const double ratio = median(std::move(higher)) / price;
    if (ratio >= p.rho_anomaly) out.push_back({t, 1, ratio});
  }
  return out;
}

std::vector<DailyFlag> flag_spikes(std::span<const DailyBondRecord> s,
                                   const DistressedParams& p) {
  std::vector<DailyFlag> out;
  const std::size_t n = s.size();
  const std::size_t L = static_cast<std::size_t>(p.window);
  for (std::size_t t = 1; t < n; ++t) {
    const double price = s[t].vwap_price;
    // Round numbers above 0.50 reduce to 1.00 within the default round set.
    const bool round_candidate = is_round(price, p) && price > 0.50;
    if (!(price > p.tau_high || round_candidate)) continue;
    std::vector<double> pre;
    for (std::size_t k = t >= L ? t - L : 0; k < t; ++k) pre.push_back(s[k].vwap_price);
    const double m_pre = median(std::move(pre));
    const double ratio = price / m_pre;
    if (ratio < p.rho_spike) continue;
    bool recovered = false;
    for (std::size_t j = t + 1; j <= std::min(n - 1, t + L) && j < n; ++j) {
      if (s[j].vwap_price <= p.rho_recovery * m_pre) {
        recovered = true;
        break;
      }
    }
    if (recovered) out.push_back({t, 2, ratio});
  }
  return out;
}

std::vector<DailyFlag> flag_plateaus(std::span<const DailyBondRecord> s,
                                     const DistressedParams& p) {
  std::vector<DailyFlag> out;
  const std::size_t n = s.size();
  std::size_t start = 0;
  while (start < n) {
    const double price = round4(s[start].vwap_price);
    std::size_t end = start + 1;
    while (end < n && round4(s[end].vwap_price) == price) ++end;
    const std::size_t len = end - start;
    const double raw = s[start].vwap_price;
    const bool round = is_round(raw, p);
    if (len >= static_cast<std::size_t>(p.run_min) && (raw < p.tau_plateau || round)) {
      double ratio = 0.0;
      if (start > 0) ratio = std::max(ratio, s[start - 1].vwap_price / raw);
      if (end < n) ratio = std::max(ratio, s[end].vwap_price / raw);
      if (ratio >= p.rho_plateau || round) {
        for (std::size_t k = start; k < end; ++k) out.push_back({k, 3, ratio});
      }
    }
    start = end;
  }
  return out;
}

std::vector<DailyFlag> flag_intraday(std::span<const DailyBondRecord> s,
                                     const DistressedParams& p) {
  std::vector<DailyFlag> out;
  for (std::size_t t = 0; t < s.size(); ++t) {
    std::vector<double> set;
    if (s[t].high) set.push_back(*s[t].high);
    if (s[t].low) set.push_back(*s[t].low);
    if (set.empty()) continue;
    const auto [mn, mx] = std::minmax_element(set.begin(), set.end());
    double mean = 0.0;
    for (double v : set) mean += v;
    mean /= static_cast<double>(set.size());
    if (!(*mn < p.tau_intraday) || !(mean > 0.0)) continue;
    const double range = (*mx - *mn) / mean;
    if (range > p.gamma_range) out.push_back({t, 4, range});
  }
  return out;
}

CleanedDaily clean_daily(const DailyPanel& panel, const DistressedParams& p, bool keep_flagged,
                         unsigned jobs) {
  p.validate();
  DailyPanel sorted = panel;
  sort_panel(sorted);
  const auto runs = group_runs(sorted.size(), [&](std::size_t i) { return sorted[i].bond_id; });
  std::vector<std::vector<DailyFlag>> per_bond(runs.size());
  parallel_for(runs.size(), jobs, [&](std::size_t r) {
    const auto [lo, hi] = runs[r];
    std::span<const DailyBondRecord> bond(sorted.data() + lo, hi - lo);
    auto& f = per_bond[r];
    for (auto* filter : {&flag_downward_anomalies, &flag_spikes, &flag_plateaus, &flag_intraday}) {
      auto part = filter(bond, p);
      f.insert(f.end(), part.begin(), part.end());
    }
    std::sort(f.begin(), f.end(), [](const DailyFlag& a, const DailyFlag& b) {
      return std::tie(a.index, a.filter_id) < std::tie(b.index, b.filter_id);
    });
  });

  CleanedDaily out;
  std::vector<bool> flagged(sorted.size(), false);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& f : per_bond[r]) {
      const std::size_t k = runs[r].first + f.index;
      flagged[k] = true;
      out.flags.push_back({sorted[k].bond_id, sorted[k].date, f.filter_id, sorted[k].vwap_price,
                           f.ratio});
    }
  }
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (flagged[k] && !keep_flagged) continue;
    out.panel.push_back(sorted[k]);
    out.flagged.push_back(flagged[k]);
  }
  return out;
}

void write_flag_log(std::ostream& out, const std::vector<FlagEntry>& flags) {
  csv::Writer w(out);
  w.header({"bond_id", "date", "filter_id", "price", "ratio_or_range"});
  for (const auto& f : flags) {
    w.row({f.bond_id, format_date(f.date), std::to_string(f.filter_id), csv::format_double(f.price),
           csv::format_double(f.ratio_or_range)});
  }
}

}  // namespace bondlab::daily
