#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bondlab/panel.hpp"

namespace bondlab::daily {

struct DistressedParams {
  double tau_low = 0.10;
  double tau_high = 5.0;
  double tau_plateau = 0.15;
  double rho_anomaly = 3.0;
  double rho_spike = 3.0;
  double rho_recovery = 2.0;
  double rho_plateau = 3.0;
  double gamma_range = 0.75;
  double tau_intraday = 20.0;
  int window = 5;   // L, in observations before/after the day
  int run_min = 2;  // minimum plateau length
  std::vector<double> round_set = {0.001, 0.01, 0.05, 0.10, 0.25, 0.50, 1.00};

  void validate() const;
};

// Membership in the round set after rounding to 4 decimals.
bool is_round(double price, const DistressedParams& p);

struct DailyFlag {
  std::size_t index = 0;  // position in the bond's series
  int filter_id = 0;      // 1..4
  double ratio = 0.0;     // ratio (filters 1-3) or range/mean (filter 4)
};

// Each filter reads one bond's series ordered by date.
std::vector<DailyFlag> flag_downward_anomalies(std::span<const DailyBondRecord> series,
                                               const DistressedParams& p = {});
std::vector<DailyFlag> flag_spikes(std::span<const DailyBondRecord> series,
                                   const DistressedParams& p = {});
std::vector<DailyFlag> flag_plateaus(std::span<const DailyBondRecord> series,
                                     const DistressedParams& p = {});
std::vector<DailyFlag> flag_intraday(std::span<const DailyBondRecord> series,
                                     const DistressedParams& p = {});

struct FlagEntry {
  std::string bond_id;
  Date date;
  int filter_id = 0;
  double price = 0.0;
  double ratio_or_range = 0.0;
};

struct CleanedDaily {
  DailyPanel panel;             // flagged days removed unless keep_flagged
  std::vector<bool> flagged;    // parallel to panel (all false when dropped)
  std::vector<FlagEntry> flags; // ordered by (bond_id, date, filter_id)
};

// Runs filters 1-4 on every bond; the union of flags is removed unless
// keep_flagged is set.
CleanedDaily clean_daily(const DailyPanel& panel, const DistressedParams& p = {},
                         bool keep_flagged = false, unsigned jobs = 1);

void write_flag_log(std::ostream& out, const std::vector<FlagEntry>& flags);

}  // namespace bondlab::daily
