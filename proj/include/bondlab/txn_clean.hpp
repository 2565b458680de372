#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bondlab/panel.hpp"

namespace bondlab::txn {

struct DecimalShiftParams {
  int w = 5;  // half window, effective window 2w+1
  double tau_pct = 0.02;
  double tau_abs = 8.0;
  double tau_bad = 0.05;
  double gamma = 0.20;
  double price_floor = 5.0;
  double price_ceiling = 300.0;
  double par_band = 15.0;
  std::vector<double> factors = {0.1, 0.01, 10.0, 100.0};

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct BounceBackParams {
  double tau = 35.0;
  int lookahead = 5;  // forward rows scanned for reversion
  int w = 5;          // trailing baseline window
  double alpha_tol = 0.25;
  int run_min = 3;
  int cooldown = 2;
  double slack = 1.0;
  // Minimum extra displacement for moving a flag to the preceding row.
  double reassign_points = 5.0;
  // Forward span over which flags are extended while prices stay displaced.
  int extend_rows = 5;

  void validate() const;
};

enum class AnchorMode { centered, forward, backward, global };

struct Anchor {
  double price = 0.0;
  AnchorMode source = AnchorMode::global;
};

// Median of distinct prices in a 2w+1 window. The window is tried in the
// order centered -> forward -> backward -> whole series, starting at `mode`.
Anchor unique_median_anchor(std::span<const double> prices, std::size_t index, int w,
                            AnchorMode mode = AnchorMode::centered);

enum class Action { corrected, flagged, untouched };

struct CorrectionEntry {
  std::string bond_id;
  std::int64_t seq = 0;
  std::size_t index = 0;  // position within the bond's series
  Action action = Action::untouched;
  double orig_price = 0.0;
  std::optional<double> new_price;
  std::optional<double> factor;
  double raw_error = 0.0;
  std::optional<double> corrected_error;
};

using CorrectionLog = std::vector<CorrectionEntry>;

struct DecimalShiftResult {
  TransactionPanel series;
  CorrectionLog log;
};

// `series` holds one bond's trades in time order. Records whose raw error
// exceeds tau_bad are either corrected by the best admissible factor or
// flagged and left unchanged.
DecimalShiftResult decimal_shift_correct(std::span<const TransactionRecord> series,
                                         const DecimalShiftParams& params = {});

enum class BounceReason { path_a, path_b, reassigned, extended, par_block };

struct BounceEntry {
  std::string bond_id;
  std::int64_t seq = 0;
  std::size_t index = 0;
  double price = 0.0;
  std::optional<double> baseline;
  BounceReason reason = BounceReason::path_a;
};

struct BounceResult {
  std::vector<bool> flags;
  std::vector<BounceEntry> log;
  // Set when the series is too short to form a baseline.
  bool skipped_short = false;
};

BounceResult bounce_back_flag(std::span<const TransactionRecord> series,
                              const BounceBackParams& params = {});
// Convenience overload on a bare price path.
BounceResult bounce_back_flag(std::span<const double> prices, const BounceBackParams& params = {});

struct CleanedTransactions {
  TransactionPanel panel;
  std::vector<bool> decimal_flagged;
  std::vector<bool> bounce_flagged;
  CorrectionLog corrections;
  std::vector<BounceEntry> bounces;
};

// Decimal-shift correction followed by bounce-back flagging, per bond. Logs
// are ordered by (bond_id, seq). `jobs` > 1 processes bonds in parallel.
CleanedTransactions clean_transactions(const TransactionPanel& panel,
                                       const DecimalShiftParams& ds = {},
                                       const BounceBackParams& bb = {}, unsigned jobs = 1);

std::string to_string(Action a);
std::string to_string(BounceReason r);

void write_correction_log(std::ostream& out, const CorrectionLog& log);
void write_bounce_log(std::ostream& out, const std::vector<BounceEntry>& log);

}  // namespace bondlab::txn
