#include "bondlab/txn_clean.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/parallel.hpp"

namespace bondlab::txn {
namespace {

double round4(double x) { return std::round(x * 1e4) / 1e4; }

bool is_par(double price) { return round4(price) == 100.0; }

double unique_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  const std::size_t n = v.size();
  if (n == 0) return std::nan("");
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

void DecimalShiftParams::validate() const {
  if (w < 1) throw ConfigError("decimal_shift.w", "must be at least 1");
  if (!(tau_pct > 0.0)) throw ConfigError("decimal_shift.tau_pct", "must be positive");
  if (!(tau_pct < tau_bad)) throw ConfigError("decimal_shift.tau_bad", "must exceed tau_pct");
  if (!(tau_abs > 0.0)) throw ConfigError("decimal_shift.tau_abs", "must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("decimal_shift.gamma", "must lie in (0,1)");
  if (!(price_floor < price_ceiling)) {
    throw ConfigError("decimal_shift.price_floor", "must be below price_ceiling");
  }
  if (!(par_band >= 0.0)) throw ConfigError("decimal_shift.par_band", "must be nonnegative");
  if (factors.empty()) throw ConfigError("decimal_shift.factors", "must not be empty");
  for (double f : factors) {
    if (!(f > 0.0) || f == 1.0) throw ConfigError("decimal_shift.factors", "must be positive and != 1");
  }
}

void BounceBackParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("bounce_back.tau", "must be positive");
  if (lookahead < 1) throw ConfigError("bounce_back.lookahead", "must be at least 1");
  if (w < 1) throw ConfigError("bounce_back.w", "must be at least 1");
  if (!(alpha_tol > 0.0 && alpha_tol < 1.0)) {
    throw ConfigError("bounce_back.alpha_tol", "must lie in (0,1)");
  }
  if (run_min < 1) throw ConfigError("bounce_back.run_min", "must be at least 1");
  if (cooldown < 0) throw ConfigError("bounce_back.cooldown", "must be nonnegative");
  if (!(slack >= 0.0 && slack < tau)) throw ConfigError("bounce_back.slack", "must lie in [0, tau)");
}

Anchor unique_median_anchor(std::span<const double> prices, std::size_t index, int w,
                            AnchorMode mode) {
  const std::size_t n = prices.size();
  const std::size_t hw = static_cast<std::size_t>(std::max(w, 0));
  auto window = [&](std::size_t lo, std::size_t hi) {
    return unique_median(std::vector<double>(prices.begin() + static_cast<std::ptrdiff_t>(lo),
                                             prices.begin() + static_cast<std::ptrdiff_t>(hi) + 1));
  };
  switch (mode) {
    case AnchorMode::centered:
      if (index >= hw && index + hw < n) return {window(index - hw, index + hw), AnchorMode::centered};
      [[fallthrough]];
    case AnchorMode::forward:
      if (index + 2 * hw < n) return {window(index, index + 2 * hw), AnchorMode::forward};
      [[fallthrough]];
    case AnchorMode::backward:
      if (index >= 2 * hw) return {window(index - 2 * hw, index), AnchorMode::backward};
      [[fallthrough]];
    case AnchorMode::global:
      break;
  }
  return {window(0, n - 1), AnchorMode::global};
}

DecimalShiftResult decimal_shift_correct(std::span<const TransactionRecord> series,
                                         const DecimalShiftParams& params) {
  params.validate();
  DecimalShiftResult out;
  out.series.assign(series.begin(), series.end());
  std::vector<double> prices;
  prices.reserve(series.size());
  for (const auto& r : series) prices.push_back(r.price);

  for (std::size_t i = 0; i < prices.size(); ++i) {
    const double anchor = unique_median_anchor(prices, i, params.w).price;
    const double raw = std::abs(prices[i] - anchor) / anchor;
    if (!(raw > params.tau_bad)) continue;

    std::optional<std::tuple<double, double, double>> best;  // (error, |log10 f|, f)
    for (double f : params.factors) {
      const double p = f * prices[i];
      const double err = std::abs(p - anchor) / anchor;
      const bool aligned = err <= params.tau_pct || std::abs(p - anchor) <= params.tau_abs ||
                           (std::abs(anchor - 100.0) <= params.par_band &&
                            std::abs(p - 100.0) <= params.par_band);
      const bool improved = err <= params.gamma * raw;
      const bool plausible = p >= params.price_floor && p <= params.price_ceiling;
      if (!(aligned && improved && plausible)) continue;
      const auto key = std::make_tuple(err, std::abs(std::log10(f)), f);
      if (!best || key < *best) best = key;
    }

    CorrectionEntry e;
    e.bond_id = series[i].bond_id;
    e.seq = series[i].seq;
    e.index = i;
    e.orig_price = prices[i];
    e.raw_error = raw;
    if (best) {
      const double f = std::get<2>(*best);
      e.action = Action::corrected;
      e.factor = f;
      e.new_price = f * prices[i];
      e.corrected_error = std::get<0>(*best);
      out.series[i].price = *e.new_price;
    } else {
      e.action = Action::flagged;
    }
    out.log.push_back(std::move(e));
  }
  return out;
}

BounceResult bounce_back_flag(std::span<const double> prices, const BounceBackParams& params) {
  params.validate();
  const std::size_t n = prices.size();
  const std::size_t w = static_cast<std::size_t>(params.w);
  BounceResult out;
  out.flags.assign(n, false);
  std::vector<BounceReason> reason(n, BounceReason::path_a);
  std::vector<std::optional<double>> base_at(n);
  if (n < w + 1) {
    out.skipped_short = true;
    return out;
  }
  const double thr = params.tau - params.slack;
  const double near = params.alpha_tol * params.tau;

  // Baseline from the prior w trades not already flagged.
  auto baseline = [&](std::size_t i) -> std::optional<double> {
    std::vector<double> win;
    for (std::size_t k = i; k-- > 0 && win.size() < w;) {
      if (!out.flags[k]) win.push_back(prices[k]);
    }
    if (win.size() < w) return std::nullopt;
    return unique_median(std::move(win));
  };
  auto mark = [&](std::size_t k, BounceReason r, double b) {
    out.flags[k] = true;
    reason[k] = r;
    base_at[k] = b;
  };

  std::size_t i = w;
  while (i < n) {
    const auto b = baseline(i);
    if (!b) {
      ++i;
      continue;
    }
    // One-step jump from the last unflagged trade, so the return from a
    // flagged print is not itself a candidate.
    std::size_t prev = i - 1;
    while (prev > 0 && out.flags[prev]) --prev;
    const double disp = prices[i] - *b;
    const double jump = prices[i] - prices[prev];
    const bool by_jump = std::abs(jump) >= thr;
    const bool by_disp = std::abs(disp) >= thr;
    const bool by_par = is_par(prices[i]) && std::abs(disp) >= near;
    if (!(by_jump || by_disp || by_par)) {
      ++i;
      continue;
    }
    int dir = (by_disp || by_par) ? sign(disp) : sign(jump);
    if (dir == 0) dir = sign(jump);

    std::optional<std::size_t> revert;
    BounceReason path = BounceReason::path_a;
    const std::size_t scan_end = std::min(n - 1, i + static_cast<std::size_t>(params.lookahead));
    for (std::size_t j = i + 1; j <= scan_end; ++j) {
      const double step = prices[j] - prices[j - 1];
      if (sign(step) == -dir && std::abs(step) >= thr) {
        revert = j;
        path = BounceReason::path_a;
        break;
      }
      if (std::abs(prices[j] - *b) <= near) {
        revert = j;
        path = BounceReason::path_b;
        break;
      }
    }
    if (!revert) {
      ++i;
      continue;
    }

    std::size_t last = i;
    if (i >= 1 && !out.flags[i - 1] &&
        std::abs(prices[i - 1] - *b) >= std::abs(disp) + params.reassign_points) {
      mark(i - 1, BounceReason::reassigned, *b);
      last = i - 1;
    } else {
      mark(i, path, *b);
    }
    const std::size_t ext_end =
        std::min(*revert, i + 1 + static_cast<std::size_t>(params.extend_rows));
    for (std::size_t k = i + 1; k < ext_end; ++k) {
      if (std::abs(prices[k] - *b) < near) break;
      mark(k, BounceReason::extended, *b);
      last = k;
    }

    std::size_t resume = last + 1;
    if (is_par(prices[i])) {
      std::size_t run = 0;
      while (i + run < n && is_par(prices[i + run])) ++run;
      if (run >= static_cast<std::size_t>(params.run_min)) {
        for (std::size_t k = i; k < i + run; ++k) mark(k, BounceReason::par_block, *b);
        resume = std::max(resume, i + run + static_cast<std::size_t>(params.cooldown));
      }
    }
    i = resume;
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!out.flags[k]) continue;
    BounceEntry e;
    e.index = k;
    e.price = prices[k];
    e.baseline = base_at[k];
    e.reason = reason[k];
    out.log.push_back(e);
  }
  return out;
}

BounceResult bounce_back_flag(std::span<const TransactionRecord> series,
                              const BounceBackParams& params) {
  std::vector<double> prices;
  prices.reserve(series.size());
  for (const auto& r : series) prices.push_back(r.price);
  auto out = bounce_back_flag(std::span<const double>(prices), params);
  for (auto& e : out.log) {
    e.bond_id = series[e.index].bond_id;
    e.seq = series[e.index].seq;
  }
  return out;
}

CleanedTransactions clean_transactions(const TransactionPanel& panel,
                                       const DecimalShiftParams& ds, const BounceBackParams& bb,
                                       unsigned jobs) {
  ds.validate();
  bb.validate();
  TransactionPanel sorted = panel;
  sort_panel(sorted);
  const auto runs = group_runs(sorted.size(), [&](std::size_t i) { return sorted[i].bond_id; });

  struct Part {
    DecimalShiftResult ds;
    BounceResult bb;
  };
  std::vector<Part> parts(runs.size());
  parallel_for(runs.size(), jobs, [&](std::size_t r) {
    const auto [lo, hi] = runs[r];
    std::span<const TransactionRecord> bond(sorted.data() + lo, hi - lo);
    parts[r].ds = decimal_shift_correct(bond, ds);
    parts[r].bb = bounce_back_flag(std::span<const TransactionRecord>(parts[r].ds.series), bb);
  });

  CleanedTransactions out;
  out.panel.reserve(sorted.size());
  for (std::size_t r = 0; r < runs.size(); ++r) {
    auto& p = parts[r];
    std::vector<bool> ds_flag(p.ds.series.size(), false);
    for (const auto& e : p.ds.log) {
      if (e.action == Action::flagged) ds_flag[e.index] = true;
    }
    for (std::size_t k = 0; k < p.ds.series.size(); ++k) {
      out.panel.push_back(p.ds.series[k]);
      out.decimal_flagged.push_back(ds_flag[k]);
      out.bounce_flagged.push_back(p.bb.flags[k]);
    }
    out.corrections.insert(out.corrections.end(), p.ds.log.begin(), p.ds.log.end());
    out.bounces.insert(out.bounces.end(), p.bb.log.begin(), p.bb.log.end());
  }
  return out;
}

std::string to_string(Action a) {
  switch (a) {
    case Action::corrected:
      return "corrected";
    case Action::flagged:
      return "flagged";
    case Action::untouched:
      return "untouched";
  }
  return "?";
}

std::string to_string(BounceReason r) {
  switch (r) {
    case BounceReason::path_a:
      return "path_a";
    case BounceReason::path_b:
      return "path_b";
    case BounceReason::reassigned:
      return "reassigned";
    case BounceReason::extended:
      return "extended";
    case BounceReason::par_block:
      return "par_block";
  }
  return "?";
}

void write_correction_log(std::ostream& out, const CorrectionLog& log) {
  csv::Writer w(out);
  w.header({"bond_id", "seq", "action", "orig_price", "new_price", "factor", "raw_error",
            "corrected_error"});
  for (const auto& e : log) {
    w.row({e.bond_id, std::to_string(e.seq), to_string(e.action), csv::format_double(e.orig_price),
           csv::format_optional(e.new_price), csv::format_optional(e.factor),
           csv::format_double(e.raw_error), csv::format_optional(e.corrected_error)});
  }
}

void write_bounce_log(std::ostream& out, const std::vector<BounceEntry>& log) {
  csv::Writer w(out);
  w.header({"bond_id", "seq", "price", "baseline", "reason"});
  for (const auto& e : log) {
    w.row({e.bond_id, std::to_string(e.seq), csv::format_double(e.price),
           csv::format_optional(e.baseline), to_string(e.reason)});
  }
}

}  // namespace bondlab::txn
