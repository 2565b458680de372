#include "bondlab/returns.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/parallel.hpp"

namespace bondlab::returns {
namespace {

double checked_ratio(double num, double den, const char* what) {
  if (!(den > 0.0)) {
    throw ComputationError(std::string(what) + ": nonpositive denominator " + std::to_string(den));
  }
  return num / den - 1.0;
}

Month next_month(Month m) { return m + std::chrono::months{1}; }

}  // namespace

std::string format_flags(const ReturnFlags& f) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(f.default_event, "default_event");
  add(f.trading_in_default, "trading_in_default");
  add(f.capped, "capped");
  add(f.begin_discarded, "begin_discarded");
  return out;
}

EndReturn month_end_return(const BondMonth& t, const BondMonth& t1) {
  if (!t.p_end || !t1.p_end) throw ComputationError("month-end return needs both month-end prices");
  const double p0 = t.p_end->price;
  const double p1 = t1.p_end->price;
  const double standard =
      checked_ratio(p1 + t1.ai_end + t.coupon_next, p0 + t.ai_end, "month-end return");
  EndReturn out;
  if (!t.in_default && t1.in_default) {
    out.flags.default_event = true;
    out.value = checked_ratio(p1, p0 + t.ai_end, "default-event return");
  } else if (t.in_default && t1.in_default) {
    out.flags.trading_in_default = true;
    const double flat = checked_ratio(p1, p0, "flat return");
    if (standard < flat) {
      out.value = standard;
      out.flags.capped = true;
    } else {
      out.value = flat;
    }
  } else {
    out.value = standard;
  }
  return out;
}

std::optional<double> month_begin_return(const BondMonth& t, const BondMonth& t1) {
  if (!t.p_bgn_next || !t1.p_end) return std::nullopt;
  const double ai_bgn = t.ai_bgn_next.value_or(t.ai_end);
  if (t1.in_default) {
    const double den = t.in_default ? t.p_bgn_next->price : t.p_bgn_next->price + ai_bgn;
    return checked_ratio(t1.p_end->price, den, "month-begin return");
  }
  return checked_ratio(t1.p_end->price + t1.ai_end + t.coupon_next, t.p_bgn_next->price + ai_bgn,
                       "month-begin return");
}

double lib_component(double p_end_t, double p_bgn_t1) {
  return checked_ratio(p_bgn_t1, p_end_t, "LIB");
}

void KeyRateTable::add(Month m, double duration, double ret) {
  auto& v = table_[month_index(m)];
  auto pos = std::lower_bound(v.begin(), v.end(), duration,
                              [](const KeyRateNode& n, double d) { return n.duration < d; });
  if (pos != v.end() && pos->duration == duration) {
    throw ConfigError("key_rates", "duplicate node " + std::to_string(duration) + " in " +
                                       format_month(m));
  }
  v.insert(pos, {duration, ret});
}

const std::vector<KeyRateNode>& KeyRateTable::nodes(Month m) const {
  auto it = table_.find(month_index(m));
  if (it == table_.end() || it->second.empty()) {
    throw ConfigError("key_rates", "no Treasury key-rate nodes for " + format_month(m));
  }
  return it->second;
}

KeyRateTable KeyRateTable::load(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  const auto cm = t.require("month");
  const auto cd = t.require("duration");
  const auto cr = t.require("return");
  KeyRateTable out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& f = t.row(r);
    out.add(parse_month(f[cm]), csv::parse_double(f[cd], r + 1, "duration"),
            csv::parse_double(f[cr], r + 1, "return"));
  }
  return out;
}

double RiskFreeSeries::at(Month m) const {
  auto it = rates_.find(month_index(m));
  if (it == rates_.end()) throw ConfigError("risk_free", "no risk-free rate for " + format_month(m));
  return it->second;
}

RiskFreeSeries RiskFreeSeries::load(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  const auto cm = t.require("month");
  const auto cr = t.require("rf");
  RiskFreeSeries out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.set(parse_month(t.row(r)[cm]), csv::parse_double(t.row(r)[cr], r + 1, "rf"));
  }
  return out;
}

double duration_adjusted(double r, double duration, const std::vector<KeyRateNode>& nodes) {
  if (nodes.empty()) throw ConfigError("key_rates", "empty key-rate table");
  double tsy = 0.0;
  if (duration <= nodes.front().duration) {
    tsy = nodes.front().ret;
  } else if (duration >= nodes.back().duration) {
    tsy = nodes.back().ret;
  } else {
    auto hi = std::upper_bound(nodes.begin(), nodes.end(), duration,
                               [](double d, const KeyRateNode& n) { return d < n.duration; });
    auto lo = hi - 1;
    const double w = (duration - lo->duration) / (hi->duration - lo->duration);
    tsy = lo->ret + w * (hi->ret - lo->ret);
  }
  return r - tsy;
}

TradingCalendar calendar_for(const DailyPanel& daily, std::span<const Date> holidays) {
  if (daily.empty()) throw RangeError("empty daily panel");
  auto [lo, hi] = std::minmax_element(daily.begin(), daily.end(),
                                      [](const auto& a, const auto& b) { return a.date < b.date; });
  const int y0 = static_cast<int>(std::chrono::year_month_day{lo->date}.year());
  const int y1 = static_cast<int>(std::chrono::year_month_day{hi->date}.year());
  return TradingCalendar::for_years(y0, y1 + 1, holidays);
}

MonthlyPanel select_monthly_prices(const DailyPanel& daily_in, const TradingCalendar& calendar,
                                   const SelectionOptions& options, SelectionLog* log) {
  DailyPanel daily = daily_in;
  sort_panel(daily);
  MonthlyPanel out;
  const auto runs = group_runs(daily.size(), [&](std::size_t i) { return daily[i].bond_id; });

  for (const auto& [lo, hi] : runs) {
    std::span<const DailyBondRecord> bond(daily.data() + lo, hi - lo);
    const Month first = month_of(bond.front().date);
    const Month last = month_of(bond.back().date);

    // Last record with date in [from, to]; nullptr if none.
    auto last_in = [&](Date from, Date to) -> const DailyBondRecord* {
      const DailyBondRecord* best = nullptr;
      for (const auto& r : bond) {
        if (r.date >= from && r.date <= to) best = &r;
      }
      return best;
    };
    auto first_in = [&](Date from, Date to) -> const DailyBondRecord* {
      for (const auto& r : bond) {
        if (r.date >= from && r.date <= to) return &r;
      }
      return nullptr;
    };

    struct Extra {
      const DailyBondRecord* end = nullptr;
      const DailyBondRecord* gap = nullptr;
    };
    std::vector<BondMonth> cells;
    std::vector<Extra> extras;

    for (Month m = first; month_index(m) <= month_index(last); m = next_month(m)) {
      if (!calendar.covers(m)) throw RangeError("calendar does not cover " + format_month(m));
      const auto end_win = window_dates(calendar, m, WindowSide::last_n, options.window);
      const auto bgn_win = calendar.covers(next_month(m))
                               ? window_dates(calendar, next_month(m), WindowSide::first_n,
                                              options.window)
                               : std::vector<Date>{};
      const DailyBondRecord* end_rec =
          end_win.empty() ? nullptr : last_in(end_win.front(), end_win.back());
      const DailyBondRecord* bgn_rec =
          bgn_win.empty() ? nullptr : first_in(bgn_win.front(), bgn_win.back());
      if (end_rec && bgn_rec && !(bgn_rec->date > end_rec->date)) {
        if (log) {
          log->messages.push_back(bond.front().bond_id + " " + format_month(m) +
                                  ": month-begin price discarded (no gap)");
        }
        bgn_rec = nullptr;
      }
      if (!end_rec && !bgn_rec) continue;

      BondMonth cell;
      cell.bond_id = bond.front().bond_id;
      cell.firm_id = cell.bond_id;
      cell.month = m;
      const DailyBondRecord* state = last_in(first_day(m), last_day(m));
      if (end_rec) {
        cell.p_end = DatedPrice{end_rec->vwap_price, end_rec->date};
        cell.ai_end = end_rec->accrued_interest;
        cell.duration = end_rec->duration;
        cell.market_value = (end_rec->vwap_price + end_rec->accrued_interest) / 100.0 *
                            end_rec->amount_outstanding;
      }
      if (bgn_rec) {
        cell.p_bgn_next = DatedPrice{bgn_rec->vwap_price, bgn_rec->date};
        cell.ai_bgn_next = bgn_rec->accrued_interest;
      }
      if (state) {
        const bool d = (state->rating_sp && *state->rating_sp == 22) ||
                       (state->rating_moody && *state->rating_moody == 21);
        cell.in_default = d;
        cell.rating = d ? kDefaultRating : state->rating_sp.value_or(state->rating_moody.value_or(0));
      }
      const Date after = end_rec ? end_rec->date : last_day(m);
      for (const auto& r : bond) {
        if (r.date > after && month_of(r.date) == next_month(m)) cell.coupon_next += r.coupon_paid;
      }

      Extra ex;
      ex.end = end_rec;
      if (end_rec) {
        for (const auto& r : bond) {
          if (r.date >= end_rec->date) break;
          const auto gap = calendar.business_days_between(r.date, end_rec->date);
          if (gap >= 1 && gap <= static_cast<std::ptrdiff_t>(options.max_gap)) ex.gap = &r;
        }
      }
      cells.push_back(std::move(cell));
      extras.push_back(ex);
    }

    if (options.reversal_signal) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        double sig = std::nan("");
        double gap = std::nan("");
        if (k > 0 && month_index(cells[k].month) == month_index(cells[k - 1].month) + 1 &&
            extras[k - 1].end && extras[k].end) {
          const auto* prev = extras[k - 1].end;
          const double den = prev->vwap_price + prev->accrued_interest;
          auto coupons_until = [&](Date to) {
            double c = 0.0;
            for (const auto& r : bond) {
              if (r.date > prev->date && r.date <= to) c += r.coupon_paid;
            }
            return c;
          };
          const auto* cur = extras[k].end;
          sig = -((cur->vwap_price + cur->accrued_interest + coupons_until(cur->date)) / den - 1.0);
          if (const auto* g = extras[k].gap; g && g->date > prev->date) {
            gap = -((g->vwap_price + g->accrued_interest + coupons_until(g->date)) / den - 1.0);
          }
        }
        cells[k].signals["str"] = sig;
        cells[k].signals_gapped["str"] = gap;
      }
    }
    for (auto& c : cells) out.push_back(std::move(c));
  }
  sort_panel(out);
  return out;
}

FactorPanel build_factor_panel(MonthlyPanel panel, const ReturnContext& ctx,
                               std::vector<std::string>* log) {
  sort_panel(panel);
  const auto runs = group_runs(panel.size(), [&](std::size_t i) { return panel[i].bond_id; });

  std::map<int, std::vector<FormationRow>> by_month;
  for (const auto& [lo, hi] : runs) {
    std::vector<FormationRow> rows;
    rows.reserve(hi - lo);
    std::optional<double> last_price;
    for (std::size_t k = lo; k < hi; ++k) {
      FormationRow row;
      row.cell = std::move(panel[k]);
      row.p_end_prev = last_price;
      if (row.cell.p_end) last_price = row.cell.p_end->price;
      auto& cell = row.cell;
      if (cell.p_bgn_next && cell.p_end && !(cell.p_bgn_next->date > cell.p_end->date)) {
        if (log) {
          log->push_back(cell.bond_id + " " + format_month(cell.month) +
                         ": month-begin price discarded (no gap)");
        }
        cell.p_bgn_next.reset();
        row.fwd.flags.begin_discarded = true;
      }
      if (cell.p_end && cell.p_bgn_next) {
        row.fwd.lib = lib_component(cell.p_end->price, cell.p_bgn_next->price);
      }
      const bool has_next =
          k + 1 < hi && month_index(panel[k + 1].month) == month_index(cell.month) + 1;
      if (has_next) {
        const BondMonth& nxt = panel[k + 1];
        const Month realized = nxt.month;
        if (cell.p_end && nxt.p_end) {
          const auto er = month_end_return(cell, nxt);
          row.fwd.r_end = er.value;
          const bool discarded = row.fwd.flags.begin_discarded;
          row.fwd.flags = er.flags;
          row.fwd.flags.begin_discarded = discarded;
          if (ctx.risk_free) row.fwd.r_excess = er.value - ctx.risk_free->at(realized);
          if (ctx.key_rates && cell.duration) {
            row.fwd.r_duradj =
                duration_adjusted(er.value, *cell.duration, ctx.key_rates->nodes(realized));
          }
        }
        row.fwd.r_bgn = month_begin_return(cell, nxt);
      }
      rows.push_back(std::move(row));
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (month_index(rows[k].cell.month) == month_index(rows[k - 1].cell.month) + 1) {
        rows[k].r_prev = rows[k - 1].fwd.r_end;
      }
    }
    for (auto& r : rows) by_month[month_index(r.cell.month)].push_back(std::move(r));
  }

  FactorPanel out;
  for (auto& [idx, rows] : by_month) {
    out.months.push_back(rows.front().cell.month);
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.cell.bond_id < b.cell.bond_id; });
    out.rows.push_back(std::move(rows));
  }
  return out;
}

std::vector<std::pair<Month, double>> market_factor(const FactorPanel& panel) {
  std::vector<std::pair<Month, double>> out;
  for (std::size_t k = 0; k < panel.size(); ++k) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& row : panel.rows[k]) {
      if (!row.fwd.r_end || !(row.cell.market_value > 0.0)) continue;
      const double x = row.fwd.r_excess.value_or(*row.fwd.r_end);
      num += row.cell.market_value * x;
      den += row.cell.market_value;
    }
    if (den > 0.0) out.emplace_back(next_month(panel.months[k]), num / den);
  }
  return out;
}

void write_monthly_returns(std::ostream& out, const FactorPanel& panel) {
  MonthlyPanel cells;
  for (const auto& month : panel.rows) {
    for (const auto& r : month) cells.push_back(r.cell);
  }
  auto cols = monthly_columns(cells);
  csv::Writer w(out);
  auto header = cols;
  for (const char* c : {"r_end", "r_bgn", "lib", "r_excess", "r_duradj", "flags"}) {
    header.push_back(c);
  }
  w.header(header);
  // Rows in (bond_id, month) order to mirror the input schema.
  std::vector<const FormationRow*> order;
  for (const auto& month : panel.rows) {
    for (const auto& r : month) order.push_back(&r);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->cell.bond_id != b->cell.bond_id) return a->cell.bond_id < b->cell.bond_id;
    return a->cell.month < b->cell.month;
  });
  for (const auto* r : order) {
    auto fields = monthly_fields(r->cell, cols);
    fields.push_back(csv::format_optional(r->fwd.r_end));
    fields.push_back(csv::format_optional(r->fwd.r_bgn));
    fields.push_back(csv::format_optional(r->fwd.lib));
    fields.push_back(csv::format_optional(r->fwd.r_excess));
    fields.push_back(csv::format_optional(r->fwd.r_duradj));
    fields.push_back(format_flags(r->fwd.flags));
    w.row(fields);
  }
}

}  // namespace bondlab::returns
