#include "bondlab/bias_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/stats.hpp"

namespace bondlab::bias {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lookup(const std::map<std::string, double>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? std::nan("") : it->second;
}

bool breaches(double r, const Thresholds& t) { return r < t.lower || r > t.upper; }

}  // namespace

std::string to_string(Approach a) {
  switch (a) {
    case Approach::unadjusted: return "unadjusted";
    case Approach::adjusted_signal: return "adjusted_signal";
    case Approach::adjusted_return: return "adjusted_return";
  }
  return "?";
}

Approach parse_approach(const std::string& s) {
  if (s == "unadjusted" || s == "1") return Approach::unadjusted;
  if (s == "adjusted_signal" || s == "2") return Approach::adjusted_signal;
  if (s == "adjusted_return" || s == "3") return Approach::adjusted_return;
  throw ConfigError("approach", "unknown value '" + s + "'");
}

void require_signal(const returns::FactorPanel& panel, const std::string& signal,
                    Approach approach) {
  const bool gapped = approach == Approach::adjusted_signal;
  for (const auto& month : panel.rows) {
    for (const auto& r : month) {
      if ((gapped ? r.cell.signals_gapped : r.cell.signals).count(signal)) return;
    }
  }
  if (panel.rows.empty()) return;
  throw ConfigError("signal", std::string(gapped ? "gapped column sig_gap_" : "column sig_") +
                                  signal + " not present in the panel");
}

portfolio::Candidate make_candidate(const returns::FormationRow& r, const std::string& signal,
                                   Approach approach) {
  portfolio::Candidate c;
  c.bond_id = r.cell.bond_id;
  c.firm_id = r.cell.firm_id;
  c.signal = lookup(approach == Approach::adjusted_signal ? r.cell.signals_gapped : r.cell.signals,
                    signal);
  c.ret = approach == Approach::adjusted_return ? r.fwd.r_bgn : r.fwd.r_end;
  c.market_value = r.cell.market_value;
  c.rating = r.cell.rating;
  c.maturity_years = r.cell.maturity_years;
  return c;
}

std::vector<portfolio::CrossSection> cross_sections(const returns::FactorPanel& panel,
                                                    const std::string& signal, Approach approach) {
  require_signal(panel, signal, approach);
  std::vector<portfolio::CrossSection> out(panel.size());
  for (std::size_t k = 0; k < panel.size(); ++k) {
    out[k].month = panel.months[k];
    for (const auto& r : panel.rows[k]) {
      if (!r.excluded) out[k].rows.push_back(make_candidate(r, signal, approach));
    }
  }
  return out;
}

Weights signed_weights(const portfolio::PortfolioMonth& pm,
                       std::span<const portfolio::Candidate> cands) {
  Weights w;
  if (pm.degenerate) return w;
  for (const auto& m : pm.long_leg()) w[cands[m.index].bond_id] += m.weight;
  for (const auto& m : pm.short_leg()) w[cands[m.index].bond_id] -= m.weight;
  return w;
}

BuiltFactor build_factor(const returns::FactorPanel& panel, const std::string& signal,
                         const portfolio::SortSpec& spec, Approach approach) {
  spec.validate();
  const auto cs = cross_sections(panel, signal, approach);
  BuiltFactor out;
  out.weights.resize(cs.size());
  out.long_ret.resize(cs.size());
  out.short_ret.resize(cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const auto pm = portfolio::form_month(cs[k].rows, spec);
    out.weights[k] = signed_weights(pm, cs[k].rows);
    if (!pm.degenerate) {
      out.long_ret[k] = pm.returns.back();
      out.short_ret[k] = pm.returns.front();
    }
    if (spec.holding_months == 1) {
      portfolio::FactorPoint pt;
      pt.month = cs[k].month + std::chrono::months{1};
      pt.long_n = pm.long_n;
      pt.short_n = pm.short_n;
      pt.degenerate = pm.degenerate;
      pt.r_ls = pm.long_short.value_or(std::nan(""));
      out.series.points.push_back(pt);
    }
  }
  if (spec.holding_months > 1) out.series = portfolio::long_short(cs, spec);
  return out;
}

double bias_1_2(const Weights& w, const Weights& w_a, const ReturnMap& r_end) {
  double s = 0.0;
  for (const auto& [id, r] : r_end) {
    const double a = w.count(id) ? w.at(id) : 0.0;
    const double b = w_a.count(id) ? w_a.at(id) : 0.0;
    s += (a - b) * r;
  }
  return s;
}

double bias_1_3(const Weights& w, const ReturnMap& r_end, const ReturnMap& r_bgn) {
  double s = 0.0;
  for (const auto& [id, wi] : w) {
    auto e = r_end.find(id);
    auto b = r_bgn.find(id);
    if (e == r_end.end() || b == r_bgn.end()) continue;
    s += wi * (e->second - b->second);
  }
  return s;
}

ReturnMap end_returns(const std::vector<returns::FormationRow>& rows) {
  ReturnMap m;
  for (const auto& r : rows) {
    if (!r.excluded && r.fwd.r_end) m[r.cell.bond_id] = *r.fwd.r_end;
  }
  return m;
}

ReturnMap begin_returns(const std::vector<returns::FormationRow>& rows) {
  ReturnMap m;
  for (const auto& r : rows) {
    if (!r.excluded && r.fwd.r_bgn) m[r.cell.bond_id] = *r.fwd.r_bgn;
  }
  return m;
}

BiasSeries bias_series(const returns::FactorPanel& panel, const BuiltFactor& unadjusted,
                       const BuiltFactor& gapped) {
  if (unadjusted.weights.size() != panel.size() || gapped.weights.size() != panel.size()) {
    throw DomainError("factor weights do not match the panel months");
  }
  BiasSeries out;
  for (std::size_t k = 0; k < panel.size(); ++k) {
    if (unadjusted.weights[k].empty()) continue;
    const auto re = end_returns(panel.rows[k]);
    const auto rb = begin_returns(panel.rows[k]);
    out.months.push_back(panel.months[k] + std::chrono::months{1});
    out.bias_1_2.push_back(bias_1_2(unadjusted.weights[k], gapped.weights[k], re));
    out.bias_1_3.push_back(bias_1_3(unadjusted.weights[k], re, rb));
  }
  return out;
}

std::string to_string(FilterMode m) { return m == FilterMode::winsorize ? "winsorize" : "trim"; }

std::string to_string(Tail t) {
  switch (t) {
    case Tail::left: return "left";
    case Tail::right: return "right";
    case Tail::both: return "both";
  }
  return "?";
}

std::string to_string(InfoSet s) { return s == InfoSet::ex_post ? "ex_post" : "ex_ante"; }

FilterMode parse_filter_mode(const std::string& s) {
  if (s == "winsorize") return FilterMode::winsorize;
  if (s == "trim") return FilterMode::trim;
  throw ConfigError("mode", "unknown value '" + s + "'");
}

Tail parse_tail(const std::string& s) {
  if (s == "left") return Tail::left;
  if (s == "right") return Tail::right;
  if (s == "both") return Tail::both;
  throw ConfigError("tail", "unknown value '" + s + "'");
}

InfoSet parse_info_set(const std::string& s) {
  if (s == "ex_post") return InfoSet::ex_post;
  if (s == "ex_ante") return InfoSet::ex_ante;
  throw ConfigError("info", "unknown value '" + s + "'");
}

void FilterRule::validate() const {
  if (q.has_value() == tau.has_value()) {
    throw ConfigError("filter", "exactly one of q and tau must be set");
  }
  if (q && !(*q > 0.0 && *q <= 0.5)) throw ConfigError("q", "must lie in (0, 0.5]");
  if (tau && !(*tau > 0.0)) throw ConfigError("tau", "must be positive");
  if (burn_in < 1) throw ConfigError("burn_in", "must be at least 1");
}

std::string FilterRule::label() const {
  std::string s = to_string(mode) + ":" + to_string(tail) + ":" + to_string(info) + ":";
  s += q ? "q=" + csv::format_double(*q) : "tau=" + csv::format_double(*tau);
  if (cross_sectional) s += ":xs";
  return s;
}

std::vector<std::optional<Thresholds>> threshold_path(const returns::FactorPanel& panel,
                                                      const FilterRule& rule) {
  rule.validate();
  const std::size_t T = panel.size();
  std::vector<std::optional<Thresholds>> out(T);
  const bool left = rule.tail != Tail::right;
  const bool right = rule.tail != Tail::left;

  if (rule.tau) {
    for (auto& t : out) t = Thresholds{left ? -*rule.tau : -kInf, right ? *rule.tau : kInf};
    return out;
  }
  const double q = *rule.q;
  auto from_sorted = [&](const std::vector<double>& v) -> std::optional<Thresholds> {
    if (v.size() < 2) return std::nullopt;
    return Thresholds{left ? stats::quantile_sorted(v, q) : -kInf,
                      right ? stats::quantile_sorted(v, 1.0 - q) : kInf};
  };
  auto month_returns = [&](std::size_t k) {
    std::vector<double> v;
    for (const auto& r : panel.rows[k]) {
      if (r.fwd.r_end) v.push_back(*r.fwd.r_end);
    }
    std::sort(v.begin(), v.end());
    return v;
  };

  if (rule.cross_sectional) {
    for (std::size_t k = 0; k < T; ++k) {
      if (rule.info == InfoSet::ex_post) {
        out[k] = from_sorted(month_returns(k));
      } else if (k > 0 && panel.months[k - 1] + std::chrono::months{1} == panel.months[k]) {
        out[k] = from_sorted(month_returns(k - 1));
      }
    }
    return out;
  }

  if (rule.info == InfoSet::ex_post) {
    std::vector<double> all;
    for (std::size_t k = 0; k < T; ++k) {
      const auto v = month_returns(k);
      all.insert(all.end(), v.begin(), v.end());
    }
    std::sort(all.begin(), all.end());
    const auto th = from_sorted(all);
    for (auto& t : out) t = th;
    return out;
  }

  // Ex ante: returns realized by formation month k are those of formation
  // months j < k.
  std::vector<double> pool;
  int realized_months = 0;
  for (std::size_t k = 0; k < T; ++k) {
    if (realized_months >= rule.burn_in) out[k] = from_sorted(pool);
    const auto v = month_returns(k);
    if (!v.empty()) {
      ++realized_months;
      std::vector<double> merged;
      merged.reserve(pool.size() + v.size());
      std::merge(pool.begin(), pool.end(), v.begin(), v.end(), std::back_inserter(merged));
      pool.swap(merged);
    }
  }
  return out;
}

std::optional<Thresholds> thresholds(const returns::FactorPanel& panel, const FilterRule& rule,
                                     std::size_t k) {
  if (k >= panel.size()) throw RangeError("formation month index out of range");
  return threshold_path(panel, rule)[k];
}

FilterOutcome apply_filter_rule(const returns::FactorPanel& panel, const FilterRule& rule) {
  FilterOutcome out;
  out.panel = panel;
  out.thresholds = threshold_path(panel, rule);
  for (std::size_t k = 0; k < out.panel.size(); ++k) {
    const auto& th = out.thresholds[k];
    if (!th) continue;
    for (auto& row : out.panel.rows[k]) {
      if (rule.mode == FilterMode::winsorize) {
        if (!row.fwd.r_end) continue;
        const double raw = *row.fwd.r_end;
        const double adj = std::clamp(raw, th->lower, th->upper);
        if (adj != raw) {
          row.fwd.r_end = adj;
          out.log.push_back({row.cell.bond_id, row.cell.month, raw, adj, false, {}});
        }
      } else if (rule.info == InfoSet::ex_post) {
        if (row.fwd.r_end && breaches(*row.fwd.r_end, *th)) {
          row.excluded = true;
          out.log.push_back(
              {row.cell.bond_id, row.cell.month, *row.fwd.r_end, *row.fwd.r_end, true, {}});
        }
      } else {
        if (row.r_prev && breaches(*row.r_prev, *th)) {
          row.excluded = true;
          out.log.push_back({row.cell.bond_id, row.cell.month, *row.r_prev, *row.r_prev, true, {}});
        }
      }
    }
  }
  return out;
}

LabPoint lab(std::span<const double> long_deltas, std::span<const double> short_deltas) {
  LabPoint p;
  p.lab_long = long_deltas.empty() ? 0.0 : stats::mean(long_deltas);
  p.lab_short = short_deltas.empty() ? 0.0 : stats::mean(short_deltas);
  p.lab = p.lab_long - p.lab_short;
  return p;
}

LabPoint weighted_lab(const Weights& w, const ReturnMap& delta) {
  LabPoint p;
  for (const auto& [id, d] : delta) {
    auto it = w.find(id);
    if (it == w.end()) continue;
    if (it->second > 0.0) p.lab_long += it->second * d;
    if (it->second < 0.0) p.lab_short += -it->second * d;
  }
  p.lab = p.lab_long - p.lab_short;
  return p;
}

LabSeries lab_series(const returns::FactorPanel& base_panel, const FilterOutcome& filtered,
                     const std::string& signal, const portfolio::SortSpec& spec,
                     const FilterRule& rule) {
  if (filtered.panel.size() != base_panel.size()) {
    throw DomainError("filtered panel does not match the base panel");
  }
  auto one_period = spec;
  one_period.holding_months = 1;
  const auto base = build_factor(base_panel, signal, one_period, Approach::unadjusted);
  const auto filt = build_factor(filtered.panel, signal, one_period, Approach::unadjusted);

  LabSeries out;
  out.deltas = filtered.log;
  std::map<std::pair<int, std::string>, std::size_t> where;
  for (std::size_t i = 0; i < out.deltas.size(); ++i) {
    where[{month_index(out.deltas[i].month), out.deltas[i].bond_id}] = i;
  }
  for (std::size_t k = 0; k < base_panel.size(); ++k) {
    for (const auto& [id, w] : base.weights[k]) {
      auto it = where.find({month_index(base_panel.months[k]), id});
      if (it != where.end()) out.deltas[it->second].leg = w > 0.0 ? "long" : "short";
    }
    if (base.series.points[k].degenerate || filt.series.points[k].degenerate) continue;
    LabPoint p;
    if (rule.mode == FilterMode::winsorize) {
      ReturnMap delta;
      const auto raw = end_returns(base_panel.rows[k]);
      const auto adj = end_returns(filtered.panel.rows[k]);
      for (const auto& [id, r] : raw) {
        auto a = adj.find(id);
        if (a != adj.end() && a->second != r) delta[id] = a->second - r;
      }
      p = weighted_lab(base.weights[k], delta);
    } else {
      p.lab_long = *filt.long_ret[k] - *base.long_ret[k];
      p.lab_short = *filt.short_ret[k] - *base.short_ret[k];
      p.lab = p.lab_long - p.lab_short;
    }
    out.months.push_back(base_panel.months[k] + std::chrono::months{1});
    out.points.push_back(p);
  }
  return out;
}

void write_lab(std::ostream& out, const LabSeries& series, const std::map<int, double>* vix) {
  csv::Writer w(out);
  w.header({"month", "lab", "lab_long", "lab_short", "vix_optional"});
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& p = series.points[i];
    std::string v;
    if (vix) {
      auto it = vix->find(month_index(series.months[i]));
      if (it != vix->end()) v = csv::format_double(it->second);
    }
    w.row({format_month(series.months[i]), csv::format_double(p.lab),
           csv::format_double(p.lab_long), csv::format_double(p.lab_short), v});
  }
}

void write_delta_log(std::ostream& out, const std::vector<DeltaEntry>& log) {
  csv::Writer w(out);
  w.header({"bond_id", "month", "leg", "raw", "adjusted", "excluded"});
  for (const auto& e : log) {
    w.row({e.bond_id, format_month(e.month), e.leg, csv::format_double(e.raw),
           csv::format_double(e.adjusted), e.excluded ? "1" : "0"});
  }
}

}  // namespace bondlab::bias
