#include "bondlab/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/panel.hpp"
#include "bondlab/stats.hpp"

namespace bondlab::portfolio {

std::string to_string(Universe v) {
  switch (v) {
    case Universe::all: return "all";
    case Universe::ig_only: return "ig_only";
    case Universe::large_only: return "large_only";
  }
  return "?";
}

std::string to_string(Weighting v) { return v == Weighting::equal ? "EW" : "VW"; }

std::string to_string(Subsample v) {
  switch (v) {
    case Subsample::all: return "all";
    case Subsample::ig: return "IG";
    case Subsample::nig: return "NIG";
  }
  return "?";
}

std::string to_string(MaturityBucket v) {
  switch (v) {
    case MaturityBucket::all: return "all";
    case MaturityBucket::short_term: return "short";
    case MaturityBucket::intermediate: return "intermediate";
    case MaturityBucket::long_term: return "long";
  }
  return "?";
}

Universe parse_universe(const std::string& s) {
  if (s == "all") return Universe::all;
  if (s == "ig_only") return Universe::ig_only;
  if (s == "large_only") return Universe::large_only;
  throw ConfigError("breakpoint_universe", "unknown value '" + s + "'");
}

Weighting parse_weighting(const std::string& s) {
  if (s == "EW" || s == "equal") return Weighting::equal;
  if (s == "VW" || s == "value") return Weighting::value;
  throw ConfigError("weighting", "unknown value '" + s + "'");
}

Subsample parse_subsample(const std::string& s) {
  if (s == "all") return Subsample::all;
  if (s == "IG" || s == "ig") return Subsample::ig;
  if (s == "NIG" || s == "nig") return Subsample::nig;
  throw ConfigError("subsample", "unknown value '" + s + "'");
}

MaturityBucket parse_bucket(const std::string& s) {
  if (s == "all") return MaturityBucket::all;
  if (s == "short") return MaturityBucket::short_term;
  if (s == "intermediate") return MaturityBucket::intermediate;
  if (s == "long") return MaturityBucket::long_term;
  throw ConfigError("maturity_bucket", "unknown value '" + s + "'");
}

void SortSpec::validate() const {
  if (n_portfolios < 2) throw ConfigError("n_portfolios", "must be at least 2");
  if (holding_months < 1) throw ConfigError("holding_months", "must be at least 1");
  if (!(edges.short_max > 0.0 && edges.long_min >= edges.short_max)) {
    throw ConfigError("maturity_edges", "need 0 < short_max <= long_min");
  }
}

std::string SortSpec::label() const {
  std::string s = "n=" + std::to_string(n_portfolios) + ";bp=" + to_string(universe) +
                  ";w=" + to_string(weighting) + ";sub=" + to_string(subsample) +
                  ";mat=" + to_string(bucket);
  if (holding_months > 1) s += ";hold=" + std::to_string(holding_months);
  return s;
}

std::vector<double> breakpoints(std::vector<double> values, int n) {
  if (n < 2) throw DomainError("need at least two portfolios");
  if (values.empty()) throw DomainError("empty breakpoint universe");
  std::sort(values.begin(), values.end());
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    cuts.push_back(stats::quantile_sorted(values, static_cast<double>(k) / n));
  }
  return cuts;
}

std::vector<int> assign(std::span<const double> values, std::span<const double> cutoffs) {
  std::vector<int> out(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    const auto pos = std::lower_bound(cutoffs.begin(), cutoffs.end(), values[i]);
    out[i] = static_cast<int>(pos - cutoffs.begin()) + 1;
  }
  return out;
}

double leg_return(std::span<const double> returns, std::span<const double> mv,
                  Weighting weighting) {
  if (returns.empty()) throw DomainError("empty leg");
  if (weighting == Weighting::equal) return stats::mean(returns);
  if (mv.size() != returns.size()) throw DomainError("market values do not match returns");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    num += mv[i] * returns[i];
    den += mv[i];
  }
  if (!(den > 0.0)) throw DomainError("value weights sum to zero");
  return num / den;
}

bool in_subsample(const Candidate& c, Subsample s) {
  switch (s) {
    case Subsample::all: return true;
    case Subsample::ig: return is_investment_grade(c.rating);
    case Subsample::nig: return is_high_yield(c.rating);
  }
  return false;
}

bool in_bucket(const Candidate& c, MaturityBucket b, const BucketEdges& e) {
  if (b == MaturityBucket::all) return true;
  if (!c.maturity_years) return false;
  const double m = *c.maturity_years;
  switch (b) {
    case MaturityBucket::short_term: return m < e.short_max;
    case MaturityBucket::intermediate: return m >= e.short_max && m < e.long_min;
    case MaturityBucket::long_term: return m >= e.long_min;
    case MaturityBucket::all: return true;
  }
  return false;
}

PortfolioMonth form_month(std::span<const Candidate> cands, const SortSpec& spec) {
  PortfolioMonth pm;
  const auto n = static_cast<std::size_t>(spec.n_portfolios);
  pm.portfolios.resize(n);
  pm.returns.resize(n);

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i];
    if (!std::isfinite(c.signal) || !c.ret) continue;
    if (!in_subsample(c, spec.subsample) || !in_bucket(c, spec.bucket, spec.edges)) continue;
    if (spec.weighting == Weighting::value && !(c.market_value > 0.0)) continue;
    eligible.push_back(i);
  }
  if (eligible.empty()) return pm;

  std::vector<double> universe;
  if (spec.universe == Universe::large_only) {
    std::vector<double> mv;
    for (auto i : eligible) mv.push_back(cands[i].market_value);
    const double median = stats::quantile(mv, 0.5);
    for (auto i : eligible) {
      if (cands[i].market_value > median) universe.push_back(cands[i].signal);
    }
  } else {
    for (auto i : eligible) {
      if (spec.universe == Universe::all || is_investment_grade(cands[i].rating)) {
        universe.push_back(cands[i].signal);
      }
    }
  }
  if (universe.empty()) return pm;

  const auto cuts = breakpoints(std::move(universe), spec.n_portfolios);
  std::vector<double> sig;
  for (auto i : eligible) sig.push_back(cands[i].signal);
  const auto port = assign(sig, cuts);
  for (std::size_t k = 0; k < eligible.size(); ++k) {
    pm.portfolios[static_cast<std::size_t>(port[k] - 1)].push_back({eligible[k], 0.0});
  }

  for (std::size_t p = 0; p < n; ++p) {
    auto& members = pm.portfolios[p];
    if (members.empty()) continue;
    double total = 0.0;
    for (auto& m : members) {
      m.weight = spec.weighting == Weighting::equal ? 1.0 : cands[m.index].market_value;
      total += m.weight;
    }
    double r = 0.0;
    for (auto& m : members) {
      m.weight /= total;
      r += m.weight * *cands[m.index].ret;
    }
    pm.returns[p] = r;
  }
  pm.long_n = pm.portfolios.back().size();
  pm.short_n = pm.portfolios.front().size();
  if (pm.returns.back() && pm.returns.front()) {
    pm.long_short = *pm.returns.back() - *pm.returns.front();
    pm.degenerate = false;
  }
  return pm;
}

std::vector<double> FactorSeries::valid_returns() const {
  std::vector<double> out;
  for (const auto& p : points) {
    if (!p.degenerate) out.push_back(p.r_ls);
  }
  return out;
}

std::size_t FactorSeries::degenerate_months() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const auto& p) { return p.degenerate; }));
}

namespace {

// Bond weights in each leg of a formed month.
struct Cohort {
  std::vector<std::pair<std::string, double>> long_leg;
  std::vector<std::pair<std::string, double>> short_leg;
  bool valid = false;
};

std::optional<double> cohort_leg(const std::vector<std::pair<std::string, double>>& leg,
                                 const std::unordered_map<std::string, double>& returns) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& [id, w] : leg) {
    auto it = returns.find(id);
    if (it == returns.end()) continue;
    num += w * it->second;
    den += w;
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

}  // namespace

FactorSeries long_short(std::span<const CrossSection> months, const SortSpec& spec) {
  spec.validate();
  FactorSeries out;
  std::vector<Cohort> cohorts;
  for (std::size_t k = 0; k < months.size(); ++k) {
    const auto& cs = months[k];
    const auto pm = form_month(cs.rows, spec);
    FactorPoint pt;
    pt.month = cs.month + std::chrono::months{1};
    pt.long_n = pm.long_n;
    pt.short_n = pm.short_n;
    if (spec.holding_months == 1) {
      pt.degenerate = pm.degenerate;
      pt.r_ls = pm.long_short.value_or(std::nan(""));
      out.points.push_back(pt);
      continue;
    }

    Cohort c;
    c.valid = !pm.degenerate;
    for (const auto& m : pm.long_leg()) c.long_leg.emplace_back(cs.rows[m.index].bond_id, m.weight);
    for (const auto& m : pm.short_leg()) {
      c.short_leg.emplace_back(cs.rows[m.index].bond_id, m.weight);
    }
    cohorts.push_back(std::move(c));

    std::unordered_map<std::string, double> returns;
    for (const auto& r : cs.rows) {
      if (r.ret) returns.emplace(r.bond_id, *r.ret);
    }
    double sum = 0.0;
    int live = 0;
    const std::size_t first =
        cohorts.size() > static_cast<std::size_t>(spec.holding_months)
            ? cohorts.size() - static_cast<std::size_t>(spec.holding_months)
            : 0;
    for (std::size_t j = first; j < cohorts.size(); ++j) {
      if (!cohorts[j].valid) continue;
      const auto rl = cohort_leg(cohorts[j].long_leg, returns);
      const auto rs = cohort_leg(cohorts[j].short_leg, returns);
      if (!rl || !rs) continue;
      sum += *rl - *rs;
      ++live;
    }
    pt.degenerate = live == 0;
    pt.r_ls = live ? sum / live : std::nan("");
    out.points.push_back(pt);
  }
  return out;
}

WithinFirmResult within_firm_factor(std::span<const Candidate> cands, Weighting weighting) {
  std::map<std::string, std::vector<std::size_t>> firms;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!std::isfinite(cands[i].signal) || !cands[i].ret) continue;
    firms[cands[i].firm_id].push_back(i);
  }
  double num = 0.0;
  double den = 0.0;
  WithinFirmResult out;
  for (auto& [firm, idx] : firms) {
    if (idx.size() < 2) continue;
    std::sort(idx.begin(), idx.end(),
              [&](auto a, auto b) { return cands[a].bond_id < cands[b].bond_id; });
    double hi = -INFINITY;
    double lo = INFINITY;
    double mv = 0.0;
    for (auto i : idx) {
      hi = std::max(hi, cands[i].signal);
      lo = std::min(lo, cands[i].signal);
      mv += cands[i].market_value;
    }
    if (hi == lo) continue;
    std::vector<double> rl;
    std::vector<double> rs;
    for (auto i : idx) {
      if (cands[i].signal == hi) rl.push_back(*cands[i].ret);
      if (cands[i].signal == lo) rs.push_back(*cands[i].ret);
    }
    const double ls = stats::mean(rl) - stats::mean(rs);
    const double w = weighting == Weighting::equal ? 1.0 : mv;
    if (!(w > 0.0)) continue;
    num += w * ls;
    den += w;
    ++out.firms;
  }
  if (den > 0.0) out.value = num / den;
  return out;
}

FactorSeries within_firm_series(std::span<const CrossSection> months, Weighting weighting) {
  FactorSeries out;
  for (const auto& cs : months) {
    const auto r = within_firm_factor(cs.rows, weighting);
    FactorPoint pt;
    pt.month = cs.month + std::chrono::months{1};
    pt.long_n = pt.short_n = r.firms;
    pt.degenerate = !r.value;
    pt.r_ls = r.value.value_or(std::nan(""));
    out.points.push_back(pt);
  }
  return out;
}

void write_factor(std::ostream& out, const FactorSeries& series) {
  csv::Writer w(out);
  w.header({"month", "r_ls", "long_n", "short_n", "degenerate"});
  for (const auto& p : series.points) {
    w.row({format_month(p.month), p.degenerate ? "" : csv::format_double(p.r_ls),
           std::to_string(p.long_n), std::to_string(p.short_n), p.degenerate ? "1" : "0"});
  }
}

}  // namespace bondlab::portfolio
