#include "bondlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/parallel.hpp"

namespace bondlab::grid {
namespace {

std::string fmt(double v) { return csv::format_double(v); }

std::string to_string(PriceMode m) {
  switch (m) {
    case PriceMode::lower_only: return "lower";
    case PriceMode::upper_only: return "upper";
    case PriceMode::matched: return "matched";
  }
  return "?";
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::neg: return "neg";
    case Direction::pos: return "pos";
    case Direction::both: return "both";
  }
  return "?";
}

// Decimal grid values built from integer steps to avoid drift.
double step(int i, int scale) { return static_cast<double>(i) / scale; }

struct Aligned {
  std::vector<double> factor;
  std::vector<double> market;
};

Aligned align(const portfolio::FactorSeries& s, const std::vector<std::pair<Month, double>>& mkt) {
  std::map<int, double> m;
  for (const auto& [month, v] : mkt) m[month_index(month)] = v;
  Aligned a;
  for (const auto& p : s.points) {
    if (p.degenerate) continue;
    auto it = m.find(month_index(p.month));
    if (it == m.end()) continue;
    a.factor.push_back(p.r_ls);
    a.market.push_back(it->second);
  }
  return a;
}

template <class Exclude>
PathResult run_path(const returns::FactorPanel& panel, const std::string& signal,
                    const portfolio::SortSpec& spec, const GridOptions& options,
                    Exclude&& excludes) {
  PathResult r;
  try {
    std::vector<portfolio::CrossSection> cs(panel.size());
    for (std::size_t k = 0; k < panel.size(); ++k) {
      cs[k].month = panel.months[k];
      for (const auto& row : panel.rows[k]) {
        if (row.excluded || excludes(row)) continue;
        cs[k].rows.push_back(bias::make_candidate(row, signal, options.approach));
      }
    }
    const auto series = portfolio::long_short(cs, spec);
    r.months = series.points.size();
    r.degenerate_months = series.degenerate_months();
    const auto valid = series.valid_returns();
    if (valid.size() < 2) throw ComputationError("fewer than two non-degenerate months");
    r.premium = stats::nw_mean(valid);
    if (!options.market.empty()) {
      const auto a = align(series, options.market);
      r.alpha = stats::capmb_alpha(a.factor, a.market).alpha_inference();
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::return_trim: return "return_trim";
    case Family::price_range: return "price_range";
    case Family::bid_ask_bounce: return "bid_ask_bounce";
  }
  return "?";
}

std::string DataFilterConfig::params() const {
  switch (family) {
    case Family::return_trim:
      return "tail=" + bias::to_string(tail) + ";tau=" + fmt(tau);
    case Family::price_range: {
      std::string s = "mode=" + to_string(price_mode);
      if (price_mode != PriceMode::upper_only) s += ";lower=" + fmt(lower);
      if (price_mode != PriceMode::lower_only) s += ";upper=" + fmt(upper);
      return s;
    }
    case Family::bid_ask_bounce:
      return "dir=" + to_string(direction) + ";phi=" + fmt(phi);
  }
  return {};
}

bool DataFilterConfig::excludes(const returns::FormationRow& row) const {
  switch (family) {
    case Family::return_trim: {
      if (!row.r_prev) return false;
      const double r = *row.r_prev;
      return (tail != bias::Tail::right && r < -tau) || (tail != bias::Tail::left && r > tau);
    }
    case Family::price_range: {
      if (!row.cell.p_end) return false;
      const double p = row.cell.p_end->price;
      return (price_mode != PriceMode::upper_only && p < lower) ||
             (price_mode != PriceMode::lower_only && p > upper);
    }
    case Family::bid_ask_bounce: {
      if (!row.cell.p_end || !row.p_end_prev || !(*row.p_end_prev > 0.0)) return false;
      const double change = row.cell.p_end->price / *row.p_end_prev - 1.0;
      return (direction != Direction::pos && change < -phi) ||
             (direction != Direction::neg && change > phi);
    }
  }
  return false;
}

std::vector<DataFilterConfig> enumerate_filters() {
  std::vector<DataFilterConfig> out;
  for (auto tail : {bias::Tail::left, bias::Tail::right, bias::Tail::both}) {
    for (int i = 4; i <= 19; ++i) {
      DataFilterConfig c;
      c.family = Family::return_trim;
      c.tail = tail;
      c.tau = step(i * 5, 100);
      out.push_back(c);
    }
  }
  for (int i = 1; i <= 10; ++i) {
    DataFilterConfig c;
    c.family = Family::price_range;
    c.price_mode = PriceMode::lower_only;
    c.lower = 2.0 * i;
    out.push_back(c);
  }
  for (int i = 0; i < 10; ++i) {
    DataFilterConfig c;
    c.family = Family::price_range;
    c.price_mode = PriceMode::upper_only;
    c.upper = 150.0 + 15.0 * i;
    out.push_back(c);
  }
  for (int i = 1; i <= 10; ++i) {
    DataFilterConfig c;
    c.family = Family::price_range;
    c.price_mode = PriceMode::matched;
    c.lower = 2.0 * i;
    c.upper = 300.0 - 15.0 * i;
    out.push_back(c);
  }
  for (auto dir : {Direction::neg, Direction::pos, Direction::both}) {
    for (int i = 1; i <= 10; ++i) {
      DataFilterConfig c;
      c.family = Family::bid_ask_bounce;
      c.direction = dir;
      c.phi = step(i, 100);
      out.push_back(c);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<DataFilterConfig> enumerate_data_grid() {
  std::vector<DataFilterConfig> out;
  for (const auto& f : enumerate_filters()) {
    for (auto w : {portfolio::Weighting::equal, portfolio::Weighting::value}) {
      for (auto s : {portfolio::Subsample::all, portfolio::Subsample::ig, portfolio::Subsample::nig}) {
        auto c = f;
        c.weighting = w;
        c.subsample = s;
        c.id = static_cast<int>(out.size());
        out.push_back(c);
      }
    }
  }
  return out;
}

std::optional<std::string> inadmissible_reason(const portfolio::SortSpec& spec) {
  using portfolio::Subsample;
  using portfolio::Universe;
  if (spec.universe == Universe::ig_only && spec.subsample == Subsample::nig) {
    return std::string("IG breakpoints on a NIG subsample");
  }
  if (spec.universe == Universe::ig_only && spec.subsample == Subsample::ig) {
    return std::string("IG breakpoints redundant on an IG subsample");
  }
  return std::nullopt;
}

std::vector<MethodSpec> enumerate_method_grid(bool include_inadmissible) {
  using namespace portfolio;
  std::vector<MethodSpec> out;
  int raw_id = 0;
  for (int n : {3, 5, 10}) {
    for (auto u : {Universe::all, Universe::ig_only, Universe::large_only}) {
      for (auto w : {Weighting::equal, Weighting::value}) {
        for (auto s : {Subsample::all, Subsample::ig, Subsample::nig}) {
          for (auto b : {MaturityBucket::all, MaturityBucket::short_term,
                         MaturityBucket::intermediate, MaturityBucket::long_term}) {
            MethodSpec m;
            m.id = raw_id++;
            m.spec.n_portfolios = n;
            m.spec.universe = u;
            m.spec.weighting = w;
            m.spec.subsample = s;
            m.spec.bucket = b;
            if (auto why = inadmissible_reason(m.spec)) {
              m.admissible = false;
              m.exclusion = *why;
            }
            if (m.admissible || include_inadmissible) out.push_back(std::move(m));
          }
        }
      }
    }
  }
  return out;
}

std::vector<PathResult> run_data_grid(const returns::FactorPanel& panel, const std::string& signal,
                                      std::span<const DataFilterConfig> configs,
                                      const GridOptions& options) {
  bias::require_signal(panel, signal, options.approach);
  std::vector<PathResult> out(configs.size());
  parallel_for(configs.size(), options.jobs, [&](std::size_t i) {
    const auto& c = configs[i];
    portfolio::SortSpec spec;
    spec.n_portfolios = options.n_portfolios;
    spec.weighting = c.weighting;
    spec.subsample = c.subsample;
    auto r = run_path(panel, signal, spec, options,
                      [&](const returns::FormationRow& row) { return c.excludes(row); });
    r.config_id = c.id;
    r.family = to_string(c.family);
    r.params = c.params();
    r.weighting = portfolio::to_string(c.weighting);
    r.subsample = portfolio::to_string(c.subsample);
    out[i] = std::move(r);
  });
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.config_id < b.config_id; });
  return out;
}

std::vector<PathResult> run_method_grid(const returns::FactorPanel& panel,
                                        const std::string& signal,
                                        std::span<const MethodSpec> specs,
                                        const GridOptions& options) {
  bias::require_signal(panel, signal, options.approach);
  std::vector<PathResult> out(specs.size());
  parallel_for(specs.size(), options.jobs, [&](std::size_t i) {
    const auto& m = specs[i];
    auto r = run_path(panel, signal, m.spec, options,
                      [](const returns::FormationRow&) { return false; });
    r.config_id = m.id;
    r.family = "method";
    r.params = "n=" + std::to_string(m.spec.n_portfolios) +
               ";bp=" + portfolio::to_string(m.spec.universe) +
               ";mat=" + portfolio::to_string(m.spec.bucket);
    r.weighting = portfolio::to_string(m.spec.weighting);
    r.subsample = portfolio::to_string(m.spec.subsample);
    out[i] = std::move(r);
  });
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.config_id < b.config_id; });
  return out;
}

NseSummary summarize(std::span<const PathResult> results) {
  NseSummary s;
  s.paths = results.size();
  std::vector<double> prem, prem_se, alpha, alpha_se;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++s.failed;
      continue;
    }
    if (r.degenerate_months > 0) {
      ++s.degenerate_excluded;
      continue;
    }
    ++s.used;
    prem.push_back(r.premium->estimate);
    prem_se.push_back(r.premium->se);
    if (r.alpha) {
      alpha.push_back(r.alpha->estimate);
      alpha_se.push_back(r.alpha->se);
    }
  }
  auto ratio = [](const std::vector<double>& est,
                  const std::vector<double>& se) -> std::optional<double> {
    if (stats::sample_sd(est) == 0.0) return 0.0;
    if (!(stats::mean(se) > 0.0)) return std::nullopt;
    return stats::nse_ratio(est, se);
  };
  if (!prem.empty()) {
    s.premium_median = stats::quantile(prem, 0.5);
    s.premium_nse = stats::nse(prem);
    s.premium_ratio = ratio(prem, prem_se);
  }
  if (!alpha.empty()) {
    s.alpha_nse = stats::nse(alpha);
    s.alpha_ratio = ratio(alpha, alpha_se);
  }
  return s;
}

void write_grid(std::ostream& out, std::span<const PathResult> results) {
  csv::Writer w(out);
  w.header({"config_id", "family", "params", "weighting", "subsample", "premium", "prem_t",
            "alpha", "alpha_t", "months", "degenerate_months"});
  for (const auto& r : results) {
    auto est = [](const std::optional<stats::InferenceResult>& x) {
      return x ? fmt(x->estimate) : std::string();
    };
    auto tst = [](const std::optional<stats::InferenceResult>& x) {
      return x ? csv::format_optional(x->t) : std::string();
    };
    w.row({std::to_string(r.config_id), r.family, r.params, r.weighting, r.subsample,
           est(r.premium), tst(r.premium), est(r.alpha), tst(r.alpha), std::to_string(r.months),
           std::to_string(r.degenerate_months)});
  }
}

void write_data_manifest(std::ostream& out, std::span<const DataFilterConfig> configs) {
  csv::Writer w(out);
  w.header({"config_id", "family", "params", "weighting", "subsample"});
  for (const auto& c : configs) {
    w.row({std::to_string(c.id), to_string(c.family), c.params(),
           portfolio::to_string(c.weighting), portfolio::to_string(c.subsample)});
  }
}

void write_method_manifest(std::ostream& out, std::span<const MethodSpec> specs) {
  csv::Writer w(out);
  w.header({"config_id", "spec", "admissible", "exclusion"});
  for (const auto& m : specs) {
    w.row({std::to_string(m.id), m.spec.label(), m.admissible ? "1" : "0", m.exclusion});
  }
}

void write_nse(std::ostream& out, const NseSummary& s) {
  csv::Writer w(out);
  w.header({"paths", "used", "degenerate_excluded", "failed", "premium_median", "premium_nse",
            "premium_ratio", "alpha_nse", "alpha_ratio"});
  w.row({std::to_string(s.paths), std::to_string(s.used), std::to_string(s.degenerate_excluded),
         std::to_string(s.failed), csv::format_optional(s.premium_median),
         csv::format_optional(s.premium_nse), csv::format_optional(s.premium_ratio),
         csv::format_optional(s.alpha_nse), csv::format_optional(s.alpha_ratio)});
}

}  // namespace bondlab::grid
