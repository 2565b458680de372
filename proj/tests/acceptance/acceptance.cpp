// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bondlab/bias_lab.hpp"
#include "bondlab/ceiv_sim.hpp"
#include "bondlab/daily_clean.hpp"
#include "bondlab/grid.hpp"
#include "bondlab/returns.hpp"
#include "bondlab/stats.hpp"
#include "bondlab/txn_clean.hpp"

using namespace bondlab;

namespace {

// Tolerances.
constexpr double kZMax = 2.0;              // Monte Carlo standard errors
constexpr double kMcSeShare = 0.10;        // MC se relative to theory
constexpr double kRuntimeSeconds = 120.0;  // criterion 1 wall clock
constexpr double kIdentityTol = 1e-12;
constexpr double kFootnoteTol = 1e-12;
constexpr double kLibCorrMin = 0.99;
constexpr int kReps = 20;
constexpr int kPrefixPanels = 50;
constexpr int kCorruptedPanels = 100;

// Tail constant from composite Simpson integration of -x phi(x) over
// [-12, z_alpha], with z_alpha found by bisection on erfc.
double kappa_by_integration(double alpha) {
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < alpha ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  const int n = 200000;
  const double a = -12.0, h = (z - a) / n;
  auto f = [](double x) { return -x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  double s = f(a) + f(z);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0 / alpha;
}

struct Report {
  int failed = 0;
  void line(int id, bool ok, const std::string& name, const std::string& detail) {
    std::printf("[%s] criterion %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sim::SimConfig ceiv_config(sim::SignalKind kind, double rho) {
  sim::SimConfig c;
  c.kind = kind;
  c.alpha = 0.10;
  c.sigma_delta = 0.005;
  c.sigma_s = sim::sigma_s_for_rho(c, rho);
  return c;
}

double z_of(const sim::ApproachResult& a, double target) { return (a.measured - target) / a.mc_se; }

std::optional<double> alpha_of(const portfolio::FactorSeries& s,
                               const std::vector<std::pair<Month, double>>& mkt) {
  std::map<int, double> m;
  for (const auto& [month, v] : mkt) m[month_index(month)] = v;
  std::vector<double> y, x;
  for (const auto& p : s.points) {
    if (p.degenerate) continue;
    auto it = m.find(month_index(p.month));
    if (it == m.end()) continue;
    y.push_back(p.r_ls);
    x.push_back(it->second);
  }
  if (y.size() < 3) return std::nullopt;
  return stats::capmb_alpha(y, x).alpha;
}

TransactionPanel trades(const std::vector<double>& prices, const std::string& bond) {
  TransactionPanel out;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    TransactionRecord r;
    r.bond_id = bond;
    r.timestamp.day = parse_date("2024-01-02") + std::chrono::days{static_cast<int>(i)};
    r.price = prices[i];
    r.volume = 1.0;
    r.seq = static_cast<std::int64_t>(i + 1);
    out.push_back(r);
  }
  return out;
}

DailyPanel daily_series(const std::vector<double>& prices) {
  DailyPanel out;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    DailyBondRecord r;
    r.bond_id = "D1";
    r.date = parse_date("2024-01-02") + std::chrono::days{static_cast<int>(i)};
    r.vwap_price = prices[i];
    out.push_back(r);
  }
  return out;
}

portfolio::SortSpec decile_ew() {
  portfolio::SortSpec s;
  s.n_portfolios = 10;
  s.weighting = portfolio::Weighting::equal;
  return s;
}

}  // namespace

int main() {
  Report rep;
  const double kappa_oracle = kappa_by_integration(0.10);

  // 1 and 2: price-level signal at rho 0.5 and 1.
  {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok1 = true, ok2 = true;
    std::string d1, d2;
    for (double rho : {0.5, 1.0}) {
      const auto cfg = ceiv_config(sim::SignalKind::price_level, rho);
      const auto r = sim::run_experiment(cfg, kReps);
      const double theory = 2.0 * kappa_oracle * rho * cfg.sigma_delta;
      const auto& a1 = r.approaches[0];
      const double z1 = z_of(a1, theory);
      const double share = a1.mc_se / theory;
      ok1 = ok1 && std::abs(z1) <= kZMax && share < kMcSeShare &&
            std::abs(r.theory - theory) < 1e-12;
      d1 += fmt("rho=%.1f A1=%.6f theory=%.6f z=%+.2f se/theory=%.3f; ", rho, a1.measured,
                theory, z1, share);
      for (int k : {1, 2}) {
        const double z = z_of(r.approaches[k], 0.0);
        ok2 = ok2 && std::abs(z) <= kZMax;
        d2 += fmt("rho=%.1f A%d=%+.6f z=%+.2f; ", rho, k + 1, r.approaches[k].measured, z);
      }
    }
    const double secs = seconds_since(t0);
    ok1 = ok1 && secs < kRuntimeSeconds;
    d1 += fmt("kappa=%.6f runtime=%.1fs", kappa_oracle, secs);
    rep.line(1, ok1, "closed-form CEIV bias", d1);
    rep.line(2, ok2, "bias removal (approaches 2 and 3)", d2);
  }

  // 3: reversal and non-price corollaries.
  {
    bool ok = true;
    std::string d;
    for (double rho : {0.5, 1.0}) {
      const auto cfg = ceiv_config(sim::SignalKind::reversal, rho);
      const auto r = sim::run_experiment(cfg, kReps);
      const double theory = std::sqrt(2.0) * kappa_oracle * rho * cfg.sigma_delta;
      const double z = z_of(r.approaches[0], theory);
      ok = ok && std::abs(z) <= kZMax;
      d += fmt("reversal rho=%.1f A1=%.6f theory=%.6f z=%+.2f; ", rho, r.approaches[0].measured,
               theory, z);
    }
    for (double rho : {0.5, 1.0}) {
      const auto cfg = ceiv_config(sim::SignalKind::non_price, rho);
      const auto r = sim::run_experiment(cfg, kReps);
      const double z = z_of(r.approaches[0], 0.0);
      ok = ok && std::abs(z) <= kZMax && r.theory == 0.0;
      d += fmt("non_price rho=%.1f A1=%+.6f z=%+.2f; ", rho, r.approaches[0].measured, z);
    }
    rep.line(3, ok, "reversal and non-price corollaries", d);
  }

  // 4: two-bond footnote economy.
  {
    const auto f = sim::footnote_economy(0.005);
    const double expect = 100.0 / 99.5 - 100.0 / 100.5;
    const bool ok = std::abs(f.measured_ls - expect) < kFootnoteTol &&
                    std::round(f.measured_ls * 100.0 * 1e6) / 1e6 == 1.000025 && f.true_ls == 0.0;
    rep.line(4, ok, "footnote economy",
             fmt("measured=%.9f%% true=%.1f%%", f.measured_ls * 100.0, f.true_ls * 100.0));
  }

  // 5: LIB identity and correlation on synthetic panels.
  {
    double worst = 0.0;
    std::vector<double> gap, lib;
    for (std::uint64_t r = 0; r < 3; ++r) {
      auto cfg = ceiv_config(sim::SignalKind::price_level, 0.5);
      cfg.n_bonds = 300;
      cfg.n_months = 36;
      auto fp = returns::build_factor_panel(sim::simulate_panel(cfg, r).panel);
      for (const auto& rows : fp.rows) {
        for (const auto& row : rows) {
          const auto& f = row.fwd;
          if (!f.r_end || !f.r_bgn || !f.lib) continue;
          worst = std::max(worst, std::abs((1.0 + *f.lib) * (1.0 + *f.r_bgn) - (1.0 + *f.r_end)));
          gap.push_back(*f.r_end - *f.r_bgn);
          lib.push_back(*f.lib);
        }
      }
    }
    const double mg = stats::mean(gap), ml = stats::mean(lib);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < gap.size(); ++i) {
      sxy += (gap[i] - mg) * (lib[i] - ml);
      sxx += (gap[i] - mg) * (gap[i] - mg);
      syy += (lib[i] - ml) * (lib[i] - ml);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    const bool ok = !gap.empty() && worst < kIdentityTol && corr >= kLibCorrMin;
    rep.line(5, ok, "LIB identity",
             fmt("cells=%zu max|(1+LIB)(1+r_bgn)-(1+r_end)|=%.2e corr=%.5f", gap.size(), worst,
                 corr));
  }

  // 6: LAB identity and the hand example.
  {
    double worst = 0.0;
    std::size_t months = 0;
    for (std::uint64_t r = 0; r < 5; ++r) {
      sim::ReboundConfig rc;
      rc.n_bonds = 200;
      rc.n_months = 36;
      const auto fp = returns::build_factor_panel(sim::simulate_rebound_panel(rc, r));
      bias::FilterRule rule;
      rule.q = 0.01;
      const auto out = bias::apply_filter_rule(fp, rule);
      for (auto w : {portfolio::Weighting::equal, portfolio::Weighting::value}) {
        auto spec = decile_ew();
        spec.weighting = w;
        const auto s = bias::lab_series(fp, out, "mom", spec, rule);
        const auto base = bias::build_factor(fp, "mom", spec, bias::Approach::unadjusted);
        const auto filt = bias::build_factor(out.panel, "mom", spec, bias::Approach::unadjusted);
        std::size_t j = 0;
        for (std::size_t k = 0; k < fp.size() && j < s.points.size(); ++k) {
          if (base.series.points[k].degenerate || filt.series.points[k].degenerate) continue;
          const double diff = filt.series.points[k].r_ls - base.series.points[k].r_ls;
          worst = std::max(worst, std::abs(diff - s.points[j].lab));
          ++j;
          ++months;
        }
      }
    }
    // Long {-0.60, 0.10} winsorized at -0.5, short {0.70, 0.02} at 0.5.
    const std::vector<double> dl = {-0.5 - -0.60, 0.0};
    const std::vector<double> ds = {0.5 - 0.70, 0.0};
    const auto hand = bias::lab(dl, ds);
    const bool hand_ok = std::abs(hand.lab - 0.15) < kIdentityTol &&
                         std::abs(hand.lab_long - 0.05) < kIdentityTol &&
                         std::abs(hand.lab_short + 0.10) < kIdentityTol;
    rep.line(6, months > 0 && worst < kIdentityTol && hand_ok, "LAB identity",
             fmt("months=%zu max|diff-LAB|=%.2e hand LAB=%.15f", months, worst, hand.lab));
  }

  // 7: ex-ante prefix consistency.
  {
    std::mt19937_64 gen(2024);
    std::size_t checks = 0, mismatches = 0;
    for (int p = 0; p < kPrefixPanels; ++p) {
      sim::ReboundConfig rc;
      rc.n_bonds = 60;
      rc.n_months = 36;
      rc.seed = 100 + static_cast<std::uint64_t>(p);
      const auto mp = sim::simulate_rebound_panel(rc);
      bias::FilterRule rule;
      rule.mode = p % 2 ? bias::FilterMode::trim : bias::FilterMode::winsorize;
      rule.tail = static_cast<bias::Tail>(p % 3);
      rule.q = 0.02;
      rule.info = bias::InfoSet::ex_ante;
      rule.cross_sectional = (p / 2) % 2 == 1;
      rule.burn_in = 6;
      const auto full = bias::apply_filter_rule(returns::build_factor_panel(mp), rule);
      const int cut = std::uniform_int_distribution<int>(8, rc.n_months - 1)(gen);
      const Month last = full.panel.months[static_cast<std::size_t>(cut - 1)];
      MonthlyPanel prefix;
      for (const auto& c : mp) {
        if (month_index(c.month) <= month_index(last)) prefix.push_back(c);
      }
      const auto part = bias::apply_filter_rule(returns::build_factor_panel(prefix), rule);
      for (std::size_t k = 0; k < part.panel.size(); ++k) {
        const auto& a = part.thresholds[k];
        const auto& b = full.thresholds[k];
        ++checks;
        if (a.has_value() != b.has_value() || (a && (a->lower != b->lower || a->upper != b->upper))) {
          ++mismatches;
        }
        const auto& ra = part.panel.rows[k];
        const auto& rb = full.panel.rows[k];
        if (ra.size() != rb.size()) {
          ++mismatches;
          continue;
        }
        for (std::size_t i = 0; i < ra.size(); ++i) {
          ++checks;
          if (ra[i].excluded != rb[i].excluded) ++mismatches;
        }
      }
    }
    rep.line(7, mismatches == 0 && checks > 0, "ex-ante non-anticipation",
             fmt("panels=%d decisions checked=%zu mismatches=%zu", kPrefixPanels, checks,
                 mismatches));
  }

  // 8: cleaning fixtures and decimal-shift idempotence.
  {
    std::vector<std::string> failed;
    {
      const std::vector<double> v = {98.5, 98.4, 98.6, 98.5, 98.3, 985.0,
                                     98.5, 98.6, 98.4, 98.5, 98.5};
      const auto r = txn::decimal_shift_correct(trades(v, "A"));
      if (!(r.series[5].price == 98.5 && r.log.size() == 1 && r.log[0].factor == 0.1)) {
        failed.push_back("decimal");
      }
    }
    {
      const std::vector<double> v = {100, 100, 100, 100, 100, 160, 100, 100};
      const auto r = txn::bounce_back_flag(std::span<const double>(v));
      if (r.flags != std::vector<bool>{false, false, false, false, false, true, false, false}) {
        failed.push_back("bounce");
      }
    }
    {
      const std::vector<double> v = {40, 40, 40, 40, 40, 100, 100, 100, 40};
      const auto r = txn::bounce_back_flag(std::span<const double>(v));
      bool par = r.flags == std::vector<bool>{false, false, false, false, false, true, true, true, false};
      for (const auto& e : r.log) par = par && e.reason == txn::BounceReason::par_block;
      if (!par) failed.push_back("par_block");
    }
    {
      const auto f = daily::flag_downward_anomalies(daily_series({45, 44, 0.05, 46, 45}));
      if (!(f.size() == 1 && f[0].index == 2 && f[0].ratio == 45.0 / 0.05)) failed.push_back("filter1");
    }
    {
      const auto f = daily::flag_spikes(daily_series({1.0, 1.0, 1.0, 1.0, 1.0, 6.0, 1.5}));
      if (!(f.size() == 1 && f[0].index == 5 && f[0].ratio == 6.0)) failed.push_back("filter2");
    }
    {
      const auto f = daily::flag_plateaus(daily_series({10, 0.10, 0.10, 12}));
      if (!(f.size() == 2 && f[0].index == 1 && f[1].index == 2)) failed.push_back("filter3");
    }
    {
      auto d = daily_series({17.5});
      d[0].high = 30.0;
      d[0].low = 5.0;
      const auto f = daily::flag_intraday(d);
      if (!(f.size() == 1 && f[0].ratio == 25.0 / 17.5)) failed.push_back("filter4");
    }
    std::mt19937_64 gen(77);
    std::normal_distribution<double> noise(0.0, 0.4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double factors[] = {10.0, 0.1, 100.0, 0.01};
    int non_idempotent = 0;
    for (int p = 0; p < kCorruptedPanels; ++p) {
      TransactionPanel panel;
      for (int b = 0; b < 5; ++b) {
        std::vector<double> v;
        double level = 40.0 + 100.0 * u(gen);
        for (int i = 0; i < 60; ++i) {
          level += noise(gen);
          double x = level;
          if (u(gen) < 0.05) x *= factors[static_cast<int>(u(gen) * 4.0)];
          v.push_back(x);
        }
        const auto t = trades(v, "P" + std::to_string(p) + "B" + std::to_string(b));
        panel.insert(panel.end(), t.begin(), t.end());
      }
      const auto once = txn::clean_transactions(panel);
      const auto twice = txn::clean_transactions(once.panel);
      bool same = once.panel.size() == twice.panel.size();
      for (std::size_t i = 0; same && i < once.panel.size(); ++i) {
        same = once.panel[i].price == twice.panel[i].price;
      }
      for (const auto& e : twice.corrections) same = same && e.action != txn::Action::corrected;
      if (!same) ++non_idempotent;
    }
    std::string d = "fixtures failed: ";
    for (const auto& f : failed) d += f + " ";
    if (failed.empty()) d += "none ";
    d += fmt("; non-idempotent panels %d/%d", non_idempotent, kCorruptedPanels);
    rep.line(8, failed.empty() && non_idempotent == 0, "filter fixtures", d);
  }

  // 9: enumeration constants.
  {
    const auto f = grid::enumerate_filters().size();
    const auto g = grid::enumerate_data_grid().size();
    const auto raw = grid::enumerate_method_grid(true).size();
    const auto adm = grid::enumerate_method_grid(false).size();
    const int lags = stats::nw_lags(268);
    const bool ok = f == 108 && g == 648 && raw == 216 && adm == 168 && lags == 4;
    rep.line(9, ok, "enumeration constants",
             fmt("filters=%zu paths=%zu method raw=%zu admissible=%zu lags(268)=%d", f, g, raw,
                 adm, lags));
  }

  // 10: statistics oracles.
  {
    const std::vector<double> x = {1, 2, 3};
    const auto nw = stats::nw_mean(x);
    const double se = std::sqrt((2.0 / 3.0) / 3.0);
    const bool nw_ok = nw.estimate == 2.0 && std::abs(nw.se - se) < 1e-12 && nw.t &&
                       std::abs(*nw.t - 2.0 / se) < 1e-12 && std::round(nw.se * 1e4) / 1e4 == 0.4714 &&
                       std::round(*nw.t * 1e4) / 1e4 == 4.2426;
    const std::vector<double> p = {0.001, 0.02, 0.03, 0.04, 0.9};
    const auto rej = stats::bh_fdr(p, 0.05);
    const bool bh_ok = rej == std::vector<bool>{true, true, true, true, false};
    const std::vector<double> e = {1, 2, 3, 4, 5};
    const bool nse_ok = stats::nse(e) == 2.0;
    std::vector<double> mkt, fac;
    for (int i = 0; i < 48; ++i) {
      mkt.push_back(0.01 * std::sin(0.7 * i) + 0.002 * (i % 5));
      fac.push_back(0.001 + 1.2 * mkt.back());
    }
    const auto a = stats::capmb_alpha(fac, mkt);
    double max_res = 0.0;
    for (double r : a.residuals) max_res = std::max(max_res, std::abs(r));
    const bool alpha_ok = std::abs(a.alpha - 0.001) < 1e-12 && std::abs(a.beta - 1.2) < 1e-12 &&
                          max_res < 1e-14;
    rep.line(10, nw_ok && bh_ok && nse_ok && alpha_ok, "statistics oracles",
             fmt("nw mean=%.4f se=%.4f t=%.4f; BH rejects %d of 5; NSE=%.1f; alpha=%.6f beta=%.6f "
                 "max|resid|=%.1e",
                 nw.estimate, nw.se, nw.t.value_or(NAN),
                 static_cast<int>(std::count(rej.begin(), rej.end(), true)), stats::nse(e),
                 a.alpha, a.beta, max_res));
  }

  // 11: momentum harness sign property.
  {
    std::vector<double> base, post, ante;
    bias::FilterRule ex_post;
    ex_post.mode = bias::FilterMode::trim;
    ex_post.tail = bias::Tail::right;
    ex_post.q = 0.01;
    auto ex_ante = ex_post;
    ex_ante.info = bias::InfoSet::ex_ante;
    const auto spec = decile_ew();
    for (int r = 0; r < kReps; ++r) {
      const auto fp = returns::build_factor_panel(
          sim::simulate_rebound_panel(sim::ReboundConfig{}, static_cast<std::uint64_t>(r)));
      const auto mkt = returns::market_factor(fp);
      auto alpha = [&](const returns::FactorPanel& p) {
        return alpha_of(bias::build_factor(p, "mom", spec, bias::Approach::unadjusted).series, mkt)
            .value_or(NAN);
      };
      base.push_back(alpha(fp));
      post.push_back(alpha(bias::apply_filter_rule(fp, ex_post).panel));
      ante.push_back(alpha(bias::apply_filter_rule(fp, ex_ante).panel));
    }
    const double mc_se = stats::sample_sd(base) / std::sqrt(static_cast<double>(kReps));
    const double up = stats::mean(post) - stats::mean(base);
    const double drift = stats::mean(ante) - stats::mean(base);
    const bool ok = up > kZMax * mc_se && std::abs(drift) <= kZMax * mc_se;
    rep.line(11, ok, "momentum harness sign property",
             fmt("base alpha=%.5f ex-post=%.5f (%+.1f se) ex-ante=%.5f (%+.2f se) mc_se=%.5f",
                 stats::mean(base), stats::mean(post), up / mc_se, stats::mean(ante),
                 drift / mc_se, mc_se));
  }

  std::printf("%d of 11 criteria failed\n", rep.failed);
  return rep.failed == 0 ? 0 : 1;
}
