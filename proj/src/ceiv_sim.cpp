#include "bondlab/ceiv_sim.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "bondlab/bias_lab.hpp"
#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/hash.hpp"
#include "bondlab/parallel.hpp"
#include "bondlab/returns.hpp"
#include "bondlab/rng.hpp"
#include "bondlab/stats.hpp"

namespace bondlab::sim {
namespace {

enum Field : std::uint64_t { f_delta, f_delta_bgn, f_delta_gap, f_s, f_ret, f_xi, f_crash, f_rebound };

constexpr std::uint64_t kReboundStream = 1ULL << 40;

const Month kStart{std::chrono::year{2000}, std::chrono::January};

Date last_weekday(Month m) {
  Date d = last_day(m);
  while (is_weekend(d)) d -= std::chrono::days{1};
  return d;
}

Date first_weekday(Month m) {
  Date d = first_day(m);
  while (is_weekend(d)) d += std::chrono::days{1};
  return d;
}

std::string bond_name(int i) {
  std::string s = std::to_string(i);
  return "B" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

// Month t is stored at counter t + 1 so that t = -1 has a slot.
std::uint64_t slot(int t, Field f) { return static_cast<std::uint64_t>(t + 1) * 16 + f; }

BondMonth make_cell(const std::string& id, int t, double p_end, double p_bgn) {
  BondMonth c;
  c.bond_id = id;
  c.firm_id = id;
  c.month = kStart + std::chrono::months{t};
  c.p_end = DatedPrice{p_end, last_weekday(c.month)};
  c.p_bgn_next = DatedPrice{p_bgn, first_weekday(c.month + std::chrono::months{1})};
  c.rating = 5;
  c.market_value = 1.0;
  return c;
}

}  // namespace

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::price_level: return "price_level";
    case SignalKind::reversal: return "reversal";
    case SignalKind::non_price: return "non_price";
  }
  return "?";
}

SignalKind parse_signal_kind(const std::string& s) {
  if (s == "price_level") return SignalKind::price_level;
  if (s == "reversal") return SignalKind::reversal;
  if (s == "non_price") return SignalKind::non_price;
  throw ConfigError("kind", "unknown value '" + s + "'");
}

void SimConfig::validate() const {
  if (n_bonds < 2) throw ConfigError("n_bonds", "must be at least 2");
  if (n_months < 3) throw ConfigError("n_months", "must be at least 3");
  if (!(sigma_delta >= 0.0)) throw ConfigError("sigma_delta", "must be nonnegative");
  if (!(sigma_s >= 0.0)) throw ConfigError("sigma_s", "must be nonnegative");
  if (!(return_vol >= 0.0)) throw ConfigError("return_vol", "must be nonnegative");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw ConfigError("alpha", "must lie in (0, 0.5]");
  const double n = 1.0 / alpha;
  if (std::fabs(n - std::round(n)) > 1e-9) {
    throw ConfigError("alpha", "1/alpha must be an integer number of portfolios");
  }
  if (static_cast<double>(n_bonds) < n) throw ConfigError("n_bonds", "fewer bonds than portfolios");
}

int SimConfig::n_portfolios() const { return static_cast<int>(std::lround(1.0 / alpha)); }

double SimConfig::sigma_eta() const {
  const double base = std::fabs(a) * sigma_delta;
  return kind == SignalKind::reversal ? std::numbers::sqrt2 * base : base;
}

double SimConfig::rho() const {
  const double e = sigma_eta();
  const double total = std::sqrt(e * e + sigma_s * sigma_s);
  return total > 0.0 ? e / total : 0.0;
}

std::string SimConfig::canonical() const {
  return "n_bonds=" + std::to_string(n_bonds) + ";n_months=" + std::to_string(n_months) +
         ";sigma_delta=" + csv::format_double(sigma_delta) +
         ";sigma_s=" + csv::format_double(sigma_s) + ";a=" + csv::format_double(a) +
         ";kind=" + to_string(kind) + ";alpha=" + csv::format_double(alpha) +
         ";true_premium=" + csv::format_double(true_premium) +
         ";return_vol=" + csv::format_double(return_vol) + ";seed=" + std::to_string(seed);
}

double sigma_s_for_rho(const SimConfig& config, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho", "must lie in (0, 1]");
  return config.sigma_eta() * std::sqrt(1.0 / (rho * rho) - 1.0);
}

double kappa(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (alpha == 1.0) return 0.0;
  const boost::math::normal_distribution<double> n;
  const double z = boost::math::quantile(n, alpha);
  return boost::math::pdf(n, z) / alpha;
}

double theoretical_bias(const SimConfig& config) {
  config.validate();
  if (config.kind == SignalKind::non_price || config.a == 0.0) return 0.0;
  const double sign = config.a < 0.0 ? 1.0 : -1.0;
  const double k = kappa(config.alpha);
  const double base = 2.0 * k * config.rho() * config.sigma_delta;
  return sign * (config.kind == SignalKind::reversal ? base / std::numbers::sqrt2 : base);
}

SimPanel simulate_panel(const SimConfig& config, std::uint64_t rep) {
  config.validate();
  const CounterRng rng(config.seed);
  const int N = config.n_bonds;
  const int T = config.n_months;
  SimPanel out;
  out.panel.reserve(static_cast<std::size_t>(N) * T);
  out.truth.reserve(out.panel.capacity());

  for (int i = 0; i < N; ++i) {
    const auto b = static_cast<std::uint64_t>(i);
    const std::string id = bond_name(i);
    auto draw = [&](int t, Field f) { return rng.normal(rep, b, slot(t, f)); };
    double price = 100.0;
    for (int t = 0; t < T; ++t) {
      CellTruth tr;
      tr.delta = config.sigma_delta * draw(t, f_delta);
      tr.delta_bgn = config.sigma_delta * draw(t + 1, f_delta_bgn);
      tr.delta_gap = config.sigma_delta * draw(t, f_delta_gap);
      tr.s = config.sigma_s * draw(t, f_s);
      const double delta_prev = config.sigma_delta * draw(t - 1, f_delta);
      double gap_eta = 0.0;
      switch (config.kind) {
        case SignalKind::price_level:
          tr.eta = config.a * tr.delta;
          gap_eta = config.a * tr.delta_gap;
          break;
        case SignalKind::reversal:
          tr.eta = config.a * (tr.delta - delta_prev);
          gap_eta = config.a * (tr.delta_gap - delta_prev);
          break;
        case SignalKind::non_price:
          tr.eta = std::fabs(config.a) * config.sigma_delta * draw(t, f_xi);
          gap_eta = tr.eta;
          break;
      }
      tr.r_true = config.true_premium * tr.s + config.return_vol * draw(t + 1, f_ret);
      const double next_price = price * (1.0 + tr.r_true);
      const double next_delta = config.sigma_delta * draw(t + 1, f_delta);
      const double observed = (1.0 + tr.delta) * price;
      tr.r_obs = (1.0 + next_delta) * next_price / observed - 1.0;
      if (t == T - 1) {
        tr.r_true = std::nan("");
        tr.r_obs = std::nan("");
      }

      auto cell = make_cell(id, t, observed, (1.0 + tr.delta_bgn) * price);
      cell.signals[kSimSignal] = tr.s + tr.eta;
      cell.signals_gapped[kSimSignal] = tr.s + gap_eta;
      out.panel.push_back(std::move(cell));
      out.truth.push_back(tr);
      price = next_price;
    }
  }
  return out;
}

namespace {

portfolio::SortSpec sim_spec(const SimConfig& config) {
  portfolio::SortSpec spec;
  spec.n_portfolios = config.n_portfolios();
  spec.weighting = portfolio::Weighting::equal;
  return spec;
}

struct RepOutcome {
  std::array<double, 3> premium{};
  double rho = 0.0;
  double cov = 0.0;
};

}  // namespace

double realized_rho(const SimPanel& sim) {
  std::vector<double> eta;
  std::vector<double> sig;
  for (std::size_t i = 0; i < sim.panel.size(); ++i) {
    eta.push_back(sim.truth[i].eta);
    sig.push_back(sim.panel[i].signals.at(kSimSignal));
  }
  const double sd_sig = stats::sample_sd(sig);
  return sd_sig > 0.0 ? stats::sample_sd(eta) / sd_sig : 0.0;
}

double noise_covariance(const SimPanel& sim) {
  std::vector<double> eta;
  std::vector<double> eps;
  for (const auto& tr : sim.truth) {
    if (!std::isfinite(tr.r_obs)) continue;
    eta.push_back(tr.eta);
    eps.push_back(tr.r_obs - tr.r_true);
  }
  if (eta.size() < 2) return 0.0;
  const double me = stats::mean(eta);
  const double mp = stats::mean(eps);
  double s = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) s += (eta[i] - me) * (eps[i] - mp);
  return s / static_cast<double>(eta.size() - 1);
}

SimResult run_experiment(const SimConfig& config, int reps, unsigned jobs) {
  config.validate();
  if (reps < 2) throw ConfigError("reps", "need at least two replications");
  const auto spec = sim_spec(config);
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  parallel_for(outcomes.size(), jobs, [&](std::size_t r) {
    auto sim = simulate_panel(config, r);
    outcomes[r].rho = realized_rho(sim);
    outcomes[r].cov = noise_covariance(sim);
    const auto fp = returns::build_factor_panel(std::move(sim.panel));
    const bias::Approach approaches[] = {bias::Approach::unadjusted,
                                         bias::Approach::adjusted_signal,
                                         bias::Approach::adjusted_return};
    for (std::size_t a = 0; a < 3; ++a) {
      const auto f = bias::build_factor(fp, kSimSignal, spec, approaches[a]);
      outcomes[r].premium[a] = stats::mean(f.series.valid_returns());
    }
  });

  SimResult res;
  res.reps = reps;
  res.kappa = kappa(config.alpha);
  res.theory = theoretical_bias(config);
  res.config_hash = sha256_hex(config.canonical() + ";reps=" + std::to_string(reps)).substr(0, 16);
  const char* names[] = {"unadjusted", "adjusted_signal", "adjusted_return"};
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<double> v;
    for (const auto& o : outcomes) v.push_back(o.premium[a]);
    auto& ar = res.approaches[a];
    ar.approach = names[a];
    ar.measured = stats::mean(v);
    ar.mc_se = stats::sample_sd(v) / std::sqrt(static_cast<double>(reps));
    ar.theory = a == 0 ? res.theory : 0.0;
    const double diff = ar.measured - ar.theory;
    ar.z = ar.mc_se > 0.0 ? diff / ar.mc_se : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
  }
  for (const auto& o : outcomes) {
    res.realized_rho += o.rho / reps;
    res.noise_cov += o.cov / reps;
  }
  return res;
}

double predicted_mc_se(const SimConfig& config, int reps) {
  config.validate();
  const double v = config.return_vol * config.return_vol +
                   2.0 * config.sigma_delta * config.sigma_delta;
  const double leg_n = config.alpha * config.n_bonds;
  return std::sqrt(2.0 * v / leg_n) / std::sqrt(static_cast<double>(config.n_months - 1) * reps);
}

Decomposition decompose(const SimPanel& sim, const portfolio::SortSpec& spec) {
  std::map<std::pair<int, std::string>, std::size_t> where;
  for (std::size_t i = 0; i < sim.panel.size(); ++i) {
    where[{month_index(sim.panel[i].month), sim.panel[i].bond_id}] = i;
  }
  const auto fp = returns::build_factor_panel(sim.panel);
  const auto f = bias::build_factor(fp, kSimSignal, spec, bias::Approach::unadjusted);
  Decomposition d;
  for (std::size_t k = 0; k < fp.size(); ++k) {
    if (f.series.points[k].degenerate) continue;
    double m = 0.0;
    double t = 0.0;
    double e = 0.0;
    for (const auto& [id, w] : f.weights[k]) {
      const auto& tr = sim.truth[where.at({month_index(fp.months[k]), id})];
      m += w * tr.r_obs;
      t += w * tr.r_true;
      e += w * (tr.r_obs - tr.r_true);
    }
    d.measured.push_back(m);
    d.true_part.push_back(t);
    d.bias_part.push_back(e);
  }
  return d;
}

FootnoteResult footnote_economy(double delta) {
  MonthlyPanel panel;
  const double a = -1.0;
  for (int i = 0; i < 2; ++i) {
    const double d = i == 0 ? delta : -delta;
    const std::string id = bond_name(i);
    auto c0 = make_cell(id, 0, 100.0 * (1.0 + d), 100.0);
    c0.signals[kSimSignal] = a * d;
    auto c1 = make_cell(id, 1, 100.0, 100.0);
    c1.signals[kSimSignal] = 0.0;
    panel.push_back(c0);
    panel.push_back(c1);
  }
  portfolio::SortSpec spec;
  spec.n_portfolios = 2;
  spec.weighting = portfolio::Weighting::equal;
  const auto fp = returns::build_factor_panel(panel);
  const auto f = bias::build_factor(fp, kSimSignal, spec, bias::Approach::unadjusted);
  if (f.series.points.empty() || f.series.points.front().degenerate) {
    throw ComputationError("footnote economy produced no long-short return");
  }
  FootnoteResult r;
  r.measured_ls = f.series.points.front().r_ls;
  // True prices stay at 100, so every true return is zero.
  for (const auto& [id, w] : f.weights.front()) r.true_ls += w * (100.0 / 100.0 - 1.0);
  return r;
}

void ReboundConfig::validate() const {
  if (n_bonds < 10) throw ConfigError("n_bonds", "must be at least 10");
  if (n_months < 3) throw ConfigError("n_months", "must be at least 3");
  if (!(crash_prob >= 0.0 && crash_prob < 1.0)) throw ConfigError("crash_prob", "outside [0, 1)");
  if (!(rebound_prob >= 0.0 && rebound_prob <= 1.0)) {
    throw ConfigError("rebound_prob", "outside [0, 1]");
  }
  if (!(crash_return > -1.0)) throw ConfigError("crash_return", "must exceed -1");
  if (!(rebound_max >= rebound_min)) throw ConfigError("rebound_max", "below rebound_min");
}

MonthlyPanel simulate_rebound_panel(const ReboundConfig& config, std::uint64_t rep) {
  config.validate();
  const CounterRng rng(config.seed);
  const std::uint64_t stream = kReboundStream + rep;
  MonthlyPanel out;
  for (int i = 0; i < config.n_bonds; ++i) {
    const auto b = static_cast<std::uint64_t>(i);
    const std::string id = bond_name(i);
    double price = 100.0;
    double last_return = std::nan("");
    bool crashed = false;
    for (int t = 0; t < config.n_months; ++t) {
      auto cell = make_cell(id, t, price, price);
      cell.market_value = price;
      cell.signals["mom"] = last_return;
      out.push_back(std::move(cell));

      const double z = rng.normal(stream, b, slot(t + 1, f_ret));
      double r = config.return_vol * z;
      const bool was_crashed = crashed;
      crashed = false;
      if (was_crashed && rng.uniform(stream, b, slot(t + 1, f_rebound)) < config.rebound_prob) {
        r = config.rebound_min + (config.rebound_max - config.rebound_min) *
                                     rng.uniform(stream, b, slot(t + 1, f_rebound), 1);
      } else if (rng.uniform(stream, b, slot(t + 1, f_crash)) < config.crash_prob) {
        r += config.crash_return;
        crashed = true;
      }
      price *= 1.0 + r;
      last_return = r;
    }
  }
  return out;
}

void write_report(std::ostream& out, const SimResult& result) {
  csv::Writer w(out);
  w.header({"config_hash", "approach", "measured", "mc_se", "theory", "z"});
  for (const auto& a : result.approaches) {
    w.row({result.config_hash, a.approach, csv::format_double(a.measured),
           csv::format_double(a.mc_se), csv::format_double(a.theory), csv::format_double(a.z)});
  }
}

}  // namespace bondlab::sim
