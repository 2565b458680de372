#include "bondlab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "bondlab/bias_lab.hpp"
#include "bondlab/calendar.hpp"
#include "bondlab/ceiv_sim.hpp"
#include "bondlab/config.hpp"
#include "bondlab/csv.hpp"
#include "bondlab/daily_clean.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/grid.hpp"
#include "bondlab/hash.hpp"
#include "bondlab/panel.hpp"
#include "bondlab/portfolio.hpp"
#include "bondlab/returns.hpp"
#include "bondlab/stats.hpp"
#include "bondlab/txn_clean.hpp"

namespace bondlab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags shared by every subcommand plus the per-subcommand overrides. Unset
// optionals leave the config value alone.
struct Overrides {
  std::string config;
  std::optional<std::string> input, out, holidays, risk_free, key_rates, vix;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  bool keep_flagged = false;
  std::optional<std::string> signal, approach, weighting, subsample, universe, bucket;
  std::optional<int> n_portfolios, holding_months;
  bool within_firm = false;
  std::optional<std::string> mode, tail, info;
  std::optional<double> q, tau;
  std::optional<int> burn_in;
  bool cross_sectional = false;
  bool count_only = false;
  bool include_inadmissible = false;
  std::optional<double> alpha, sigma_delta, sigma_s, rho, a, true_premium, return_vol;
  std::optional<std::string> kind;
  std::optional<int> bonds, months, reps;
};

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& fn) {
    fs::create_directories(dir_);
    const auto path = dir_ / name;
    {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw Error("cannot write " + path.string());
      fn(f);
      if (!f) throw Error("write failed for " + path.string());
    }
    written_.push_back(name);
  }

  void input(const std::string& path) {
    if (!path.empty()) inputs_[path] = sha256_file(path);
  }

  void manifest(const std::string& command, const RunConfig& config, const std::string& status,
                const std::string& error) const {
    json m;
    m["command"] = command;
    m["status"] = status;
    if (!error.empty()) m["error"] = error;
    m["config"] = config.to_json();
    m["inputs"] = inputs_;
    json outs = json::object();
    for (const auto& n : written_) outs[n] = sha256_file(dir_ / n);
    m["outputs"] = outs;
    fs::create_directories(dir_);
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
  }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
  std::map<std::string, std::string> inputs_;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (o.jobs) {
    c.jobs = *o.jobs;
  } else if (const char* env = std::getenv("BONDLAB_JOBS")) {
    try {
      c.jobs = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw ConfigError("BONDLAB_JOBS", "not a positive integer");
    }
  }
  if (o.seed) c.seed = *o.seed;
  if (o.input) c.paths.input = *o.input;
  if (o.out) c.paths.out = *o.out;
  if (o.holidays) c.paths.holidays = *o.holidays;
  if (o.risk_free) c.paths.risk_free = *o.risk_free;
  if (o.key_rates) c.paths.key_rates = *o.key_rates;
  if (o.vix) c.paths.vix = *o.vix;
  if (o.keep_flagged) c.keep_flagged = true;

  auto wrap = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      throw ConfigError(key, e.what());
    }
  };
  if (o.signal) c.sort.signal = *o.signal;
  if (o.approach) wrap("sort.approach", [&] { c.sort.approach = bias::parse_approach(*o.approach); });
  if (o.weighting) {
    wrap("sort.weighting", [&] { c.sort.spec.weighting = portfolio::parse_weighting(*o.weighting); });
  }
  if (o.subsample) {
    wrap("sort.subsample", [&] { c.sort.spec.subsample = portfolio::parse_subsample(*o.subsample); });
  }
  if (o.universe) {
    wrap("sort.breakpoint_universe",
         [&] { c.sort.spec.universe = portfolio::parse_universe(*o.universe); });
  }
  if (o.bucket) {
    wrap("sort.maturity_bucket", [&] { c.sort.spec.bucket = portfolio::parse_bucket(*o.bucket); });
  }
  if (o.n_portfolios) {
    c.sort.spec.n_portfolios = *o.n_portfolios;
    c.grid.n_portfolios = *o.n_portfolios;
  }
  if (o.holding_months) c.sort.spec.holding_months = *o.holding_months;
  if (o.within_firm) c.sort.within_firm = true;

  if (o.mode) wrap("filter.mode", [&] { c.filter.mode = bias::parse_filter_mode(*o.mode); });
  if (o.tail) wrap("filter.tail", [&] { c.filter.tail = bias::parse_tail(*o.tail); });
  if (o.info) wrap("filter.info", [&] { c.filter.info = bias::parse_info_set(*o.info); });
  if (o.q) {
    c.filter.q = *o.q;
    c.filter.tau.reset();
  }
  if (o.tau) {
    c.filter.tau = *o.tau;
    c.filter.q.reset();
  }
  if (o.burn_in) c.filter.burn_in = *o.burn_in;
  if (o.cross_sectional) c.filter.cross_sectional = true;
  if (o.include_inadmissible) c.grid.include_inadmissible = true;

  auto& s = c.simulation;
  if (o.alpha) s.sim.alpha = *o.alpha;
  if (o.sigma_delta) s.sim.sigma_delta = *o.sigma_delta;
  if (o.sigma_s) {
    s.sim.sigma_s = *o.sigma_s;
    s.rho.reset();
  }
  if (o.rho) s.rho = *o.rho;
  if (o.a) s.sim.a = *o.a;
  if (o.true_premium) s.sim.true_premium = *o.true_premium;
  if (o.return_vol) s.sim.return_vol = *o.return_vol;
  if (o.kind) wrap("simulation.kind", [&] { s.sim.kind = sim::parse_signal_kind(*o.kind); });
  if (o.bonds) s.sim.n_bonds = *o.bonds;
  if (o.months) s.sim.n_months = *o.months;
  if (o.reps) s.reps = *o.reps;
  c.validate();
  return c;
}

const std::string& require_input(const RunConfig& c) {
  if (c.paths.input.empty()) throw ConfigError("paths.input", "no input file given (use --input)");
  if (!fs::exists(c.paths.input)) {
    throw ConfigError("paths.input", "file not found: " + c.paths.input);
  }
  return c.paths.input;
}

returns::FactorPanel monthly_input(const RunConfig& c, Artifacts& art,
                                   std::optional<returns::RiskFreeSeries>& rf,
                                   std::optional<returns::KeyRateTable>& kr) {
  const auto& path = require_input(c);
  art.input(path);
  auto panel = load_monthly(path);
  if (!c.paths.risk_free.empty()) {
    art.input(c.paths.risk_free);
    rf = returns::RiskFreeSeries::load(c.paths.risk_free);
  }
  if (!c.paths.key_rates.empty()) {
    art.input(c.paths.key_rates);
    kr = returns::KeyRateTable::load(c.paths.key_rates);
  }
  returns::ReturnContext ctx{rf ? &*rf : nullptr, kr ? &*kr : nullptr};
  return returns::build_factor_panel(std::move(panel), ctx);
}

std::optional<stats::InferenceResult> alpha_of(const portfolio::FactorSeries& s,
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
  try {
    return stats::capmb_alpha(y, x).alpha_inference();
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

void write_cumulative(std::ostream& out, const portfolio::FactorSeries& s) {
  csv::Writer w(out);
  w.header({"month", "cumulative"});
  double cum = 1.0;
  for (const auto& p : s.points) {
    if (!p.degenerate) cum *= 1.0 + p.r_ls;
    w.row({format_month(p.month), csv::format_double(cum - 1.0)});
  }
}

void cmd_clean_txn(const RunConfig& c, Artifacts& art, std::ostream& out) {
  const auto& path = require_input(c);
  art.input(path);
  const auto panel = load_transactions(path);
  const auto res = txn::clean_transactions(panel, c.decimal_shift, c.bounce_back, c.jobs);
  TransactionPanel kept;
  for (std::size_t i = 0; i < res.panel.size(); ++i) {
    if (!res.decimal_flagged[i] && !res.bounce_flagged[i]) kept.push_back(res.panel[i]);
  }
  art.write("transactions_clean.csv", [&](std::ostream& f) { write_transactions(f, kept); });
  art.write("corrections.csv", [&](std::ostream& f) { txn::write_correction_log(f, res.corrections); });
  art.write("bounce_flags.csv", [&](std::ostream& f) { txn::write_bounce_log(f, res.bounces); });
  out << "transactions: " << panel.size() << " in, " << kept.size() << " kept, "
      << res.corrections.size() << " decimal-shift entries, " << res.bounces.size()
      << " bounce flags\n";
}

void cmd_clean_daily(const RunConfig& c, Artifacts& art, std::ostream& out) {
  const auto& path = require_input(c);
  art.input(path);
  const auto panel = load_daily(path);
  const auto res = daily::clean_daily(panel, c.distressed, c.keep_flagged, c.jobs);
  art.write("daily_clean.csv", [&](std::ostream& f) { write_daily(f, res.panel); });
  art.write("daily_flags.csv", [&](std::ostream& f) { daily::write_flag_log(f, res.flags); });
  out << "daily: " << panel.size() << " in, " << res.panel.size() << " out, " << res.flags.size()
      << " flags\n";
}

void cmd_monthly(const RunConfig& c, Artifacts& art, std::ostream& out) {
  const auto& path = require_input(c);
  art.input(path);
  std::vector<std::string> log;
  MonthlyPanel monthly;
  const auto schema = detect_schema(path);
  if (schema == Schema::monthly) {
    monthly = load_monthly(path);
  } else {
    const auto daily = load_daily(path);
    std::vector<Date> holidays;
    if (!c.paths.holidays.empty()) {
      art.input(c.paths.holidays);
      holidays = load_holidays(c.paths.holidays);
    }
    const auto cal = returns::calendar_for(daily, holidays);
    returns::SelectionLog sel;
    monthly = returns::select_monthly_prices(daily, cal, c.selection, &sel);
    log = sel.messages;
  }
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  if (!c.paths.risk_free.empty()) {
    art.input(c.paths.risk_free);
    rf = returns::RiskFreeSeries::load(c.paths.risk_free);
  }
  if (!c.paths.key_rates.empty()) {
    art.input(c.paths.key_rates);
    kr = returns::KeyRateTable::load(c.paths.key_rates);
  }
  const auto cells = monthly.size();
  const auto fp = returns::build_factor_panel(std::move(monthly),
                                              {rf ? &*rf : nullptr, kr ? &*kr : nullptr}, &log);
  art.write("monthly.csv", [&](std::ostream& f) { returns::write_monthly_returns(f, fp); });
  art.write("monthly_log.txt", [&](std::ostream& f) {
    for (const auto& l : log) f << l << '\n';
  });
  art.write("market.csv", [&](std::ostream& f) {
    csv::Writer w(f);
    w.header({"month", "mktb"});
    for (const auto& [m, v] : returns::market_factor(fp)) {
      w.row({format_month(m), csv::format_double(v)});
    }
  });
  out << "monthly: " << cells << " bond-months over " << fp.size() << " months\n";
}

void cmd_factor(const RunConfig& c, Artifacts& art, std::ostream& out) {
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  const auto fp = monthly_input(c, art, rf, kr);
  portfolio::FactorSeries series;
  if (c.sort.within_firm) {
    series = portfolio::within_firm_series(
        bias::cross_sections(fp, c.sort.signal, c.sort.approach), c.sort.spec.weighting);
  } else {
    series = bias::build_factor(fp, c.sort.signal, c.sort.spec, c.sort.approach).series;
  }
  art.write("factor.csv", [&](std::ostream& f) { portfolio::write_factor(f, series); });
  art.write("cumulative.csv", [&](std::ostream& f) { write_cumulative(f, series); });
  std::vector<stats::NamedInference> inf;
  const auto valid = series.valid_returns();
  if (valid.size() >= 2) inf.push_back({"premium", stats::nw_mean(valid)});
  if (auto a = alpha_of(series, returns::market_factor(fp))) inf.push_back({"alpha", *a});
  art.write("inference.csv", [&](std::ostream& f) { stats::write_inference(f, inf); });
  out << "factor " << c.sort.signal << " (" << bias::to_string(c.sort.approach)
      << "): " << series.points.size() << " months, " << series.degenerate_months()
      << " degenerate\n";
}

void cmd_bias(const RunConfig& c, Artifacts& art, std::ostream& out) {
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  const auto fp = monthly_input(c, art, rf, kr);
  auto spec = c.sort.spec;
  spec.holding_months = 1;
  const auto a1 = bias::build_factor(fp, c.sort.signal, spec, bias::Approach::unadjusted);
  const auto a2 = bias::build_factor(fp, c.sort.signal, spec, bias::Approach::adjusted_signal);
  const auto a3 = bias::build_factor(fp, c.sort.signal, spec, bias::Approach::adjusted_return);
  std::vector<stats::NamedInference> inf;
  const std::pair<const char*, const bias::BuiltFactor*> all[] = {
      {"unadjusted", &a1}, {"adjusted_signal", &a2}, {"adjusted_return", &a3}};
  for (const auto& [name, f] : all) {
    art.write(std::string("factor_") + name + ".csv",
              [&](std::ostream& o) { portfolio::write_factor(o, f->series); });
    const auto v = f->series.valid_returns();
    if (v.size() >= 2) inf.push_back({std::string("premium_") + name, stats::nw_mean(v)});
  }
  const auto b = bias::bias_series(fp, a1, a2);
  art.write("bias.csv", [&](std::ostream& o) {
    csv::Writer w(o);
    w.header({"month", "bias_1_2", "bias_1_3"});
    for (std::size_t i = 0; i < b.months.size(); ++i) {
      w.row({format_month(b.months[i]), csv::format_double(b.bias_1_2[i]),
             csv::format_double(b.bias_1_3[i])});
    }
  });
  if (b.bias_1_2.size() >= 2) {
    inf.push_back({"bias_1_2", stats::nw_mean(b.bias_1_2)});
    inf.push_back({"bias_1_3", stats::nw_mean(b.bias_1_3)});
  }
  art.write("inference.csv", [&](std::ostream& o) { stats::write_inference(o, inf); });
  out << "bias " << c.sort.signal << ": " << b.months.size() << " months\n";
}

void cmd_lab(const RunConfig& c, Artifacts& art, std::ostream& out) {
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  const auto fp = monthly_input(c, art, rf, kr);
  std::map<int, double> vix;
  if (!c.paths.vix.empty()) {
    art.input(c.paths.vix);
    const auto t = csv::Table::read(c.paths.vix);
    const auto cm = t.require("month");
    const auto cv = t.require("vix");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      vix[month_index(parse_month(t.row(r)[cm]))] = csv::parse_double(t.row(r)[cv], r + 1, "vix");
    }
  }
  const auto filtered = bias::apply_filter_rule(fp, c.filter);
  const auto ls = bias::lab_series(fp, filtered, c.sort.signal, c.sort.spec, c.filter);
  art.write("lab.csv",
            [&](std::ostream& o) { bias::write_lab(o, ls, c.paths.vix.empty() ? nullptr : &vix); });
  art.write("lab_deltas.csv", [&](std::ostream& o) { bias::write_delta_log(o, ls.deltas); });
  art.write("thresholds.csv", [&](std::ostream& o) {
    csv::Writer w(o);
    w.header({"month", "lower", "upper"});
    for (std::size_t k = 0; k < fp.size(); ++k) {
      const auto& t = filtered.thresholds[k];
      auto f = [](double v) { return std::isfinite(v) ? csv::format_double(v) : std::string(); };
      w.row({format_month(fp.months[k]), t ? f(t->lower) : "", t ? f(t->upper) : ""});
    }
  });
  std::vector<double> v;
  for (const auto& p : ls.points) v.push_back(p.lab);
  std::vector<stats::NamedInference> inf;
  if (v.size() >= 2) inf.push_back({"lab", stats::nw_mean(v)});
  art.write("inference.csv", [&](std::ostream& o) { stats::write_inference(o, inf); });
  out << "lab " << c.filter.label() << ": " << ls.points.size() << " months, "
      << ls.deltas.size() << " adjustments\n";
}

void cmd_grid_data(const RunConfig& c, Artifacts& art, std::ostream& out, bool count_only) {
  const auto configs = grid::enumerate_data_grid();
  if (count_only) {
    out << configs.size() << '\n';
    return;
  }
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  const auto fp = monthly_input(c, art, rf, kr);
  grid::GridOptions opt;
  opt.jobs = c.jobs;
  opt.n_portfolios = c.grid.n_portfolios;
  opt.approach = c.sort.approach;
  opt.market = returns::market_factor(fp);
  art.write("grid_manifest.csv", [&](std::ostream& o) { grid::write_data_manifest(o, configs); });
  const auto results = grid::run_data_grid(fp, c.sort.signal, configs, opt);
  art.write("grid.csv", [&](std::ostream& o) { grid::write_grid(o, results); });
  const auto s = grid::summarize(results);
  art.write("nse.csv", [&](std::ostream& o) { grid::write_nse(o, s); });
  out << "grid-data: " << s.paths << " paths, " << s.used << " aggregated, " << s.failed
      << " failed\n";
}

void cmd_grid_method(const RunConfig& c, Artifacts& art, std::ostream& out, bool count_only) {
  const auto specs = grid::enumerate_method_grid(c.grid.include_inadmissible);
  if (count_only) {
    out << specs.size() << '\n';
    return;
  }
  std::optional<returns::RiskFreeSeries> rf;
  std::optional<returns::KeyRateTable> kr;
  const auto fp = monthly_input(c, art, rf, kr);
  grid::GridOptions opt;
  opt.jobs = c.jobs;
  opt.approach = c.sort.approach;
  opt.market = returns::market_factor(fp);
  art.write("grid_manifest.csv", [&](std::ostream& o) { grid::write_method_manifest(o, specs); });
  std::vector<grid::MethodSpec> runnable;
  for (const auto& m : specs) {
    if (m.admissible) runnable.push_back(m);
  }
  const auto results = grid::run_method_grid(fp, c.sort.signal, runnable, opt);
  art.write("grid.csv", [&](std::ostream& o) { grid::write_grid(o, results); });
  const auto s = grid::summarize(results);
  art.write("nse.csv", [&](std::ostream& o) { grid::write_nse(o, s); });
  out << "grid-method: " << s.paths << " paths, " << s.used << " aggregated, "
      << s.degenerate_excluded << " degenerate\n";
}

void cmd_simulate(const RunConfig& c, Artifacts& art, std::ostream& out) {
  const auto cfg = c.resolved_sim();
  const auto res = sim::run_experiment(cfg, c.simulation.reps, c.jobs);
  art.write("sim_report.csv", [&](std::ostream& o) { sim::write_report(o, res); });
  out << "simulate " << sim::to_string(cfg.kind) << ": kappa " << csv::format_double(res.kappa)
      << ", theory " << csv::format_double(res.theory) << ", realized rho "
      << csv::format_double(res.realized_rho) << '\n';
  for (const auto& a : res.approaches) {
    out << "  " << a.approach << ": " << csv::format_double(a.measured) << " (se "
        << csv::format_double(a.mc_se) << ", z " << csv::format_double(a.z) << ")\n";
  }
}

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--input", o.input, "input CSV");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--jobs", o.jobs, "worker threads (default: BONDLAB_JOBS or 1)");
}

void add_sort(CLI::App* sub, Overrides& o) {
  sub->add_option("--signal", o.signal, "signal name (column sig_<name>)");
  sub->add_option("--approach", o.approach, "unadjusted | adjusted_signal | adjusted_return");
  sub->add_option("--n-portfolios", o.n_portfolios, "number of portfolios");
  sub->add_option("--weighting", o.weighting, "EW | VW");
  sub->add_option("--subsample", o.subsample, "all | IG | NIG");
  sub->add_option("--breakpoint-universe", o.universe, "all | ig_only | large_only");
  sub->add_option("--maturity-bucket", o.bucket, "all | short | intermediate | long");
  sub->add_option("--holding-months", o.holding_months, "overlapping cohort length");
  sub->add_option("--risk-free", o.risk_free, "CSV month,rf");
  sub->add_option("--key-rates", o.key_rates, "CSV month,duration,return");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corporate bond factor construction laboratory"};
  app.require_subcommand(1);
  Overrides o;

  auto* clean_txn = app.add_subcommand("clean-txn", "decimal-shift and bounce-back cleaning");
  auto* clean_daily = app.add_subcommand("clean-daily", "distressed-price filters");
  auto* monthly = app.add_subcommand("monthly", "month-end/month-begin prices and returns");
  auto* factor = app.add_subcommand("factor", "long-short factor for one signal");
  auto* bias = app.add_subcommand("bias", "implementation bias across the three approaches");
  auto* lab = app.add_subcommand("lab", "look-ahead bias of a return filter");
  auto* grid_data = app.add_subcommand("grid-data", "data-filter uncertainty grid");
  auto* grid_method = app.add_subcommand("grid-method", "portfolio-construction grid");
  auto* simulate = app.add_subcommand("simulate", "errors-in-variables Monte Carlo");
  for (auto* s : {clean_txn, clean_daily, monthly, factor, bias, lab, grid_data, grid_method,
                  simulate}) {
    add_common(s, o);
  }
  clean_daily->add_flag("--keep-flagged", o.keep_flagged, "keep flagged days in the output");
  monthly->add_option("--holidays", o.holidays, "one ISO date per line");
  monthly->add_option("--risk-free", o.risk_free, "CSV month,rf");
  monthly->add_option("--key-rates", o.key_rates, "CSV month,duration,return");
  for (auto* s : {factor, bias, lab, grid_data, grid_method}) add_sort(s, o);
  factor->add_flag("--within-firm", o.within_firm, "within-firm long-short");
  lab->add_option("--mode", o.mode, "winsorize | trim");
  lab->add_option("--tail", o.tail, "left | right | both");
  lab->add_option("--q", o.q, "tail probability");
  lab->add_option("--tau", o.tau, "absolute return threshold");
  lab->add_option("--info", o.info, "ex_post | ex_ante");
  lab->add_option("--burn-in", o.burn_in, "ex-ante burn-in months");
  lab->add_flag("--cross-sectional", o.cross_sectional, "per-month thresholds");
  lab->add_option("--vix", o.vix, "CSV month,vix");
  grid_data->add_flag("--count-only", o.count_only, "print the number of paths");
  grid_method->add_flag("--count-only", o.count_only, "print the number of specs");
  grid_method->add_flag("--include-inadmissible", o.include_inadmissible,
                        "keep inadmissible specs");
  simulate->add_option("--alpha", o.alpha, "tail fraction");
  simulate->add_option("--sigma-delta", o.sigma_delta, "price noise s.d.");
  simulate->add_option("--sigma-s", o.sigma_s, "true signal s.d.");
  simulate->add_option("--rho", o.rho, "noise share (overrides --sigma-s)");
  simulate->add_option("--a", o.a, "contamination loading");
  simulate->add_option("--kind", o.kind, "price_level | reversal | non_price");
  simulate->add_option("--true-premium", o.true_premium, "return per unit of true signal");
  simulate->add_option("--return-vol", o.return_vol, "idiosyncratic return volatility");
  simulate->add_option("--bonds", o.bonds, "bonds per panel");
  simulate->add_option("--months", o.months, "months per panel");
  simulate->add_option("--reps", o.reps, "replications");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  RunConfig config;
  try {
    config = resolve(o);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Artifacts art(config.paths.out);
  try {
    if (sub == clean_txn) cmd_clean_txn(config, art, out);
    else if (sub == clean_daily) cmd_clean_daily(config, art, out);
    else if (sub == monthly) cmd_monthly(config, art, out);
    else if (sub == factor) cmd_factor(config, art, out);
    else if (sub == bias) cmd_bias(config, art, out);
    else if (sub == lab) cmd_lab(config, art, out);
    else if (sub == grid_data) cmd_grid_data(config, art, out, o.count_only);
    else if (sub == grid_method) cmd_grid_method(config, art, out, o.count_only);
    else if (sub == simulate) cmd_simulate(config, art, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << name << " failed: " << e.what() << '\n';
    try {
      art.manifest(name, config, "partial", e.what());
    } catch (const std::exception&) {
    }
    return 2;
  }
  if (!o.count_only) art.manifest(name, config, "ok", "");
  return 0;
}

}  // namespace bondlab::cli
