#include "bondlab/config.hpp"

#include <fstream>
#include <set>

#include "bondlab/errors.hpp"

namespace bondlab {
namespace {

using nlohmann::json;

// Reads one JSON object, recording which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& target) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name(key), std::string("wrong type: ") + e.what());
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& target) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      target.reset();
      return;
    }
    try {
      target = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name(key), std::string("wrong type: ") + e.what());
    }
  }

  template <class Parse, class T>
  void get_enum(const char* key, T& target, Parse parse) {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    try {
      target = parse(s);
    } catch (const ConfigError& e) {
      throw ConfigError(name(key), "unknown value '" + s + "'");
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    return Section(*it, name(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(name(k.c_str()), "unknown key");
    }
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Re-raise a module validation error under the section's key path.
template <class Fn>
void validate_in(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(section + "." + e.key(), e.what());
  }
}

}  // namespace

RunConfig::RunConfig() {
  simulation.sim.seed = seed;
  filter.q = 0.005;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  root.get("seed", c.seed);
  root.get("jobs", c.jobs);

  if (auto s = root.child("paths")) {
    s->get("input", c.paths.input);
    s->get("out", c.paths.out);
    s->get("holidays", c.paths.holidays);
    s->get("risk_free", c.paths.risk_free);
    s->get("key_rates", c.paths.key_rates);
    s->get("vix", c.paths.vix);
    s->finish();
  }
  if (auto s = root.child("decimal_shift")) {
    auto& p = c.decimal_shift;
    s->get("w", p.w);
    s->get("tau_pct", p.tau_pct);
    s->get("tau_abs", p.tau_abs);
    s->get("tau_bad", p.tau_bad);
    s->get("gamma", p.gamma);
    s->get("price_floor", p.price_floor);
    s->get("price_ceiling", p.price_ceiling);
    s->get("par_band", p.par_band);
    s->get("factors", p.factors);
    s->finish();
  }
  if (auto s = root.child("bounce_back")) {
    auto& p = c.bounce_back;
    s->get("tau", p.tau);
    s->get("lookahead", p.lookahead);
    s->get("w", p.w);
    s->get("alpha_tol", p.alpha_tol);
    s->get("run_min", p.run_min);
    s->get("cooldown", p.cooldown);
    s->get("slack", p.slack);
    s->get("reassign_points", p.reassign_points);
    s->get("extend_rows", p.extend_rows);
    s->finish();
  }
  if (auto s = root.child("distressed")) {
    auto& p = c.distressed;
    s->get("tau_low", p.tau_low);
    s->get("tau_high", p.tau_high);
    s->get("tau_plateau", p.tau_plateau);
    s->get("rho_anomaly", p.rho_anomaly);
    s->get("rho_spike", p.rho_spike);
    s->get("rho_recovery", p.rho_recovery);
    s->get("rho_plateau", p.rho_plateau);
    s->get("gamma_range", p.gamma_range);
    s->get("tau_intraday", p.tau_intraday);
    s->get("window", p.window);
    s->get("run_min", p.run_min);
    s->get("round_set", p.round_set);
    s->get("keep_flagged", c.keep_flagged);
    s->finish();
  }
  if (auto s = root.child("selection")) {
    s->get("window", c.selection.window);
    s->get("max_gap", c.selection.max_gap);
    s->get("reversal_signal", c.selection.reversal_signal);
    s->finish();
  }
  if (auto s = root.child("sort")) {
    auto& p = c.sort;
    s->get("signal", p.signal);
    s->get_enum("approach", p.approach, bias::parse_approach);
    s->get("n_portfolios", p.spec.n_portfolios);
    s->get_enum("breakpoint_universe", p.spec.universe, portfolio::parse_universe);
    s->get_enum("weighting", p.spec.weighting, portfolio::parse_weighting);
    s->get_enum("subsample", p.spec.subsample, portfolio::parse_subsample);
    s->get_enum("maturity_bucket", p.spec.bucket, portfolio::parse_bucket);
    s->get("short_max", p.spec.edges.short_max);
    s->get("long_min", p.spec.edges.long_min);
    s->get("holding_months", p.spec.holding_months);
    s->get("within_firm", p.within_firm);
    s->finish();
  }
  if (auto s = root.child("filter")) {
    auto& f = c.filter;
    s->get_enum("mode", f.mode, bias::parse_filter_mode);
    s->get_enum("tail", f.tail, bias::parse_tail);
    std::optional<double> q;
    std::optional<double> tau;
    s->get_optional("q", q);
    s->get_optional("tau", tau);
    if (q || tau) {
      f.q = q;
      f.tau = tau;
    }
    s->get_enum("info", f.info, bias::parse_info_set);
    s->get("cross_sectional", f.cross_sectional);
    s->get("burn_in", f.burn_in);
    s->finish();
  }
  if (auto s = root.child("grid")) {
    s->get("n_portfolios", c.grid.n_portfolios);
    s->get("include_inadmissible", c.grid.include_inadmissible);
    s->finish();
  }
  if (auto s = root.child("simulation")) {
    auto& p = c.simulation.sim;
    s->get("n_bonds", p.n_bonds);
    s->get("n_months", p.n_months);
    s->get("sigma_delta", p.sigma_delta);
    s->get("sigma_s", p.sigma_s);
    s->get_optional("rho", c.simulation.rho);
    s->get("a", p.a);
    s->get_enum("kind", p.kind, sim::parse_signal_kind);
    s->get("alpha", p.alpha);
    s->get("true_premium", p.true_premium);
    s->get("return_vol", p.return_vol);
    s->get("reps", c.simulation.reps);
    s->finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["jobs"] = jobs;
  j["paths"] = {{"input", paths.input},       {"out", paths.out},
                {"holidays", paths.holidays}, {"risk_free", paths.risk_free},
                {"key_rates", paths.key_rates}, {"vix", paths.vix}};
  const auto& d = decimal_shift;
  j["decimal_shift"] = {{"w", d.w},
                        {"tau_pct", d.tau_pct},
                        {"tau_abs", d.tau_abs},
                        {"tau_bad", d.tau_bad},
                        {"gamma", d.gamma},
                        {"price_floor", d.price_floor},
                        {"price_ceiling", d.price_ceiling},
                        {"par_band", d.par_band},
                        {"factors", d.factors}};
  const auto& b = bounce_back;
  j["bounce_back"] = {{"tau", b.tau},
                      {"lookahead", b.lookahead},
                      {"w", b.w},
                      {"alpha_tol", b.alpha_tol},
                      {"run_min", b.run_min},
                      {"cooldown", b.cooldown},
                      {"slack", b.slack},
                      {"reassign_points", b.reassign_points},
                      {"extend_rows", b.extend_rows}};
  const auto& p = distressed;
  j["distressed"] = {{"tau_low", p.tau_low},
                     {"tau_high", p.tau_high},
                     {"tau_plateau", p.tau_plateau},
                     {"rho_anomaly", p.rho_anomaly},
                     {"rho_spike", p.rho_spike},
                     {"rho_recovery", p.rho_recovery},
                     {"rho_plateau", p.rho_plateau},
                     {"gamma_range", p.gamma_range},
                     {"tau_intraday", p.tau_intraday},
                     {"window", p.window},
                     {"run_min", p.run_min},
                     {"round_set", p.round_set},
                     {"keep_flagged", keep_flagged}};
  j["selection"] = {{"window", selection.window},
                    {"max_gap", selection.max_gap},
                    {"reversal_signal", selection.reversal_signal}};
  const auto& s = sort.spec;
  j["sort"] = {{"signal", sort.signal},
               {"approach", bias::to_string(sort.approach)},
               {"n_portfolios", s.n_portfolios},
               {"breakpoint_universe", portfolio::to_string(s.universe)},
               {"weighting", portfolio::to_string(s.weighting)},
               {"subsample", portfolio::to_string(s.subsample)},
               {"maturity_bucket", portfolio::to_string(s.bucket)},
               {"short_max", s.edges.short_max},
               {"long_min", s.edges.long_min},
               {"holding_months", s.holding_months},
               {"within_firm", sort.within_firm}};
  j["filter"] = {{"mode", bias::to_string(filter.mode)},
                 {"tail", bias::to_string(filter.tail)},
                 {"q", filter.q ? json(*filter.q) : json(nullptr)},
                 {"tau", filter.tau ? json(*filter.tau) : json(nullptr)},
                 {"info", bias::to_string(filter.info)},
                 {"cross_sectional", filter.cross_sectional},
                 {"burn_in", filter.burn_in}};
  j["grid"] = {{"n_portfolios", grid.n_portfolios},
               {"include_inadmissible", grid.include_inadmissible}};
  const auto& m = simulation.sim;
  j["simulation"] = {{"n_bonds", m.n_bonds},
                     {"n_months", m.n_months},
                     {"sigma_delta", m.sigma_delta},
                     {"sigma_s", m.sigma_s},
                     {"rho", simulation.rho ? json(*simulation.rho) : json(nullptr)},
                     {"a", m.a},
                     {"kind", sim::to_string(m.kind)},
                     {"alpha", m.alpha},
                     {"true_premium", m.true_premium},
                     {"return_vol", m.return_vol},
                     {"reps", simulation.reps}};
  return j;
}

sim::SimConfig RunConfig::resolved_sim() const {
  auto s = simulation.sim;
  s.seed = seed;
  if (simulation.rho) s.sigma_s = sim::sigma_s_for_rho(s, *simulation.rho);
  return s;
}

void RunConfig::validate() const {
  if (jobs < 1) throw ConfigError("jobs", "must be at least 1");
  validate_in("decimal_shift", [&] { decimal_shift.validate(); });
  validate_in("bounce_back", [&] { bounce_back.validate(); });
  validate_in("distressed", [&] { distressed.validate(); });
  if (selection.window < 1) throw ConfigError("selection.window", "must be at least 1");
  if (selection.max_gap < 1) throw ConfigError("selection.max_gap", "must be at least 1");
  validate_in("sort", [&] { sort.spec.validate(); });
  if (sort.signal.empty()) throw ConfigError("sort.signal", "must not be empty");
  validate_in("filter", [&] { filter.validate(); });
  if (grid.n_portfolios < 2) throw ConfigError("grid.n_portfolios", "must be at least 2");
  validate_in("simulation", [&] { resolved_sim().validate(); });
  if (simulation.reps < 2) throw ConfigError("simulation.reps", "must be at least 2");
}

}  // namespace bondlab
