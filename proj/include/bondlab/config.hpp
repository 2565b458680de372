#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "bondlab/bias_lab.hpp"
#include "bondlab/ceiv_sim.hpp"
#include "bondlab/daily_clean.hpp"
#include "bondlab/portfolio.hpp"
#include "bondlab/returns.hpp"
#include "bondlab/txn_clean.hpp"

namespace bondlab {

struct PathsConfig {
  std::string input;
  std::string out = "out";
  std::string holidays;
  std::string risk_free;
  std::string key_rates;
  std::string vix;
};

struct SortConfig {
  std::string signal = "str";
  bias::Approach approach = bias::Approach::unadjusted;
  portfolio::SortSpec spec;
  bool within_firm = false;
};

struct GridConfig {
  int n_portfolios = 10;
  bool include_inadmissible = false;
};

struct SimulationConfig {
  sim::SimConfig sim;
  std::optional<double> rho;  // overrides sigma_s when set
  int reps = 20;
};

// Every key is optional; unknown keys are rejected with a ConfigError
// naming the dotted key path.
struct RunConfig {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  PathsConfig paths;
  txn::DecimalShiftParams decimal_shift;
  txn::BounceBackParams bounce_back;
  daily::DistressedParams distressed;
  bool keep_flagged = false;
  returns::SelectionOptions selection;
  SortConfig sort;
  bias::FilterRule filter;
  GridConfig grid;
  SimulationConfig simulation;

  RunConfig();

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Applies rho and the seed to the simulator configuration.
  sim::SimConfig resolved_sim() const;
  void validate() const;
};

}  // namespace bondlab
