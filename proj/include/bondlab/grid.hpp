#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bondlab/bias_lab.hpp"
#include "bondlab/portfolio.hpp"
#include "bondlab/returns.hpp"
#include "bondlab/stats.hpp"

namespace bondlab::grid {

enum class Family { return_trim, price_range, bid_ask_bounce };
enum class PriceMode { lower_only, upper_only, matched };
enum class Direction { neg, pos, both };

std::string to_string(Family f);

// One data-uncertainty path: a single formation-time filter plus a
// weighting scheme and a rating subsample.
struct DataFilterConfig {
  int id = 0;
  Family family = Family::return_trim;
  bias::Tail tail = bias::Tail::both;  // return_trim
  double tau = 0.0;                    // return_trim, decimal return
  PriceMode price_mode = PriceMode::lower_only;
  double lower = 0.0;  // price_range, percent of par
  double upper = 0.0;
  Direction direction = Direction::both;  // bid_ask_bounce
  double phi = 0.0;                       // bid_ask_bounce, fractional price change
  portfolio::Weighting weighting = portfolio::Weighting::value;
  portfolio::Subsample subsample = portfolio::Subsample::all;

  std::string params() const;
  // Formation-time exclusion decision; uses only month-t information.
  bool excludes(const returns::FormationRow& row) const;
};

// The 108 filter configurations (weighting and subsample left at defaults).
std::vector<DataFilterConfig> enumerate_filters();
// Filters crossed with {EW, VW} x {all, IG, NIG}: 648 paths.
std::vector<DataFilterConfig> enumerate_data_grid();

struct MethodSpec {
  int id = 0;
  portfolio::SortSpec spec;
  bool admissible = true;
  std::string exclusion;  // reason when inadmissible
};

// Why a sort spec is dropped from the methodology grid; nullopt if kept.
std::optional<std::string> inadmissible_reason(const portfolio::SortSpec& spec);

// 216 raw specs; 168 remain when inadmissible ones are dropped.
std::vector<MethodSpec> enumerate_method_grid(bool include_inadmissible = false);

struct PathResult {
  int config_id = 0;
  std::string family;
  std::string params;
  std::string weighting;
  std::string subsample;
  std::optional<stats::InferenceResult> premium;
  std::optional<stats::InferenceResult> alpha;
  std::size_t months = 0;
  std::size_t degenerate_months = 0;
  std::string error;
};

struct GridOptions {
  unsigned jobs = 1;
  int n_portfolios = 10;  // data grid sort granularity
  bias::Approach approach = bias::Approach::unadjusted;
  // Market factor keyed by realization month; alphas are skipped when empty.
  std::vector<std::pair<Month, double>> market;
};

std::vector<PathResult> run_data_grid(const returns::FactorPanel& panel, const std::string& signal,
                                      std::span<const DataFilterConfig> configs,
                                      const GridOptions& options);

std::vector<PathResult> run_method_grid(const returns::FactorPanel& panel,
                                        const std::string& signal,
                                        std::span<const MethodSpec> specs,
                                        const GridOptions& options);

struct NseSummary {
  std::size_t paths = 0;
  std::size_t used = 0;
  std::size_t degenerate_excluded = 0;
  std::size_t failed = 0;
  std::optional<double> premium_median;
  std::optional<double> premium_nse;
  std::optional<double> premium_ratio;
  std::optional<double> alpha_nse;
  std::optional<double> alpha_ratio;
};

// Paths with any degenerate month or an error are left out of the
// aggregates but counted.
NseSummary summarize(std::span<const PathResult> results);

// config_id,family,params,weighting,subsample,premium,prem_t,alpha,alpha_t,months,degenerate_months
void write_grid(std::ostream& out, std::span<const PathResult> results);
void write_data_manifest(std::ostream& out, std::span<const DataFilterConfig> configs);
void write_method_manifest(std::ostream& out, std::span<const MethodSpec> specs);
void write_nse(std::ostream& out, const NseSummary& s);

}  // namespace bondlab::grid
