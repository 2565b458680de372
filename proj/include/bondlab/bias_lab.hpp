#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bondlab/portfolio.hpp"
#include "bondlab/returns.hpp"

namespace bondlab::bias {

// unadjusted: month-end signal, month-end return.
// adjusted_signal: gapped signal, month-end return.
// adjusted_return: month-end signal, month-begin return.
enum class Approach { unadjusted, adjusted_signal, adjusted_return };

std::string to_string(Approach a);
Approach parse_approach(const std::string& s);

portfolio::Candidate make_candidate(const returns::FormationRow& row, const std::string& signal,
                                   Approach approach);

// Throws ConfigError unless some row carries the approach's signal column.
void require_signal(const returns::FactorPanel& panel, const std::string& signal,
                    Approach approach);

// Candidate cross-sections for one approach; rows marked excluded are
// dropped. Throws ConfigError when the signal (or, for adjusted_signal, its
// gapped column) is absent from the panel.
std::vector<portfolio::CrossSection> cross_sections(const returns::FactorPanel& panel,
                                                    const std::string& signal, Approach approach);

// Signed bond weights: positive in the long leg, negative in the short leg.
using Weights = std::map<std::string, double>;
using ReturnMap = std::map<std::string, double>;

struct BuiltFactor {
  portfolio::FactorSeries series;
  std::vector<Weights> weights;                // per formation month
  std::vector<std::optional<double>> long_ret;  // per formation month
  std::vector<std::optional<double>> short_ret;
};

// Single-period-holding factor for one approach.
BuiltFactor build_factor(const returns::FactorPanel& panel, const std::string& signal,
                         const portfolio::SortSpec& spec, Approach approach);

Weights signed_weights(const portfolio::PortfolioMonth& pm,
                       std::span<const portfolio::Candidate> candidates);

// (w - w_a) . r_end over bonds with a month-end return.
double bias_1_2(const Weights& w, const Weights& w_a, const ReturnMap& r_end);
// w . (r_end - r_bgn) over bonds with both returns.
double bias_1_3(const Weights& w, const ReturnMap& r_end, const ReturnMap& r_bgn);

ReturnMap end_returns(const std::vector<returns::FormationRow>& rows);
ReturnMap begin_returns(const std::vector<returns::FormationRow>& rows);

struct BiasSeries {
  std::vector<Month> months;  // realization months
  std::vector<double> bias_1_2;
  std::vector<double> bias_1_3;
};

BiasSeries bias_series(const returns::FactorPanel& panel, const BuiltFactor& unadjusted,
                       const BuiltFactor& gapped);

enum class FilterMode { winsorize, trim };
enum class Tail { left, right, both };
enum class InfoSet { ex_post, ex_ante };

struct FilterRule {
  FilterMode mode = FilterMode::winsorize;
  Tail tail = Tail::both;
  std::optional<double> q;    // tail probability per side
  std::optional<double> tau;  // absolute return threshold
  InfoSet info = InfoSet::ex_post;
  bool cross_sectional = false;
  int burn_in = 12;  // realization months required before ex-ante quantiles exist

  void validate() const;
  std::string label() const;
};

std::string to_string(FilterMode m);
std::string to_string(Tail t);
std::string to_string(InfoSet s);
FilterMode parse_filter_mode(const std::string& s);
Tail parse_tail(const std::string& s);
InfoSet parse_info_set(const std::string& s);

struct Thresholds {
  double lower = 0.0;  // -inf when the left tail is inactive
  double upper = 0.0;  // +inf when the right tail is inactive
};

// Thresholds in force at formation month index k. Ex-post quantiles pool
// every month-end return in the panel; ex-ante quantiles pool only returns
// realized up to the formation month. nullopt when fewer than two
// observations (or, ex ante, fewer than burn_in realization months) exist.
std::optional<Thresholds> thresholds(const returns::FactorPanel& panel, const FilterRule& rule,
                                     std::size_t k);

std::vector<std::optional<Thresholds>> threshold_path(const returns::FactorPanel& panel,
                                                      const FilterRule& rule);

struct DeltaEntry {
  std::string bond_id;
  Month month;  // formation month
  double raw = 0.0;
  double adjusted = 0.0;
  bool excluded = false;
  std::string leg;  // filled by lab_series
};

struct FilterOutcome {
  returns::FactorPanel panel;
  std::vector<DeltaEntry> log;
  std::vector<std::optional<Thresholds>> thresholds;
};

// Filters act on month-end returns. Winsorizing clips the holding-month
// return; ex-post trimming drops the holding-month row; ex-ante trimming
// drops at formation any bond whose month-t return breached the thresholds
// in force at t.
FilterOutcome apply_filter_rule(const returns::FactorPanel& panel, const FilterRule& rule);

struct LabPoint {
  double lab = 0.0;
  double lab_long = 0.0;
  double lab_short = 0.0;
};

// Equal-weighted leg means of the adjustments.
LabPoint lab(std::span<const double> long_deltas, std::span<const double> short_deltas);
// Leg sums of w_i * delta_i using the base factor's signed weights.
LabPoint weighted_lab(const Weights& w, const ReturnMap& delta);

struct LabSeries {
  std::vector<Month> months;  // realization months
  std::vector<LabPoint> points;
  std::vector<DeltaEntry> deltas;
};

// Filtered minus base factor, split by leg. Winsorizing keeps membership, so
// the split uses the adjustments; trimming uses leg-return differences.
LabSeries lab_series(const returns::FactorPanel& base_panel, const FilterOutcome& filtered,
                     const std::string& signal, const portfolio::SortSpec& spec,
                     const FilterRule& rule);

// month,lab,lab_long,lab_short,vix_optional
void write_lab(std::ostream& out, const LabSeries& series,
               const std::map<int, double>* vix = nullptr);

void write_delta_log(std::ostream& out, const std::vector<DeltaEntry>& log);

}  // namespace bondlab::bias
