#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bondlab/dates.hpp"

namespace bondlab::portfolio {

enum class Universe { all, ig_only, large_only };
enum class Weighting { equal, value };
enum class Subsample { all, ig, nig };
enum class MaturityBucket { all, short_term, intermediate, long_term };

std::string to_string(Universe v);
std::string to_string(Weighting v);
std::string to_string(Subsample v);
std::string to_string(MaturityBucket v);
Universe parse_universe(const std::string& s);
Weighting parse_weighting(const std::string& s);
Subsample parse_subsample(const std::string& s);
MaturityBucket parse_bucket(const std::string& s);

// Maturity bucket edges in years: short < short_max <= intermediate < long_min <= long.
struct BucketEdges {
  double short_max = 5.0;
  double long_min = 10.0;
};

struct SortSpec {
  int n_portfolios = 10;
  Universe universe = Universe::all;
  Weighting weighting = Weighting::value;
  Subsample subsample = Subsample::all;
  MaturityBucket bucket = MaturityBucket::all;
  BucketEdges edges;
  // Overlapping equal-weighted cohorts held for this many months.
  int holding_months = 1;

  void validate() const;
  std::string label() const;
};

// One bond in a formation-month cross-section. `ret` is the holding-month
// return; rows without one cannot be held.
struct Candidate {
  std::string bond_id;
  std::string firm_id;
  double signal = 0.0;  // NaN when missing
  std::optional<double> ret;
  double market_value = 0.0;
  int rating = 0;
  std::optional<double> maturity_years;
};

// n-1 cutoffs at the k/n quantiles. Throws DomainError when `values` is
// empty or n < 2.
std::vector<double> breakpoints(std::vector<double> values, int n);

// Portfolio 1..n for each value (value <= cutoff goes to the lower
// portfolio); 0 marks a missing (non-finite) signal.
std::vector<int> assign(std::span<const double> values, std::span<const double> cutoffs);

// Equal or market-value weighted mean. Throws DomainError when empty or
// when value weights do not sum to a positive number.
double leg_return(std::span<const double> returns, std::span<const double> market_values,
                  Weighting weighting);

struct Member {
  std::size_t index = 0;  // position in the candidate list
  double weight = 0.0;
};

struct PortfolioMonth {
  std::vector<std::vector<Member>> portfolios;  // index 0 = lowest signal
  std::vector<std::optional<double>> returns;
  std::optional<double> long_short;
  std::size_t long_n = 0;
  std::size_t short_n = 0;
  bool degenerate = true;

  const std::vector<Member>& long_leg() const { return portfolios.back(); }
  const std::vector<Member>& short_leg() const { return portfolios.front(); }
};

bool in_subsample(const Candidate& c, Subsample s);
bool in_bucket(const Candidate& c, MaturityBucket b, const BucketEdges& edges);

// Sort one formation-month cross-section. Only candidates with a finite
// signal and a holding-month return in the requested subsample and bucket
// are eligible; breakpoints come from the eligible bonds in the universe
// and are applied to every eligible bond.
PortfolioMonth form_month(std::span<const Candidate> candidates, const SortSpec& spec);

struct FactorPoint {
  Month month;  // realization month
  double r_ls = 0.0;
  std::size_t long_n = 0;
  std::size_t short_n = 0;
  bool degenerate = false;
};

struct FactorSeries {
  std::vector<FactorPoint> points;

  std::vector<double> valid_returns() const;
  std::size_t degenerate_months() const;
};

struct CrossSection {
  Month month;  // formation month
  std::vector<Candidate> rows;
};

// Long-short series with one point per formation month (dated at the
// realization month). With holding_months = k > 1 the return averages the
// live cohorts formed over the last k months.
FactorSeries long_short(std::span<const CrossSection> months, const SortSpec& spec);

struct WithinFirmResult {
  std::optional<double> value;
  std::size_t firms = 0;
};

// Per firm with at least two eligible bonds: the highest-signal bond(s)
// minus the lowest-signal bond(s), each leg equally weighted. Firms are
// combined by total market value or equally.
WithinFirmResult within_firm_factor(std::span<const Candidate> candidates, Weighting weighting);

FactorSeries within_firm_series(std::span<const CrossSection> months, Weighting weighting);

// month,r_ls,long_n,short_n,degenerate
void write_factor(std::ostream& out, const FactorSeries& series);

}  // namespace bondlab::portfolio
