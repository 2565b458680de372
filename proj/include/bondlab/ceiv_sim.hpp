#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bondlab/panel.hpp"
#include "bondlab/portfolio.hpp"

namespace bondlab::sim {

enum class SignalKind { price_level, reversal, non_price };

std::string to_string(SignalKind k);
SignalKind parse_signal_kind(const std::string& s);

// Measurement model: observed month-end price (1 + delta) P with delta iid
// N(0, sigma_delta^2). The observed signal is s plus a noise term eta:
//   price_level  eta = a * delta_t
//   reversal     eta = a * (delta_t - delta_{t-1})
//   non_price    eta = |a| * sigma_delta * xi, xi independent of delta
struct SimConfig {
  int n_bonds = 1000;
  int n_months = 120;
  double sigma_delta = 0.005;
  double sigma_s = 0.0;
  double a = -1.0;
  SignalKind kind = SignalKind::price_level;
  double alpha = 0.10;         // tail fraction; 1/alpha portfolios
  double true_premium = 0.0;   // expected return per unit of true signal
  double return_vol = 0.02;    // idiosyncratic monthly return volatility
  std::uint64_t seed = 1;

  void validate() const;
  int n_portfolios() const;
  double sigma_eta() const;
  double rho() const;
  // Canonical key=value text used for the report hash.
  std::string canonical() const;
};

// sigma_s giving noise share rho for the configured kind, a and sigma_delta.
double sigma_s_for_rho(const SimConfig& config, double rho);

// -E[Z | Z < Phi^-1(alpha)] = phi(z_alpha) / alpha. Throws DomainError for
// alpha outside (0, 1].
double kappa(double alpha);

// Closed-form Approach-1 long-short bias for the configuration.
double theoretical_bias(const SimConfig& config);

// Unobservable components kept alongside each simulated cell.
struct CellTruth {
  double delta = 0.0;
  double delta_bgn = 0.0;  // month-begin noise of t+1
  double delta_gap = 0.0;  // noise of the gapped signal price
  double s = 0.0;
  double eta = 0.0;
  double r_true = 0.0;  // true return over t+1 (NaN in the last month)
  double r_obs = 0.0;   // observed month-end return over t+1
};

struct SimPanel {
  MonthlyPanel panel;             // sorted by (bond_id, month)
  std::vector<CellTruth> truth;   // parallel to panel
};

inline constexpr const char* kSimSignal = "sim";

// One replication of the synthetic market. `rep` selects an independent
// stream under the same seed.
SimPanel simulate_panel(const SimConfig& config, std::uint64_t rep = 0);

struct ApproachResult {
  std::string approach;
  double measured = 0.0;
  double mc_se = 0.0;
  double theory = 0.0;
  double z = 0.0;
};

struct SimResult {
  std::array<ApproachResult, 3> approaches;  // unadjusted, adjusted_signal, adjusted_return
  double theory = 0.0;
  double kappa = 0.0;
  double realized_rho = 0.0;
  double noise_cov = 0.0;  // sample Cov(eta, epsilon)
  int reps = 0;
  std::string config_hash;
};

// Replication means of the three approaches' long-short premia with Monte
// Carlo standard errors across replications (reps >= 2).
SimResult run_experiment(const SimConfig& config, int reps, unsigned jobs = 1);

// Approximate Monte Carlo standard error of the Approach-1 mean:
// sqrt(2 v / (alpha N)) / sqrt((T - 1) reps) with v = return_vol^2 + 2 sigma_delta^2.
double predicted_mc_se(const SimConfig& config, int reps);

struct Decomposition {
  std::vector<double> measured;  // long-short of observed returns
  std::vector<double> true_part; // same weights on true returns
  std::vector<double> bias_part; // same weights on observed minus true
};

// Approach-1 long-short split into its true-return and measurement-error
// parts using identical portfolio weights.
Decomposition decompose(const SimPanel& sim, const portfolio::SortSpec& spec);

// Sample covariance of eta with epsilon = r_obs - r_true.
double noise_covariance(const SimPanel& sim);
double realized_rho(const SimPanel& sim);

struct FootnoteResult {
  double measured_ls = 0.0;
  double true_ls = 0.0;
};

// Two bonds at true price 100 observed at 100.5 and 99.5, sorted on the
// price-level signal, both observed at 100 the next month.
FootnoteResult footnote_economy(double delta = 0.005);

// Momentum-style harness: occasional crashes followed by right-tail
// rebounds that land in the loser (short) leg. Signal "mom" is the month-t
// return.
struct ReboundConfig {
  int n_bonds = 500;
  int n_months = 120;
  double return_vol = 0.02;
  double crash_prob = 0.03;
  double crash_return = -0.30;
  double rebound_prob = 0.5;
  double rebound_min = 0.30;
  double rebound_max = 0.50;
  std::uint64_t seed = 7;

  void validate() const;
};

MonthlyPanel simulate_rebound_panel(const ReboundConfig& config, std::uint64_t rep = 0);

// config_hash,approach,measured,mc_se,theory,z
void write_report(std::ostream& out, const SimResult& result);

}  // namespace bondlab::sim
