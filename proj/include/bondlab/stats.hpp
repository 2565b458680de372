#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bondlab::stats {

// Quantiles interpolate linearly between order statistics at h = (n-1)p.
// This convention is shared by thresholds, breakpoints and NSE.
double quantile_sorted(std::span<const double> sorted, double p);
double quantile(std::vector<double> values, double p);

// floor(T^0.25), computed without floating-point rounding at perfect powers.
int nw_lags(std::size_t T);

// Bartlett-kernel long-run variance of the demeaned series with population
// (1/T) autocovariances.
double nw_lrv(std::span<const double> x, int lags);

double normal_two_sided_p(double t);

struct InferenceResult {
  double estimate = 0.0;
  double se = 0.0;
  std::optional<double> t;  // undefined when se == 0
  std::optional<double> p;
  int lags = 0;
  std::size_t n = 0;
};

// Mean with Newey-West standard error. Throws DomainError when T < 2 or a
// value is not finite.
InferenceResult nw_mean(std::span<const double> x);
InferenceResult nw_mean(std::span<const double> x, int lags);

struct AlphaResult {
  double alpha = 0.0;
  double beta = 0.0;
  double se_alpha = 0.0;
  std::optional<double> t_alpha;
  std::optional<double> p_alpha;
  int lags = 0;
  std::vector<double> fitted;
  std::vector<double> residuals;

  InferenceResult alpha_inference() const;
};

// OLS of the factor on the market factor with a HAC (Bartlett) covariance
// for the intercept. Throws DomainError on length mismatch, T < 3, or a
// regressor without variance.
AlphaResult capmb_alpha(std::span<const double> factor, std::span<const double> market);

// Benjamini-Hochberg step-up rejections at level q.
std::vector<bool> bh_fdr(std::span<const double> p_values, double q);

// Interquartile range of estimates across paths.
double nse(std::span<const double> estimates);

// Sample standard deviation of the estimates over the mean standard error.
double nse_ratio(std::span<const double> estimates, std::span<const double> ses);

double mean(std::span<const double> x);
double sample_sd(std::span<const double> x);

struct NamedInference {
  std::string id;
  InferenceResult result;
};

// id,estimate,se,t,p,lags
void write_inference(std::ostream& out, const std::vector<NamedInference>& rows);

}  // namespace bondlab::stats
