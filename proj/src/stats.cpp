#include "bondlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"

namespace bondlab::stats {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

int nw_lags(std::size_t T) {
  std::size_t L = 0;
  while ((L + 1) * (L + 1) * (L + 1) * (L + 1) <= T) ++L;
  return static_cast<int>(L);
}

double mean(std::span<const double> x) {
  if (x.empty()) throw DomainError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double nw_lrv(std::span<const double> x, int lags) {
  if (x.empty()) throw DomainError("long-run variance of an empty sample");
  if (lags < 0) throw DomainError("negative lag count");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return 0.0;
  const double m = mean(x);
  const std::size_t T = x.size();
  auto gamma = [&](std::size_t l) {
    double s = 0.0;
    for (std::size_t t = l; t < T; ++t) s += (x[t] - m) * (x[t - l] - m);
    return s / static_cast<double>(T);
  };
  double lrv = gamma(0);
  for (int l = 1; l <= lags && static_cast<std::size_t>(l) < T; ++l) {
    lrv += 2.0 * (1.0 - static_cast<double>(l) / (lags + 1)) * gamma(static_cast<std::size_t>(l));
  }
  return std::max(lrv, 0.0);
}

double normal_two_sided_p(double t) { return std::erfc(std::fabs(t) / std::sqrt(2.0)); }

InferenceResult nw_mean(std::span<const double> x) { return nw_mean(x, nw_lags(x.size())); }

InferenceResult nw_mean(std::span<const double> x, int lags) {
  if (x.size() < 2) throw DomainError("Newey-West mean needs at least two observations");
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("non-finite value in series");
  }
  InferenceResult r;
  r.n = x.size();
  r.lags = lags;
  r.estimate = mean(x);
  r.se = std::sqrt(nw_lrv(x, lags) / static_cast<double>(x.size()));
  if (r.se > 0.0) {
    r.t = r.estimate / r.se;
    r.p = normal_two_sided_p(*r.t);
  }
  return r;
}

InferenceResult AlphaResult::alpha_inference() const {
  InferenceResult r;
  r.estimate = alpha;
  r.se = se_alpha;
  r.t = t_alpha;
  r.p = p_alpha;
  r.lags = lags;
  r.n = residuals.size();
  return r;
}

AlphaResult capmb_alpha(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) throw DomainError("factor and market series differ in length");
  const std::size_t T = y.size();
  if (T < 3) throw DomainError("alpha regression needs at least three observations");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    sxx += (x[t] - mx) * (x[t] - mx);
    sxy += (x[t] - mx) * (y[t] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("market factor has zero variance");

  AlphaResult out;
  out.beta = sxy / sxx;
  out.alpha = my - out.beta * mx;
  out.lags = nw_lags(T);
  out.fitted.resize(T);
  out.residuals.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    out.fitted[t] = out.alpha + out.beta * x[t];
    out.residuals[t] = y[t] - out.fitted[t];
  }

  // Sandwich (X'X)^-1 S (X'X)^-1 with X = [1, x].
  const double n = static_cast<double>(T);
  const double sx = mx * n;
  double sxx_raw = 0.0;
  for (double v : x) sxx_raw += v * v;
  const double det = n * sxx_raw - sx * sx;
  const double inv00 = sxx_raw / det;
  const double inv01 = -sx / det;

  auto cross = [&](std::size_t l, double& s00, double& s01, double& s10, double& s11) {
    s00 = s01 = s10 = s11 = 0.0;
    for (std::size_t t = l; t < T; ++t) {
      const double g0 = out.residuals[t];
      const double g1 = x[t] * out.residuals[t];
      const double h0 = out.residuals[t - l];
      const double h1 = x[t - l] * out.residuals[t - l];
      s00 += g0 * h0;
      s01 += g0 * h1;
      s10 += g1 * h0;
      s11 += g1 * h1;
    }
  };
  double S00, S01, S10, S11;
  cross(0, S00, S01, S10, S11);
  for (int l = 1; l <= out.lags && static_cast<std::size_t>(l) < T; ++l) {
    const double w = 1.0 - static_cast<double>(l) / (out.lags + 1);
    double a00, a01, a10, a11;
    cross(static_cast<std::size_t>(l), a00, a01, a10, a11);
    S00 += w * 2.0 * a00;
    S01 += w * (a01 + a10);
    S10 += w * (a10 + a01);
    S11 += w * 2.0 * a11;
  }
  // Element (0,0) of inv * S * inv.
  const double v00 = inv00 * (S00 * inv00 + S01 * inv01) + inv01 * (S10 * inv00 + S11 * inv01);
  out.se_alpha = std::sqrt(std::max(v00, 0.0));
  if (out.se_alpha > 0.0) {
    out.t_alpha = out.alpha / out.se_alpha;
    out.p_alpha = normal_two_sided_p(*out.t_alpha);
  }
  return out;
}

std::vector<bool> bh_fdr(std::span<const double> p, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("FDR level outside (0, 1]");
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
  std::size_t k_max = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (p[order[k - 1]] <= static_cast<double>(k) * q / static_cast<double>(m)) k_max = k;
  }
  std::vector<bool> reject(m, false);
  for (std::size_t k = 0; k < k_max; ++k) reject[order[k]] = true;
  return reject;
}

double nse(std::span<const double> estimates) {
  std::vector<double> v(estimates.begin(), estimates.end());
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
}

double nse_ratio(std::span<const double> estimates, std::span<const double> ses) {
  if (estimates.empty() || ses.empty()) throw DomainError("NSE ratio of an empty sample");
  const double sd = sample_sd(estimates);
  if (sd == 0.0) return 0.0;
  const double se = mean(ses);
  if (!(se > 0.0)) throw DomainError("mean standard error is not positive");
  return sd / se;
}

void write_inference(std::ostream& out, const std::vector<NamedInference>& rows) {
  csv::Writer w(out);
  w.header({"id", "estimate", "se", "t", "p", "lags"});
  for (const auto& r : rows) {
    w.row({r.id, csv::format_double(r.result.estimate), csv::format_double(r.result.se),
           csv::format_optional(r.result.t), csv::format_optional(r.result.p),
           std::to_string(r.result.lags)});
  }
}

}  // namespace bondlab::stats
