#pragma once

// Reference implementations used only by the tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Phi^-1 by bisection on the erfc-based CDF.
inline double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// -E[Z | Z < Phi^-1(alpha)] by composite Simpson integration of -x phi(x)
// over [-12, z_alpha].
inline double kappa(double alpha) {
  if (alpha >= 1.0) return 0.0;
  const double z = normal_quantile(alpha);
  const double a = -12.0;
  const int n = 200000;
  const double h = (z - a) / n;
  auto f = [](double x) { return -x * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
  double s = f(a) + f(z);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0 / alpha;
}

// Quantile by explicit order statistics: rank r = 1 + (n-1)p.
inline double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double r = 1.0 + (static_cast<double>(v.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(r);
  if (k >= v.size()) return v.back();
  return v[k - 1] + (r - static_cast<double>(k)) * (v[k] - v[k - 1]);
}

// Newey-West variance of the mean from the explicit double sum
// (1/T^2) sum_s sum_t w(|s-t|) e_s e_t.
inline double nw_se(const std::vector<double>& x, int lags) {
  const std::size_t T = x.size();
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(T);
  double s = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t j = 0; j < T; ++j) {
      const auto d = static_cast<int>(i > j ? i - j : j - i);
      if (d > lags) continue;
      s += (1.0 - static_cast<double>(d) / (lags + 1)) * (x[i] - m) * (x[j] - m);
    }
  }
  return std::sqrt(s / static_cast<double>(T) / static_cast<double>(T));
}

// BH rejections by checking, for every hypothesis, whether some k with
// p_(k) <= kq/m has p_i <= p_(k).
inline std::vector<bool> bh(const std::vector<double>& p, double q) {
  std::vector<double> s = p;
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(p.size());
  double cut = -1.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] <= static_cast<double>(k + 1) * q / m) cut = s[k];
  }
  std::vector<bool> out;
  for (double v : p) out.push_back(v <= cut);
  return out;
}

}  // namespace oracle
