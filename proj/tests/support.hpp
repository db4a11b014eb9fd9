#pragma once

// Independent oracles shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rvbubble::oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov-Smirnov test of `sample` against N(0,1). Returns the p-value
/// from the Kolmogorov limiting law with Stephens' small-sample correction.
inline double ks_normal_p_value(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    p += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Slope t-ratio of dx_s on (1, x_{s-1}), s = 2..k, from the raw normal
/// equations with sigma^2 = RSS / (k - 1).
inline double ols_df_oracle(std::span<const double> x) {
  const std::size_t k = x.size();
  double n = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t s = 1; s < k; ++s) {
    const double xl = x[s - 1], dy = x[s] - x[s - 1];
    n += 1;
    sx += xl;
    sxx += xl * xl;
    sy += dy;
    sxy += xl * dy;
  }
  const double det = n * sxx - sx * sx;
  const double a = (sxx * sy - sx * sxy) / det;
  const double b = (n * sxy - sx * sy) / det;
  double rss = 0;
  for (std::size_t s = 1; s < k; ++s) {
    const double e = (x[s] - x[s - 1]) - a - b * x[s - 1];
    rss += e * e;
  }
  const double sigma2 = rss / static_cast<double>(k - 1);
  const double var_b = sigma2 * n / det;  // [(X'X)^{-1}]_{22} = n / det
  return b / std::sqrt(var_b);
}

inline std::vector<double> random_walk(std::size_t steps, std::uint64_t seed, double start = 0.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z;
  std::vector<double> x{start};
  for (std::size_t i = 0; i < steps; ++i) x.push_back(x.back() + z(eng));
  return x;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace rvbubble::oracle
