#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rvbubble/error.hpp"

namespace rvbubble {

/// Running sums of the with-constant DF regression
///   dx_s = a + b x_{s-1} + e_s,   s = 2..k,
/// over a sample x_1, ..., x_k that grows one observation at a time.
///
/// Regressor values are stored relative to x_1, which leaves the slope and
/// its t-ratio unchanged and keeps the centered sums free of cancellation
/// when the series sits far from zero. Prefix statistics obtained while
/// pushing are bit-identical to a fresh pass over the same prefix.
class DfAccumulator {
 public:
  void push(double x) {
    if (k_ == 0) {
      pivot_ = x;
    } else {
      const double u = prev_ - pivot_;
      const double d = x - prev_;
      su_ += u;
      sd_ += d;
      suu_ += u * u;
      sud_ += u * d;
      sdd_ += d * d;
    }
    prev_ = x;
    ++k_;
  }

  /// Number of sample observations k pushed so far.
  std::size_t size() const noexcept { return k_; }

  /// t-ratio of the slope, or nullopt when the regression is degenerate
  /// (fewer than four observations, constant regressor, or exact fit).
  std::optional<double> try_t_stat() const noexcept {
    if (k_ < 4) return std::nullopt;
    constexpr double tol = 64.0 * std::numeric_limits<double>::epsilon();
    const double T = static_cast<double>(k_ - 1);
    const double sxx = suu_ - su_ * su_ / T;
    const double sxd = sud_ - su_ * sd_ / T;
    const double sdd = sdd_ - sd_ * sd_ / T;
    if (!(sxx > tol * suu_)) return std::nullopt;
    const double rss = sdd - sxd * sxd / sxx;
    if (!(rss > tol * sdd_)) return std::nullopt;
    const double sigma2 = rss / T;
    const double t = sxd / std::sqrt(sxx * sigma2);
    if (!std::isfinite(t)) return std::nullopt;
    return t;
  }

 private:
  std::size_t k_ = 0;
  double pivot_ = 0.0;
  double prev_ = 0.0;
  double su_ = 0.0, sd_ = 0.0, suu_ = 0.0, sud_ = 0.0, sdd_ = 0.0;
};

/// With-constant Dickey-Fuller t-statistic on the sample x_1..x_k:
///
///   sum dx~_s x~_{s-1} / sqrt( sum x~_{s-1}^2 * sigma2 ),   s = 2..k,
///
/// where ~ denotes centering over the k-1 regression terms and sigma2 is the
/// residual sum of squares divided by k-1. This is the OLS t-ratio on the
/// slope of dx_s regressed on (1, x_{s-1}) with that variance divisor.
inline double df_stat_with_constant(std::span<const double> sample) {
  detail::require(sample.size() >= 4, "df_stat_with_constant: need k >= 4");
  DfAccumulator acc;
  for (double x : sample) acc.push(x);
  const auto t = acc.try_t_stat();
  if (!t) throw DegenerateRegression("df_stat_with_constant: degenerate regression");
  return *t;
}

enum class TraceKind { RVDF, DF };

/// Recursive DF statistics on expanding prefixes x_1..x_k for every integer
/// endpoint k from ceil(tau0 n) to n. Degenerate prefixes hold NaN.
struct DetectorTrace {
  double tau0 = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> endpoints;
  std::vector<double> stats;
  TraceKind kind = TraceKind::RVDF;

  std::size_t size() const noexcept { return stats.size(); }
  bool degenerate(std::size_t m) const { return std::isnan(stats[m]); }
  double fraction(std::size_t m) const {
    return static_cast<double>(endpoints[m]) / static_cast<double>(n);
  }
};

/// Smallest endpoint ceil(tau0 n) of the recursive grid.
inline std::size_t first_endpoint(std::size_t n, double tau0) {
  detail::require(std::isfinite(tau0) && tau0 > 0.0 && tau0 < 1.0,
                  "tau0 must lie in (0,1)");
  const double raw = std::ceil(tau0 * static_cast<double>(n) - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

/// Detector trace over the full series x_0..x_n (x_0 is not part of any
/// regression sample). Feeding a pseudo-sample gives the RVDF detector;
/// feeding raw coarse log prices gives the classical DF detector.
inline DetectorTrace detector_trace(std::span<const double> series, double tau0,
                                    TraceKind kind = TraceKind::RVDF) {
  detail::require(series.size() >= 2, "detector_trace: series too short");
  const std::size_t n = series.size() - 1;
  const std::size_t first = first_endpoint(n, tau0);
  detail::require(first >= 4, "detector_trace: ceil(tau0*n) must be >= 4");

  DetectorTrace trace;
  trace.tau0 = tau0;
  trace.n = n;
  trace.kind = kind;
  trace.endpoints.reserve(n - first + 1);
  trace.stats.reserve(n - first + 1);

  DfAccumulator acc;
  for (std::size_t k = 1; k <= n; ++k) {
    acc.push(series[k]);
    if (k < first) continue;
    trace.endpoints.push_back(k);
    trace.stats.push_back(acc.try_t_stat().value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return trace;
}

/// Position of the largest non-degenerate statistic in the trace.
inline std::size_t argsup(const DetectorTrace& trace) {
  std::optional<std::size_t> best;
  for (std::size_t m = 0; m < trace.size(); ++m) {
    if (trace.degenerate(m)) continue;
    if (!best || trace.stats[m] > trace.stats[*best]) best = m;
  }
  if (!best) throw DegenerateRegression("sup_stat: every trace entry is degenerate");
  return *best;
}

/// Supremum of the detector trace (the PWY / RVPWY statistic).
inline double sup_stat(const DetectorTrace& trace) {
  return trace.stats[argsup(trace)];
}

/// CUSUM statistic: sup over the grid of n^{-1/2} (x_k - x_0), the scaled
/// partial sums of the increments.
inline double cusum_stat(std::span<const double> series, double tau0) {
  detail::require(series.size() >= 2, "cusum_stat: series too short");
  const std::size_t n = series.size() - 1;
  const std::size_t first = first_endpoint(n, tau0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = first; k <= n; ++k) best = std::max(best, series[k] - series[0]);
  return best / std::sqrt(static_cast<double>(n));
}

}  // namespace rvbubble
