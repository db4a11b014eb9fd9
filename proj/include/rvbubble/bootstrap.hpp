#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rvbubble/df_engine.hpp"
#include "rvbubble/error.hpp"
#include "rvbubble/parallel.hpp"
#include "rvbubble/random.hpp"

namespace rvbubble {

struct BootstrapResult {
  double observed_stat = 0.0;
  std::vector<double> boot_stats;
  double p_value = 1.0;
  std::size_t B = 0;
  std::uint64_t seed = 0;
};

/// Default multiplier law: i.i.d. Rademacher signs, one substream per
/// replication.
struct RademacherMultipliers {
  std::uint64_t seed;

  void operator()(std::size_t replication, std::span<double> out) const {
    Stream rng(seed, replication);
    for (double& eta : out) eta = rng.rademacher();
  }
};

namespace detail {

/// Sup statistic of the series rebuilt from `multipliers[i] * increments[i]`,
/// started at zero. Returns -inf when every prefix is degenerate.
inline double resampled_sup(std::span<const double> increments,
                            std::span<const double> multipliers, double tau0,
                            std::vector<double>& scratch) {
  scratch.assign(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) {
    scratch[i + 1] = scratch[i] + multipliers[i] * increments[i];
  }
  const auto trace = detector_trace(scratch, tau0, TraceKind::DF);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < trace.size(); ++m) {
    if (!trace.degenerate(m)) best = std::max(best, trace.stats[m]);
  }
  return best;
}

}  // namespace detail

/// (1 + #{boot >= observed}) / (B + 1).
inline double bootstrap_p_value(double observed, std::span<const double> boot_stats) {
  std::size_t exceed = 0;
  for (double b : boot_stats) exceed += (b >= observed) ? 1 : 0;
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(boot_stats.size()) + 1.0);
}

/// Wild-bootstrap PWY test on a raw coarse log-price series y_0..y_n.
///
/// Replication b rebuilds y^b_0 = 0, y^b_i = y^b_{i-1} + eta_i dy_i with
/// multipliers eta drawn by `multipliers(b, span)`, and recomputes the sup
/// statistic. The observed statistic is evaluated on the same construction
/// with eta = 1 (the series rebased to start at zero), which equals the sup
/// statistic of the raw series up to rounding since the regression carries a
/// constant.
template <class Multipliers>
  requires std::invocable<Multipliers&, std::size_t, std::span<double>>
BootstrapResult wild_bootstrap_pwy(std::span<const double> coarse_log_prices, double tau0,
                                   std::size_t B, std::uint64_t seed,
                                   Multipliers&& multipliers, unsigned threads = 1) {
  detail::require(B >= 1, "wild_bootstrap_pwy: B must be >= 1");
  detail::require(coarse_log_prices.size() >= 2, "wild_bootstrap_pwy: series too short");
  const std::size_t n = coarse_log_prices.size() - 1;
  detail::require(first_endpoint(n, tau0) >= 4,
                  "wild_bootstrap_pwy: ceil(tau0*n) must be >= 4");

  std::vector<double> increments(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    increments[i] = coarse_log_prices[i + 1] - coarse_log_prices[i];
    all_zero = all_zero && increments[i] == 0.0;
  }
  if (all_zero) throw DegenerateRegression("wild_bootstrap_pwy: all increments are zero");

  BootstrapResult result;
  result.B = B;
  result.seed = seed;
  {
    std::vector<double> ones(n, 1.0), scratch;
    result.observed_stat = detail::resampled_sup(increments, ones, tau0, scratch);
  }
  if (std::isinf(result.observed_stat)) {
    throw DegenerateRegression("wild_bootstrap_pwy: every prefix regression is degenerate");
  }

  result.boot_stats.resize(B);
  detail::parallel_for(B, threads, [&](std::size_t b) {
    std::vector<double> eta(n), scratch;
    multipliers(b, std::span<double>(eta));
    result.boot_stats[b] = detail::resampled_sup(increments, eta, tau0, scratch);
  });
  result.p_value = bootstrap_p_value(result.observed_stat, result.boot_stats);
  return result;
}

/// Rademacher wild bootstrap driven by `seed`.
inline BootstrapResult wild_bootstrap_pwy(std::span<const double> coarse_log_prices,
                                          double tau0, std::size_t B, std::uint64_t seed,
                                          unsigned threads = 1) {
  return wild_bootstrap_pwy(coarse_log_prices, tau0, B, seed, RademacherMultipliers{seed},
                            threads);
}

}  // namespace rvbubble
