#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rvbubble/error.hpp"
#include "rvbubble/grid.hpp"
#include "rvbubble/kappa_schedule.hpp"
#include "rvbubble/random.hpp"

namespace rvbubble {

/// Heston variance dynamics d(s2) = a (b - s2) dt + c_vv sqrt(s2) dW.
struct HestonParams {
  double a = 0.05;
  double b = 0.25;
  double c_vv = 0.30;
  double sigma0_sq = 0.25;

  /// Variance process started at its long-run level b.
  static HestonParams at_long_run(double a, double b, double c_vv) {
    return {a, b, c_vv, b};
  }

  /// Degenerate parameters giving a constant variance `sigma_sq`.
  static HestonParams constant(double sigma_sq) { return {0.0, sigma_sq, 0.0, sigma_sq}; }

  void validate() const {
    detail::require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c_vv) &&
                        std::isfinite(sigma0_sq),
                    "HestonParams: parameters must be finite");
    detail::require(a >= 0.0, "HestonParams: a must be >= 0");
    detail::require(b > 0.0, "HestonParams: b must be > 0");
    detail::require(c_vv >= 0.0, "HestonParams: c_vv must be >= 0");
    detail::require(sigma0_sq > 0.0, "HestonParams: sigma0_sq must be > 0");
  }
};

/// Log prices on the fine grid, with the latent variance path and the true
/// per-interval integrated variances when the path was simulated.
///
/// Regular paths hold n*M+1 prices and interval i spans fine indices
/// [(i-1)M, iM]. Ragged paths (ingested data with an unequal bar count per
/// interval) carry explicit interval bounds instead; their grid's M is the
/// largest bar count.
class PricePath {
 public:
  PricePath(GridSpec grid, std::vector<double> log_prices)
      : grid_(grid), log_prices_(std::move(log_prices)) {
    detail::require(log_prices_.size() == grid_.fine_steps() + 1,
                    "PricePath: log_prices must hold n*M+1 values");
    check_finite();
  }

  PricePath(GridSpec grid, std::vector<double> log_prices,
            std::vector<std::size_t> bounds)
      : grid_(grid), log_prices_(std::move(log_prices)), bounds_(std::move(bounds)) {
    detail::require(bounds_->size() == grid_.n() + 1,
                    "PricePath: bounds must hold n+1 fine indices");
    detail::require(bounds_->front() == 0 && bounds_->back() + 1 == log_prices_.size(),
                    "PricePath: bounds must cover the fine series");
    for (std::size_t i = 1; i < bounds_->size(); ++i) {
      detail::require((*bounds_)[i] > (*bounds_)[i - 1],
                      "PricePath: every interval needs at least one increment");
    }
    check_finite();
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t n() const noexcept { return grid_.n(); }
  std::span<const double> log_prices() const noexcept { return log_prices_; }
  bool ragged() const noexcept { return bounds_.has_value(); }

  const std::optional<std::vector<double>>& vol_path() const noexcept { return vol_path_; }
  const std::optional<std::vector<double>>& true_integrated_vars() const noexcept {
    return true_ivars_;
  }

  /// Fine index of low-frequency time t_i, 0 <= i <= n.
  std::size_t coarse_index(std::size_t i) const {
    detail::require(i <= n(), "PricePath: coarse index out of range");
    return bounds_ ? (*bounds_)[i] : i * grid_.M();
  }

  /// Number of fine increments in interval i (1-based).
  std::size_t bars_in_interval(std::size_t i) const {
    detail::require(i >= 1 && i <= n(), "PricePath: interval index out of range");
    return coarse_index(i) - coarse_index(i - 1);
  }

  /// y_{t_0}, ..., y_{t_n}.
  std::vector<double> coarse_log_prices() const {
    std::vector<double> out(n() + 1);
    for (std::size_t i = 0; i <= n(); ++i) out[i] = log_prices_[coarse_index(i)];
    return out;
  }

  /// y_{t_i} - y_{t_{i-1}} for i = 1..n.
  std::vector<double> coarse_increments() const {
    std::vector<double> out(n());
    for (std::size_t i = 1; i <= n(); ++i) {
      out[i - 1] = log_prices_[coarse_index(i)] - log_prices_[coarse_index(i - 1)];
    }
    return out;
  }

  void set_latent(std::vector<double> vol_path, std::vector<double> true_ivars) {
    detail::require(vol_path.size() == log_prices_.size(),
                    "PricePath: vol_path must match log_prices");
    detail::require(true_ivars.size() == n(),
                    "PricePath: integrated variances must hold n values");
    vol_path_ = std::move(vol_path);
    true_ivars_ = std::move(true_ivars);
  }

 private:
  void check_finite() const {
    for (double v : log_prices_) {
      detail::require(std::isfinite(v), "PricePath: log prices must be finite");
    }
  }

  GridSpec grid_;
  std::vector<double> log_prices_;
  std::optional<std::vector<std::size_t>> bounds_;
  std::optional<std::vector<double>> vol_path_;
  std::optional<std::vector<double>> true_ivars_;
};

/// Euler-Maruyama path of
///   dy = kappa_t y dt + sigma_t dW1,   d(s2) = a (b - s2) dt + c sqrt(s2) dW2
/// with W1, W2 independent, y_0 = 0, and full truncation of the variance
/// (max(s2, 0) inside both coefficients). One step per fine grid point; the
/// drift uses y at the left end of each step. `replication` selects the
/// random substream, so (seed, replication) fully determines the path.
///
/// The stored variance path is the truncated one, max(s2, 0). The true
/// integrated variance of interval i is the left Riemann sum of that path,
/// which is the exact conditional variance of the simulated increment.
inline PricePath simulate_heston(const HestonParams& params,
                                 const KappaSchedule& schedule,
                                 const GridSpec& grid, std::uint64_t seed,
                                 std::uint64_t replication = 0) {
  params.validate();
  const std::size_t n = grid.n();
  const std::size_t M = grid.M();
  const double h = grid.h();
  const double sqrt_h = std::sqrt(h);

  std::vector<double> y(grid.fine_steps() + 1);
  std::vector<double> var(grid.fine_steps() + 1);
  std::vector<double> ivars(n);

  const auto* crash = std::get_if<MildBubbleCrash>(&schedule.variant());
  const std::size_t crash_entry = crash ? grid.snap(crash->start) : 0;
  const std::size_t crash_exit = crash ? grid.snap(crash->end) : 0;

  Stream rng(seed, replication);
  double level = 0.0;
  double v = params.sigma0_sq;
  std::size_t k = 0;
  y[0] = level;
  var[0] = std::max(v, 0.0);

  for (std::size_t i = 1; i <= n; ++i) {
    const double kappa = schedule.kappa_on_interval(i, grid);
    double var_sum = 0.0;
    for (std::size_t j = 0; j < M; ++j, ++k) {
      const double vp = std::max(v, 0.0);
      const double vol = std::sqrt(vp);
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      var_sum += vp;
      level += kappa * level * h + vol * sqrt_h * z1;
      v += params.a * (params.b - vp) * h + params.c_vv * vol * sqrt_h * z2;
      y[k + 1] = level;
      var[k + 1] = std::max(v, 0.0);
    }
    ivars[i - 1] = var_sum * grid.H() / static_cast<double>(M);
    if (crash && i == crash_exit) {
      level = y[crash_entry * M] + crash->reinit_offset;
      y[k] = level;
    }
  }

  PricePath path(grid, std::move(y));
  path.set_latent(std::move(var), std::move(ivars));
  return path;
}

/// Conditional mean y_anchor * exp(kappa (t - t_entry)) of the explosive
/// regime solution at time t, given the value y_anchor at regime entry. The
/// stochastic-integral part of the solution has mean zero. Test oracle only.
inline double regime_solution_mean(const KappaSchedule& schedule,
                                   const GridSpec& grid, double t,
                                   double y_anchor) {
  const auto entry = schedule.entry_index(grid);
  if (!entry) throw InvalidArgument("regime_solution_mean: schedule has no explosive regime");
  const double t_entry = grid.coarse_time(*entry);
  const double t_exit = grid.coarse_time(*schedule.exit_index(grid));
  detail::require(std::isfinite(t) && t >= t_entry && t <= t_exit,
                  "regime_solution_mean: t outside the explosive regime");
  return y_anchor * std::exp(schedule.explosive_rate(grid) * (t - t_entry));
}

}  // namespace rvbubble
