#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>

#include "rvbubble/error.hpp"
#include "rvbubble/grid.hpp"

namespace rvbubble {

/// kappa_t = 0 throughout: the unit-root null.
struct NullRegime {};

/// kappa_t = kappa for t > t_{floor(start n)}, 0 before.
struct OneShift {
  double start;
  double kappa;
};

/// kappa_t = c / n^alpha on (t_{floor(start n)}, t_{floor(end n)}], 0
/// elsewhere; at t_{floor(end n)} the process is reset to its value at regime
/// entry plus `reinit_offset`.
struct MildBubbleCrash {
  double start;
  double end;
  double c;
  double alpha;
  double reinit_offset = 0.0;

  /// Schedule whose drift rate equals `kappa` at sample size `n`.
  static MildBubbleCrash with_effective_kappa(double start, double end,
                                              double kappa, double alpha,
                                              std::size_t n,
                                              double reinit_offset = 0.0) {
    return {start, end, kappa * std::pow(static_cast<double>(n), alpha), alpha,
            reinit_offset};
  }
};

/// Piecewise-constant drift schedule of the log-price SDE. Regime boundaries
/// snap to low-frequency time points.
class KappaSchedule {
 public:
  using Variant = std::variant<NullRegime, OneShift, MildBubbleCrash>;

  KappaSchedule() = default;
  KappaSchedule(NullRegime r) : v_(r) {}
  KappaSchedule(OneShift r) : v_(r) { validate(); }
  KappaSchedule(MildBubbleCrash r) : v_(r) { validate(); }

  const Variant& variant() const noexcept { return v_; }
  bool is_null() const noexcept { return std::holds_alternative<NullRegime>(v_); }
  bool is_one_shift() const noexcept { return std::holds_alternative<OneShift>(v_); }
  bool is_bubble_crash() const noexcept {
    return std::holds_alternative<MildBubbleCrash>(v_);
  }

  /// Drift rate on low-frequency interval i (1-based), i.e. on (t_{i-1}, t_i].
  double kappa_on_interval(std::size_t i, const GridSpec& grid) const {
    if (const auto* s = std::get_if<OneShift>(&v_)) {
      return i > grid.snap(s->start) ? s->kappa : 0.0;
    }
    if (const auto* s = std::get_if<MildBubbleCrash>(&v_)) {
      const std::size_t i1 = grid.snap(s->start);
      const std::size_t i2 = grid.snap(s->end);
      return (i > i1 && i <= i2) ? explosive_rate(grid) : 0.0;
    }
    return 0.0;
  }

  /// Rate in force during the explosive regime (0 for the null).
  double explosive_rate(const GridSpec& grid) const {
    if (const auto* s = std::get_if<OneShift>(&v_)) return s->kappa;
    if (const auto* s = std::get_if<MildBubbleCrash>(&v_)) {
      return s->c / std::pow(static_cast<double>(grid.n()), s->alpha);
    }
    return 0.0;
  }

  /// Coarse index where the explosive regime begins (none for the null).
  std::optional<std::size_t> entry_index(const GridSpec& grid) const {
    if (const auto* s = std::get_if<OneShift>(&v_)) return grid.snap(s->start);
    if (const auto* s = std::get_if<MildBubbleCrash>(&v_)) return grid.snap(s->start);
    return std::nullopt;
  }

  /// Coarse index of the explosive regime's last point: n for a one-time
  /// shift, floor(end n) for the crash schedule.
  std::optional<std::size_t> exit_index(const GridSpec& grid) const {
    if (std::holds_alternative<OneShift>(v_)) return grid.n();
    if (const auto* s = std::get_if<MildBubbleCrash>(&v_)) return grid.snap(s->end);
    return std::nullopt;
  }

 private:
  void validate() const {
    auto in_unit = [](double f) { return std::isfinite(f) && f > 0.0 && f < 1.0; };
    if (const auto* s = std::get_if<OneShift>(&v_)) {
      detail::require(in_unit(s->start), "OneShift: start must lie in (0,1)");
      detail::require(std::isfinite(s->kappa) && s->kappa >= 0.0,
                      "OneShift: kappa must be finite and >= 0");
    } else if (const auto* s = std::get_if<MildBubbleCrash>(&v_)) {
      detail::require(in_unit(s->start) && in_unit(s->end) && s->start < s->end,
                      "MildBubbleCrash: need 0 < start < end < 1");
      detail::require(std::isfinite(s->c) && s->c > 0.0,
                      "MildBubbleCrash: c must be positive");
      detail::require(std::isfinite(s->alpha) && s->alpha > 0.0 && s->alpha < 1.0,
                      "MildBubbleCrash: alpha must lie in (0,1)");
      detail::require(std::isfinite(s->reinit_offset),
                      "MildBubbleCrash: reinit offset must be finite");
    }
  }

  Variant v_{NullRegime{}};
};

}  // namespace rvbubble
