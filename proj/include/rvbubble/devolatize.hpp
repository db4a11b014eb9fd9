#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rvbubble/error.hpp"
#include "rvbubble/realized_variance.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble {

/// Volatilities at or below this value are treated as broken data.
inline constexpr double kVolFloor = 1e-12;

enum class PseudoSource { Feasible, Infeasible };

/// Devolatized cumulative series x_0 = 0, x_1, ..., x_n.
struct PseudoSample {
  std::vector<double> values;
  PseudoSource source = PseudoSource::Feasible;

  std::size_t n() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/// x_i = sum_{s <= i} increments[s] / vols[s], accumulated left to right.
inline PseudoSample build_pseudo_sample(std::span<const double> increments,
                                        std::span<const double> vols,
                                        PseudoSource source = PseudoSource::Feasible) {
  detail::require(increments.size() == vols.size(),
                  "build_pseudo_sample: increments and vols differ in length");
  PseudoSample out;
  out.source = source;
  out.values.resize(increments.size() + 1);
  out.values[0] = 0.0;
  double acc = 0.0;
  for (std::size_t s = 0; s < increments.size(); ++s) {
    if (!(vols[s] > kVolFloor)) throw DegenerateVolatility(s + 1, vols[s]);
    acc += increments[s] / vols[s];
    detail::require(std::isfinite(acc), "build_pseudo_sample: non-finite value");
    out.values[s + 1] = acc;
  }
  return out;
}

/// Square roots of a variance sequence.
inline std::vector<double> volatilities(std::span<const double> variances) {
  std::vector<double> out(variances.size());
  for (std::size_t i = 0; i < variances.size(); ++i) out[i] = std::sqrt(variances[i]);
  return out;
}

/// Pseudo-sample of `path` devolatized by the realized volatilities `rv`.
inline PseudoSample feasible_pseudo_sample(const PricePath& path, const RVSeries& rv) {
  detail::require(rv.size() == path.n(), "feasible_pseudo_sample: RV length mismatch");
  const auto inc = path.coarse_increments();
  const auto vols = volatilities(rv.values);
  return build_pseudo_sample(inc, vols, PseudoSource::Feasible);
}

/// Pseudo-sample devolatized by the true integrated volatilities of a
/// simulated path.
inline PseudoSample infeasible_pseudo_sample(const PricePath& path) {
  const auto& ivars = path.true_integrated_vars();
  if (!ivars) {
    throw InvalidArgument("infeasible_pseudo_sample: path has no integrated variances");
  }
  const auto inc = path.coarse_increments();
  const auto vols = volatilities(*ivars);
  return build_pseudo_sample(inc, vols, PseudoSource::Infeasible);
}

}  // namespace rvbubble
