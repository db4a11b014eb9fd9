#pragma once

#include <span>

#include "rvbubble/devolatize.hpp"
#include "rvbubble/df_engine.hpp"
#include "rvbubble/realized_variance.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble {

/// RVDF detector: realized variances, devolatized pseudo-sample, recursive DF.
inline DetectorTrace rvdf_trace(const PricePath& path, double tau0, bool demean = false) {
  const auto sample = feasible_pseudo_sample(path, rv_series(path, demean));
  return detector_trace(sample.values, tau0, TraceKind::RVDF);
}

/// Classical DF detector on the raw coarse log prices.
inline DetectorTrace df_trace(const PricePath& path, double tau0) {
  return detector_trace(path.coarse_log_prices(), tau0, TraceKind::DF);
}

inline double rvpwy_stat(const PricePath& path, double tau0, bool demean = false) {
  return sup_stat(rvdf_trace(path, tau0, demean));
}

inline double pwy_stat(const PricePath& path, double tau0) {
  return sup_stat(df_trace(path, tau0));
}

}  // namespace rvbubble
