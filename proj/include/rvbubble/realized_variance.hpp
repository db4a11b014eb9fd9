#pragma once

#include <cstddef>
#include <vector>

#include "rvbubble/error.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble {

/// Per-interval realized variances.
struct RVSeries {
  std::vector<double> values;
  bool demeaned = false;

  std::size_t size() const noexcept { return values.size(); }
};

/// Sum of squared fine increments inside interval i (1-based). With `demean`
/// the increments are centered by their within-interval mean first, which
/// needs at least two increments.
inline double realized_variance_interval(const PricePath& path, std::size_t i,
                                         bool demean) {
  detail::require(i >= 1 && i <= path.n(),
                  "realized_variance_interval: interval index out of range");
  const auto y = path.log_prices();
  const std::size_t begin = path.coarse_index(i - 1);
  const std::size_t end = path.coarse_index(i);
  const std::size_t bars = end - begin;

  double mean = 0.0;
  if (demean) {
    detail::require(bars >= 2, "realized_variance_interval: demeaning needs M >= 2");
    mean = (y[end] - y[begin]) / static_cast<double>(bars);
  }
  double sum = 0.0;
  for (std::size_t j = begin + 1; j <= end; ++j) {
    const double d = (y[j] - y[j - 1]) - mean;
    sum += d * d;
  }
  return sum;
}

inline RVSeries rv_series(const PricePath& path, bool demean) {
  RVSeries out;
  out.demeaned = demean;
  out.values.reserve(path.n());
  for (std::size_t i = 1; i <= path.n(); ++i) {
    out.values.push_back(realized_variance_interval(path, i, demean));
  }
  return out;
}

}  // namespace rvbubble
