#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "rvbubble/df_engine.hpp"
#include "rvbubble/error.hpp"

namespace rvbubble {

/// One explosive episode. Indices are coarse endpoints k, fractions k / n.
struct Episode {
  std::size_t start_index = 0;
  double start = 0.0;
  std::optional<std::size_t> end_index;  ///< empty while the episode is still open
  std::optional<double> end;

  bool open() const noexcept { return !end_index.has_value(); }
  double length(double until = 1.0) const { return end.value_or(until) - start; }
};

struct EpisodeList {
  std::vector<Episode> episodes;
  double cv_used = 0.0;
  double min_duration = 0.0;

  bool empty() const noexcept { return episodes.empty(); }
};

/// Default minimum episode duration log(n) / n.
inline double default_min_duration(std::size_t n) {
  return std::log(static_cast<double>(n)) / static_cast<double>(n);
}

/// Origination at the first endpoint whose statistic exceeds `cv`;
/// conclusion at the first endpoint at least `min_duration` later whose
/// statistic falls below `cv`. Scanning resumes after each conclusion, and an
/// origination with no later down-crossing yields an open episode. Ties at
/// exactly `cv` and degenerate entries trigger neither crossing.
inline EpisodeList date_stamp(const DetectorTrace& trace, double cv, double min_duration) {
  detail::require(trace.size() > 0, "date_stamp: empty trace");
  detail::require(std::isfinite(cv), "date_stamp: cv must be finite");
  detail::require(std::isfinite(min_duration) && min_duration >= 0.0,
                  "date_stamp: min_duration must be >= 0");

  EpisodeList out;
  out.cv_used = cv;
  out.min_duration = min_duration;
  const double min_steps = min_duration * static_cast<double>(trace.n) - 1e-9;

  std::size_t m = 0;
  while (m < trace.size()) {
    while (m < trace.size() && !(trace.stats[m] > cv)) ++m;
    if (m == trace.size()) break;
    Episode ep;
    ep.start_index = trace.endpoints[m];
    ep.start = trace.fraction(m);
    ++m;
    while (m < trace.size()) {
      const double elapsed = static_cast<double>(trace.endpoints[m] - ep.start_index);
      if (elapsed >= min_steps && trace.stats[m] < cv) break;
      ++m;
    }
    if (m < trace.size()) {
      ep.end_index = trace.endpoints[m];
      ep.end = trace.fraction(m);
      ++m;
    }
    out.episodes.push_back(ep);
  }
  return out;
}

/// Convenience overload with the log(n)/n minimum duration.
inline EpisodeList date_stamp(const DetectorTrace& trace, double cv) {
  return date_stamp(trace, cv, default_min_duration(trace.n));
}

/// Drops completed episodes shorter than `min_length`; open episodes are kept.
inline EpisodeList filter_episodes(EpisodeList list, double min_length) {
  std::erase_if(list.episodes, [&](const Episode& ep) {
    return !ep.open() && ep.length() < min_length - 1e-12;
  });
  return list;
}

}  // namespace rvbubble
