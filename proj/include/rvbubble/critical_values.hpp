#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rvbubble/df_engine.hpp"
#include "rvbubble/error.hpp"
#include "rvbubble/format.hpp"
#include "rvbubble/parallel.hpp"
#include "rvbubble/random.hpp"

namespace rvbubble {

enum class CvKind {
  PwySup,      ///< sup of recursive DF statistics (PWY and RVPWY)
  DfMarginal,  ///< a single DF statistic, used by the date-stamping detector
};

namespace detail {

inline bool same_level(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace detail

/// Tabulated constants: 2.094 / 1.468 / 1.184 for the sup statistic at the
/// 1% / 5% / 10% levels, and -0.08 for the 5% right tail of a single DF
/// statistic.
inline double builtin_cv(CvKind kind, double level) {
  if (kind == CvKind::PwySup) {
    if (detail::same_level(level, 0.01)) return 2.094;
    if (detail::same_level(level, 0.05)) return 1.468;
    if (detail::same_level(level, 0.10)) return 1.184;
  } else if (detail::same_level(level, 0.05)) {
    return -0.08;
  }
  throw InvalidArgument("builtin_cv: no stored value for this (kind, level)");
}

/// Right-tail empirical quantile: the order statistic at 1-based rank
/// ceil((1 - level) * N).
inline double right_tail_quantile(std::vector<double> draws, double level) {
  detail::require(!draws.empty(), "right_tail_quantile: no draws");
  detail::require(level > 0.0 && level < 1.0, "right_tail_quantile: level must lie in (0,1)");
  const double N = static_cast<double>(draws.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - level) * N - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, draws.size());
  std::nth_element(draws.begin(), draws.begin() + (rank - 1), draws.end());
  return draws[rank - 1];
}

enum class NullStatistic { SupDF, Cusum };

/// Simulated right-tail quantiles of a null statistic.
struct CriticalValueTable {
  std::optional<std::size_t> n;  ///< nullopt for asymptotic values
  double tau0 = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  NullStatistic statistic = NullStatistic::SupDF;
  std::map<double, double> quantiles;  ///< level -> value

  std::optional<double> find(double level) const {
    for (const auto& [l, v] : quantiles) {
      if (detail::same_level(l, level)) return v;
    }
    return std::nullopt;
  }

  double at(double level) const {
    if (auto v = find(level)) return *v;
    throw InvalidArgument("CriticalValueTable: level not tabulated");
  }
};

/// Null statistic of one standard Gaussian random walk x_0 = 0, ..., x_n.
inline double simulate_null_statistic(std::size_t n, double tau0, std::uint64_t seed,
                                      std::uint64_t replication,
                                      NullStatistic statistic = NullStatistic::SupDF) {
  Stream rng(seed, replication);
  std::vector<double> walk(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) walk[i] = walk[i - 1] + rng.normal();
  if (statistic == NullStatistic::Cusum) return cusum_stat(walk, tau0);
  return sup_stat(detector_trace(walk, tau0, TraceKind::DF));
}

/// Tabulates the finite-sample null law of the sup statistic (or the CUSUM
/// statistic) from `reps` Gaussian random walks of length n.
inline CriticalValueTable simulate_null_table(std::size_t n, double tau0, std::size_t reps,
                                              std::uint64_t seed,
                                              const std::vector<double>& levels,
                                              NullStatistic statistic = NullStatistic::SupDF,
                                              unsigned threads = 1) {
  detail::require(n >= 20, "simulate_null_table: n must be >= 20");
  detail::require(tau0 > 0.0 && tau0 < 1.0, "simulate_null_table: tau0 must lie in (0,1)");
  detail::require(reps >= 1, "simulate_null_table: reps must be >= 1");
  for (double l : levels) {
    detail::require(l > 0.0 && l < 1.0, "simulate_null_table: levels must lie in (0,1)");
  }
  if (statistic == NullStatistic::SupDF) {
    detail::require(first_endpoint(n, tau0) >= 4,
                    "simulate_null_table: ceil(tau0*n) must be >= 4");
  }

  std::vector<double> draws(reps);
  detail::parallel_for(reps, threads, [&](std::size_t r) {
    draws[r] = simulate_null_statistic(n, tau0, seed, r, statistic);
  });

  CriticalValueTable table;
  table.n = n;
  table.tau0 = tau0;
  table.reps = reps;
  table.seed = seed;
  table.statistic = statistic;
  for (double l : levels) table.quantiles[l] = right_tail_quantile(draws, l);
  return table;
}

/// Plain-text form: '#'-prefixed header lines carrying n, tau0, reps, seed
/// and statistic, then a tab-separated "level value" block.
inline void write_table(std::ostream& os, const CriticalValueTable& table) {
  os << "# rvbubble critical values\n";
  os << "# n " << (table.n ? std::to_string(*table.n) : std::string("asymptotic")) << '\n';
  os << "# tau0 " << shortest(table.tau0) << '\n';
  os << "# reps " << table.reps << '\n';
  os << "# seed " << table.seed << '\n';
  os << "# statistic " << (table.statistic == NullStatistic::Cusum ? "cusum" : "supdf") << '\n';
  os << "level\tvalue\n";
  for (const auto& [level, value] : table.quantiles) {
    os << shortest(level) << '\t' << shortest(value) << '\n';
  }
}

inline CriticalValueTable read_table(std::istream& is) {
  CriticalValueTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ss >> hash >> key >> value;
      if (key == "n") {
        table.n = value == "asymptotic" ? std::nullopt
                                        : std::optional<std::size_t>(std::stoull(value));
      } else if (key == "tau0") {
        table.tau0 = std::stod(value);
      } else if (key == "reps") {
        table.reps = std::stoull(value);
      } else if (key == "seed") {
        table.seed = std::stoull(value);
      } else if (key == "statistic") {
        table.statistic = value == "cusum" ? NullStatistic::Cusum : NullStatistic::SupDF;
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("level", 0) == 0) continue;
    }
    double level = 0.0, value = 0.0;
    if (!(ss >> level >> value)) throw DataError("read_table: malformed row '" + line + "'");
    table.quantiles[level] = value;
  }
  if (table.quantiles.empty()) throw DataError("read_table: no quantile rows");
  return table;
}

}  // namespace rvbubble
