#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rvbubble/bootstrap.hpp"
#include "rvbubble/critical_values.hpp"
#include "rvbubble/devolatize.hpp"
#include "rvbubble/df_engine.hpp"
#include "rvbubble/error.hpp"
#include "rvbubble/parallel.hpp"
#include "rvbubble/realized_variance.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble {

enum class TestKind { PWY, RVPWY, BTPWY, SCPWY, CUSUM };

inline const char* test_name(TestKind t) {
  switch (t) {
    case TestKind::PWY: return "PWY";
    case TestKind::RVPWY: return "RVPWY";
    case TestKind::BTPWY: return "BTPWY";
    case TestKind::SCPWY: return "SCPWY";
    case TestKind::CUSUM: return "CUSUM";
  }
  return "?";
}

struct McConfig {
  std::size_t reps = 1000;
  GridSpec grid{252, 78, 1.0};
  HestonParams heston{};
  KappaSchedule schedule{};
  double tau0 = 0.137;
  std::vector<double> levels{0.01, 0.05, 0.10};
  std::vector<TestKind> tests{TestKind::PWY, TestKind::RVPWY};
  std::uint64_t seed = 20240411;
  std::size_t bootstrap_B = 199;
  unsigned threads = 1;
  /// Critical values for PWY/RVPWY; the built-in constants when empty.
  std::optional<CriticalValueTable> sup_cv;
  /// Critical values for CUSUM; simulated on demand when empty.
  std::optional<CriticalValueTable> cusum_cv;

  bool wants(TestKind t) const {
    return std::find(tests.begin(), tests.end(), t) != tests.end();
  }

  void validate() const {
    heston.validate();
    detail::require(reps >= 1, "McConfig: reps must be >= 1");
    detail::require(!levels.empty(), "McConfig: no levels");
    for (double l : levels) detail::require(l > 0.0 && l < 1.0, "McConfig: levels must lie in (0,1)");
    detail::require(first_endpoint(grid.n(), tau0) >= 4, "McConfig: ceil(tau0*n) must be >= 4");
    detail::require(!wants(TestKind::BTPWY) || bootstrap_B >= 1, "McConfig: bootstrap B must be >= 1");
  }
};

/// Statistics of one simulated path.
struct ReplicationStats {
  double pwy = 0.0;
  double rvpwy = 0.0;
  double cusum = 0.0;
  double bootstrap_p = 1.0;
};

struct FrequencyRow {
  std::string test;
  double level = 0.0;
  std::string point;  ///< parameter point label, e.g. "kappa=0.02"
  double frequency = 0.0;
  double std_error = 0.0;
};

/// Rejection frequencies keyed by (test, level, parameter point).
struct FrequencyTable {
  std::vector<FrequencyRow> rows;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;

  std::optional<double> find(const std::string& test, double level,
                             const std::string& point = "") const {
    for (const auto& r : rows) {
      if (r.test == test && detail::same_level(r.level, level) && r.point == point) {
        return r.frequency;
      }
    }
    return std::nullopt;
  }

  double frequency(TestKind test, double level, const std::string& point = "") const {
    if (auto f = find(test_name(test), level, point)) return *f;
    throw InvalidArgument(std::string("FrequencyTable: no row for ") + test_name(test));
  }

  /// Appends the rows of `other` (a run at another parameter point).
  void append(const FrequencyTable& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    reps = std::max(reps, other.reps);
    runtime_seconds += other.runtime_seconds;
  }
};

/// Binomial standard error sqrt(p (1 - p) / reps).
inline double binomial_std_error(double p, std::size_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

/// Size-corrected critical value: the order statistic at 1-based rank
/// floor((1 - level) N) + 1, so that at most a fraction `level` of the null
/// statistics lies strictly above it.
inline double size_corrected_cv(std::vector<double> null_stats, double level) {
  detail::require(!null_stats.empty(), "size_corrected_cv: empty input");
  detail::require(level > 0.0 && level < 1.0, "size_corrected_cv: level must lie in (0,1)");
  const double N = static_cast<double>(null_stats.size());
  auto rank = static_cast<std::size_t>(std::floor((1.0 - level) * N + 1e-9)) + 1;
  rank = std::clamp<std::size_t>(rank, 1, null_stats.size());
  std::nth_element(null_stats.begin(), null_stats.begin() + (rank - 1), null_stats.end());
  return null_stats[rank - 1];
}

namespace detail {

inline constexpr std::uint64_t kBootstrapStreamTag = 0xb007'57a9'0000'0001ULL;

inline ReplicationStats simulate_replication(const McConfig& cfg, std::size_t r) {
  ReplicationStats out;
  const auto path = simulate_heston(cfg.heston, cfg.schedule, cfg.grid, cfg.seed, r);
  const auto coarse = path.coarse_log_prices();
  if (cfg.wants(TestKind::PWY) || cfg.wants(TestKind::SCPWY)) {
    out.pwy = sup_stat(detector_trace(coarse, cfg.tau0, TraceKind::DF));
  }
  if (cfg.wants(TestKind::RVPWY) || cfg.wants(TestKind::CUSUM)) {
    const auto sample = feasible_pseudo_sample(path, rv_series(path, false));
    if (cfg.wants(TestKind::RVPWY)) {
      out.rvpwy = sup_stat(detector_trace(sample.values, cfg.tau0, TraceKind::RVDF));
    }
    if (cfg.wants(TestKind::CUSUM)) out.cusum = cusum_stat(sample.values, cfg.tau0);
  }
  if (cfg.wants(TestKind::BTPWY)) {
    const auto boot_seed = substream_key(cfg.seed ^ kBootstrapStreamTag, r);
    out.bootstrap_p = wild_bootstrap_pwy(coarse, cfg.tau0, cfg.bootstrap_B, boot_seed).p_value;
  }
  return out;
}

inline double fraction_above(const std::vector<double>& stats, double cv) {
  std::size_t hits = 0;
  for (double s : stats) hits += (s > cv) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(stats.size());
}

}  // namespace detail

/// Statistics of every replication, in replication order. Independent of
/// cfg.threads.
inline std::vector<ReplicationStats> simulate_replications(const McConfig& cfg) {
  cfg.validate();
  std::vector<ReplicationStats> out(cfg.reps);
  detail::parallel_for(cfg.reps, cfg.threads,
                       [&](std::size_t r) { out[r] = detail::simulate_replication(cfg, r); });
  return out;
}

namespace detail {

inline double sup_cv_for(const McConfig& cfg, double level) {
  if (cfg.sup_cv) return cfg.sup_cv->at(level);
  return builtin_cv(CvKind::PwySup, level);
}

inline double cusum_cv_for(const McConfig& cfg, double level) {
  if (cfg.cusum_cv) return cfg.cusum_cv->at(level);
  throw InvalidArgument("McConfig: CUSUM needs a critical value table");
}

inline McConfig with_cusum_table(McConfig cfg) {
  if (cfg.wants(TestKind::CUSUM) && !cfg.cusum_cv) {
    cfg.cusum_cv = simulate_null_table(cfg.grid.n(), cfg.tau0, 10000,
                                       substream_key(cfg.seed, 0xc05ULL), cfg.levels,
                                       NullStatistic::Cusum, cfg.threads);
  }
  return cfg;
}

inline void add_row(FrequencyTable& t, TestKind test, double level, const std::string& point,
                    double freq) {
  t.rows.push_back({test_name(test), level, point, freq, binomial_std_error(freq, t.reps)});
}

inline FrequencyTable tabulate(const McConfig& cfg, const std::vector<ReplicationStats>& stats,
                               const std::vector<double>* null_pwy, const std::string& point) {
  FrequencyTable table;
  table.reps = stats.size();
  table.seed = cfg.seed;
  auto column = [&](double ReplicationStats::*field) {
    std::vector<double> v;
    v.reserve(stats.size());
    for (const auto& s : stats) v.push_back(s.*field);
    return v;
  };
  const auto pwy = column(&ReplicationStats::pwy);
  const auto rvpwy = column(&ReplicationStats::rvpwy);
  const auto cusum = column(&ReplicationStats::cusum);
  const auto boot_p = column(&ReplicationStats::bootstrap_p);

  for (TestKind test : cfg.tests) {
    for (double level : cfg.levels) {
      double freq = 0.0;
      switch (test) {
        case TestKind::PWY: freq = fraction_above(pwy, sup_cv_for(cfg, level)); break;
        case TestKind::RVPWY: freq = fraction_above(rvpwy, sup_cv_for(cfg, level)); break;
        case TestKind::CUSUM: freq = fraction_above(cusum, cusum_cv_for(cfg, level)); break;
        case TestKind::BTPWY: {
          std::size_t hits = 0;
          for (double p : boot_p) hits += (p <= level) ? 1 : 0;
          freq = static_cast<double>(hits) / static_cast<double>(boot_p.size());
          break;
        }
        case TestKind::SCPWY: {
          const auto& reference = null_pwy ? *null_pwy : pwy;
          freq = fraction_above(pwy, size_corrected_cv(reference, level));
          break;
        }
      }
      add_row(table, test, level, point, freq);
    }
  }
  return table;
}

}  // namespace detail

/// Empirical size of the requested tests under the unit-root null. SCPWY, if
/// requested, is corrected against this same null run.
inline FrequencyTable run_size_experiment(const McConfig& config, const std::string& point = "") {
  detail::require(config.schedule.is_null(), "run_size_experiment: schedule must be the null");
  const auto start = std::chrono::steady_clock::now();
  const McConfig cfg = detail::with_cusum_table(config);
  const auto stats = simulate_replications(cfg);
  auto table = detail::tabulate(cfg, stats, nullptr, point);
  table.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

/// Power under a one-time shift to the explosive regime. SCPWY compares the
/// PWY statistics against the empirical (1 - level) quantile of PWY
/// statistics from `null_config`, which must match `config` in everything
/// but the drift schedule. Sharing the seed pairs the Brownian draws of the
/// two runs.
inline FrequencyTable run_power_experiment(const McConfig& config,
                                           const std::optional<McConfig>& null_config,
                                           const std::string& point = "") {
  detail::require(config.schedule.is_one_shift(), "run_power_experiment: schedule must be OneShift");
  const auto start = std::chrono::steady_clock::now();
  const McConfig cfg = detail::with_cusum_table(config);

  std::optional<std::vector<double>> null_pwy;
  if (cfg.wants(TestKind::SCPWY)) {
    if (!null_config) throw InvalidArgument("run_power_experiment: SCPWY needs a paired null run");
    const auto& nc = *null_config;
    detail::require(nc.schedule.is_null(), "run_power_experiment: paired run must use the null");
    detail::require(nc.grid == cfg.grid && nc.tau0 == cfg.tau0 && nc.heston.a == cfg.heston.a &&
                        nc.heston.b == cfg.heston.b && nc.heston.c_vv == cfg.heston.c_vv &&
                        nc.heston.sigma0_sq == cfg.heston.sigma0_sq,
                    "run_power_experiment: paired null run must share grid, tau0 and Heston parameters");
    McConfig pwy_only = nc;
    pwy_only.tests = {TestKind::PWY};
    pwy_only.threads = cfg.threads;
    std::vector<double> v;
    for (const auto& s : simulate_replications(pwy_only)) v.push_back(s.pwy);
    null_pwy = std::move(v);
  }

  const auto stats = simulate_replications(cfg);
  auto table = detail::tabulate(cfg, stats, null_pwy ? &*null_pwy : nullptr, point);
  table.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

}  // namespace rvbubble
