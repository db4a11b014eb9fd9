#pragma once

#include <iomanip>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvbubble/mc_harness.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble::io {

/// Delimited rejection-frequency table: one row per (parameter point, level),
/// one column per test, in first-seen order.
inline void write_frequency_table(std::ostream& os, const FrequencyTable& t, char delim = '\t') {
  std::vector<std::string> tests;
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::pair<std::string, double>, std::string>, double> cells;
  for (const auto& r : t.rows) {
    if (std::find(tests.begin(), tests.end(), r.test) == tests.end()) tests.push_back(r.test);
    const auto key = std::make_pair(r.point, r.level);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    cells[{key, r.test}] = r.frequency;
  }
  os << "point" << delim << "level";
  for (const auto& name : tests) os << delim << name;
  os << '\n' << std::fixed << std::setprecision(3);
  for (const auto& key : keys) {
    os << (key.first.empty() ? "-" : key.first) << delim << std::setprecision(2) << key.second
       << std::setprecision(3);
    for (const auto& name : tests) {
      os << delim;
      if (auto it = cells.find({key, name}); it != cells.end()) {
        os << it->second;
      } else {
        os << "NA";
      }
    }
    os << '\n';
  }
  os << std::defaultfloat;
}

inline nlohmann::json to_json(const FrequencyTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"test", r.test},
                    {"level", r.level},
                    {"point", r.point},
                    {"frequency", r.frequency},
                    {"std_error", r.std_error}});
  }
  return {{"reps", t.reps}, {"seed", t.seed}, {"runtime_seconds", t.runtime_seconds},
          {"rows", std::move(rows)}};
}

/// Fine-grid path as CSV (fine index, log price, variance when simulated),
/// readable back through ingest with the log-price scale and fixed-count rule.
inline void write_path_csv(std::ostream& os, const PricePath& path) {
  const auto y = path.log_prices();
  const auto& var = path.vol_path();
  os << "timestamp,log_price" << (var ? ",variance" : "") << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < y.size(); ++k) {
    os << k << ',' << y[k];
    if (var) os << ',' << (*var)[k];
    os << '\n';
  }
}

}  // namespace rvbubble::io
