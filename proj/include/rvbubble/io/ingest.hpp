#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rvbubble/error.hpp"
#include "rvbubble/grid.hpp"
#include "rvbubble/simulate.hpp"

namespace rvbubble::io {

enum class PriceScale { RawPrice, LogPrice, LogReturn };

/// How fine observations are grouped into low-frequency intervals.
enum class IntervalRule { FixedCount, Day, Month };

struct IngestSpec {
  std::string path;
  std::string timestamp_column = "timestamp";
  std::string price_column = "price";
  PriceScale scale = PriceScale::RawPrice;
  IntervalRule rule = IntervalRule::FixedCount;
  std::size_t M = 0;          ///< bars per interval under FixedCount
  bool demean = false;        ///< demeaned realized variance downstream
  bool allow_ragged = false;  ///< calendar rule: accept unequal bar counts
  char delimiter = ',';
  double H = 1.0;
};

/// An ingested price path plus the labels that map coarse indices to dates.
struct IngestedSeries {
  PricePath path;
  /// labels[i] names low-frequency time t_i (labels[0] is the anchor).
  std::vector<std::string> labels;
  std::string digest;  ///< FNV-1a 64 of the input bytes, hex
  bool demean = false;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Digest of the log-price values (bit patterns) and interval layout.
inline std::string path_digest(const PricePath& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* p, std::size_t len) {
    h = fnv1a(std::string_view(static_cast<const char*>(p), len), h);
  };
  for (double v : path.log_prices()) feed(&v, sizeof v);
  for (std::size_t i = 0; i <= path.n(); ++i) {
    const std::size_t k = path.coarse_index(i);
    feed(&k, sizeof k);
  }
  return hex64(h);
}

namespace detail {

/// Parsed timestamp: a sortable key plus calendar fields when ISO-8601.
struct Timestamp {
  long double key = 0;
  bool calendar = false;
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;
  std::string text;
};

inline std::string trim(std::string_view s) {
  const auto ws = " \t\r\n\"";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline std::optional<Timestamp> parse_timestamp(const std::string& text) {
  Timestamp ts;
  ts.text = text;
  if (text.empty()) return std::nullopt;
  const bool integral = std::all_of(text.begin() + (text[0] == '-' ? 1 : 0), text.end(),
                                    [](unsigned char c) { return std::isdigit(c); });
  if (integral && text != "-") {
    ts.key = static_cast<long double>(std::stoll(text));
    return ts;
  }
  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mm = 0;
  double ss = 0.0;
  char sep = 0;
  const int got = std::sscanf(text.c_str(), "%d-%u-%u%c%u:%u:%lf", &y, &mo, &d, &sep, &hh, &mm, &ss);
  if (got < 3) return std::nullopt;
  if (got > 3 && sep != 'T' && sep != ' ') return std::nullopt;
  if (got > 3 && got < 6) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss < 0.0 || ss >= 61.0) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  ts.key = static_cast<long double>(days) * 86400.0L + hh * 3600.0L + mm * 60.0L + ss;
  ts.calendar = true;
  ts.year = y;
  ts.month = mo;
  ts.day = d;
  return ts;
}

inline std::string period_label(const Timestamp& ts, IntervalRule rule) {
  char buf[16];
  if (rule == IntervalRule::Month) {
    std::snprintf(buf, sizeof buf, "%04d-%02u", ts.year, ts.month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", ts.year, ts.month, ts.day);
  }
  return buf;
}

inline double parse_number(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("ingest: row " + std::to_string(row) + ": bad price '" + s + "'");
  }
}

}  // namespace detail

/// Reads a delimited text file with a header row into a price path.
///
/// Raw prices are logged; log returns are cumulated from 0 (so the anchor
/// y_{t_0} = 0 precedes the first return). Each increment belongs to the
/// interval of its ending observation. Under a calendar rule with price
/// input, the first calendar period only supplies the anchor y_{t_0} (its
/// last observation); every later period is one interval whose first
/// increment starts at the previous period's close.
inline IngestedSeries ingest_stream(std::istream& in, const IngestSpec& spec,
                                    std::string_view raw_bytes = {}) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("ingest: empty input");
  const auto columns = detail::split(header, spec.delimiter);
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DataError("ingest: missing column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  };
  const std::size_t ts_col = column_index(spec.timestamp_column);
  const std::size_t px_col = column_index(spec.price_column);

  std::vector<detail::Timestamp> stamps;
  std::vector<double> values;
  std::string line;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, spec.delimiter);
    if (cells.size() <= std::max(ts_col, px_col)) {
      throw DataError("ingest: row " + std::to_string(row) + ": too few columns");
    }
    auto ts = detail::parse_timestamp(cells[ts_col]);
    if (!ts) {
      throw DataError("ingest: row " + std::to_string(row) + ": bad timestamp '" + cells[ts_col] + "'");
    }
    if (!stamps.empty() && !(ts->key > stamps.back().key)) {
      throw DataError("ingest: row " + std::to_string(row) + ": timestamps not strictly increasing");
    }
    double v = detail::parse_number(cells[px_col], row);
    if (spec.scale == PriceScale::RawPrice) {
      if (!(v > 0.0)) {
        throw DataError("ingest: row " + std::to_string(row) + ": non-positive price");
      }
      v = std::log(v);
    }
    stamps.push_back(std::move(*ts));
    values.push_back(v);
  }
  if (values.empty()) throw DataError("ingest: no data rows");

  // Fine log-price series and, per fine increment, its observation index.
  std::vector<double> y;
  std::vector<std::size_t> obs_of_increment;
  std::string anchor_label;
  if (spec.scale == PriceScale::LogReturn) {
    y.reserve(values.size() + 1);
    y.push_back(0.0);
    for (std::size_t j = 0; j < values.size(); ++j) {
      y.push_back(y.back() + values[j]);
      obs_of_increment.push_back(j);
    }
  } else {
    y = values;
    for (std::size_t j = 1; j < values.size(); ++j) obs_of_increment.push_back(j);
    anchor_label = stamps.front().text;
  }

  std::vector<std::size_t> bounds{0};
  std::vector<std::string> labels;
  std::size_t fine_begin = 0;  // first fine index kept

  if (spec.rule == IntervalRule::FixedCount) {
    if (spec.M < 1) throw InvalidArgument("ingest: fixed-count rule needs M >= 1");
    const std::size_t incs = obs_of_increment.size();
    if (incs == 0 || incs % spec.M != 0) {
      throw DataError("ingest: " + std::to_string(incs) +
                      " increments do not split into intervals of M = " + std::to_string(spec.M));
    }
    labels.push_back(anchor_label);
    for (std::size_t i = 1; i <= incs / spec.M; ++i) {
      bounds.push_back(i * spec.M);
      labels.push_back(stamps[obs_of_increment[i * spec.M - 1]].text);
    }
  } else {
    for (const auto& ts : stamps) {
      if (!ts.calendar) throw DataError("ingest: calendar rule needs ISO-8601 timestamps");
    }
    // Group increments by the calendar period of their ending observation.
    std::vector<std::string> period_of_increment;
    for (std::size_t obs : obs_of_increment) {
      period_of_increment.push_back(detail::period_label(stamps[obs], spec.rule));
    }
    std::size_t first_inc = 0;
    if (spec.scale != PriceScale::LogReturn) {
      // The first period only anchors the series at its last observation.
      const std::string first_period = detail::period_label(stamps.front(), spec.rule);
      while (first_inc < period_of_increment.size() &&
             period_of_increment[first_inc] == first_period) {
        ++first_inc;
      }
      fine_begin = first_inc;
      anchor_label = first_period;
    }
    labels.push_back(anchor_label);
    std::vector<std::size_t> counts;
    for (std::size_t k = first_inc; k < period_of_increment.size(); ++k) {
      if (labels.size() == 1 || period_of_increment[k] != labels.back()) {
        labels.push_back(period_of_increment[k]);
        counts.push_back(0);
      }
      ++counts.back();
    }
    if (counts.empty()) throw DataError("ingest: no complete interval after the anchor period");
    for (std::size_t c : counts) bounds.push_back(bounds.back() + c);

    if (!spec.allow_ragged) {
      std::map<std::size_t, std::size_t> freq;
      for (std::size_t c : counts) ++freq[c];
      const auto mode = std::max_element(freq.begin(), freq.end(), [](auto& a, auto& b) {
                          return a.second < b.second;
                        })->first;
      std::string offending;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != mode) {
          offending += (offending.empty() ? "" : ", ") + labels[i + 1] + " (" +
                       std::to_string(counts[i]) + " bars)";
        }
      }
      if (!offending.empty()) {
        throw DataError("ingest: unequal bars per interval (expected " + std::to_string(mode) +
                        "): " + offending);
      }
    }
  }

  const std::vector<double> fine(y.begin() + static_cast<std::ptrdiff_t>(fine_begin), y.end());
  const std::size_t n = bounds.size() - 1;
  if (n < 2) throw DataError("ingest: need at least two low-frequency intervals");
  std::size_t max_bars = 0;
  bool regular = true;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t b = bounds[i] - bounds[i - 1];
    if (i > 1 && b != max_bars) regular = false;
    max_bars = std::max(max_bars, b);
  }
  const GridSpec grid(n, max_bars, spec.H);

  IngestedSeries out{regular ? PricePath(grid, fine) : PricePath(grid, fine, bounds),
                     std::move(labels), hex64(fnv1a(raw_bytes)), spec.demean};
  return out;
}

inline IngestedSeries ingest(const IngestSpec& spec) {
  std::ifstream file(spec.path, std::ios::binary);
  if (!file) throw DataError("ingest: cannot open '" + spec.path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  std::istringstream in(bytes);
  return ingest_stream(in, spec, bytes);
}

}  // namespace rvbubble::io
