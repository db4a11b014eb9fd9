#pragma once

#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvbubble/critical_values.hpp"
#include "rvbubble/datestamp.hpp"
#include "rvbubble/devolatize.hpp"
#include "rvbubble/df_engine.hpp"
#include "rvbubble/format.hpp"
#include "rvbubble/io/ingest.hpp"
#include "rvbubble/realized_variance.hpp"
#include "rvbubble/version.hpp"

namespace rvbubble::io {

/// A date-stamped episode as (index, date, fraction) triples.
struct ReportEpisode {
  std::size_t start_index = 0;
  std::string start_date;
  double start_fraction = 0.0;
  std::optional<std::size_t> end_index;
  std::optional<std::string> end_date;
  std::optional<double> end_fraction;
};

struct Provenance {
  std::string input_digest;
  std::optional<std::string> vol_proxy_digest;
  std::optional<std::uint64_t> seed;
  std::string software_version = kVersion;
  bool demeaned = false;
  bool vol_proxy_used = false;
};

struct TestReport {
  std::string statistic;  ///< "pwy" or "rvpwy"
  double value = 0.0;
  std::map<double, double> critical_values;  ///< level -> cv
  std::map<double, bool> reject;             ///< level -> decision
  double tau0 = 0.1;
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t sup_index = 0;
  std::string sup_date;
  double detector_cv = 0.0;
  double min_duration = 0.0;
  std::vector<ReportEpisode> episodes;
  Provenance provenance;
};

enum class TestChoice { PWY, RVPWY };

struct TestOptions {
  TestChoice test = TestChoice::RVPWY;
  double tau0 = 0.1;
  /// Detector threshold for date stamping; the 5% DF critical value by default.
  double detector_cv = builtin_cv(CvKind::DfMarginal, 0.05);
  std::optional<double> min_duration;  ///< log(n)/n when empty
  std::optional<double> min_episode;   ///< episode filter; min_duration when empty
  std::optional<std::uint64_t> seed;
};

struct TestOutcome {
  TestReport report;
  DetectorTrace trace;
  std::vector<std::string> labels;
};

inline std::vector<ReportEpisode> label_episodes(const EpisodeList& list,
                                                 const std::vector<std::string>& labels,
                                                 std::size_t n) {
  std::vector<ReportEpisode> out;
  for (const auto& ep : list.episodes) {
    ReportEpisode r;
    r.start_index = ep.start_index;
    r.start_date = labels.at(ep.start_index);
    r.start_fraction = ep.start;
    if (ep.end_index) {
      r.end_index = ep.end_index;
      r.end_date = labels.at(*ep.end_index);
      r.end_fraction = static_cast<double>(*ep.end_index) / static_cast<double>(n);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Runs the PWY or RVPWY test on an ingested series and date-stamps the
/// detector. With `vol_proxy`, increments of `series` are devolatized by the
/// realized volatility of the proxy (e.g. a real index scaled by nominal
/// index volatility); both must share the same interval labels.
inline TestOutcome run_test(const IngestedSeries& series, const TestOptions& opt,
                            const IngestedSeries* vol_proxy = nullptr) {
  const PricePath& path = series.path;
  TestOutcome out;
  out.labels = series.labels;
  TestReport& rep = out.report;
  rep.tau0 = opt.tau0;
  rep.n = path.n();
  rep.M = path.grid().M();
  rep.provenance.input_digest = series.digest;
  rep.provenance.seed = opt.seed;

  if (opt.test == TestChoice::PWY) {
    rep.statistic = "pwy";
    out.trace = detector_trace(path.coarse_log_prices(), opt.tau0, TraceKind::DF);
  } else {
    rep.statistic = "rvpwy";
    const PricePath* vol_source = &path;
    bool demean = series.demean;
    if (vol_proxy) {
      if (vol_proxy->labels != series.labels) {
        throw DataError("run_test: volatility proxy intervals do not match the series");
      }
      vol_source = &vol_proxy->path;
      demean = vol_proxy->demean;
      rep.provenance.vol_proxy_used = true;
      rep.provenance.vol_proxy_digest = vol_proxy->digest;
    }
    rep.provenance.demeaned = demean;
    const auto rv = rv_series(*vol_source, demean);
    const auto sample =
        build_pseudo_sample(path.coarse_increments(), volatilities(rv.values));
    out.trace = detector_trace(sample.values, opt.tau0, TraceKind::RVDF);
  }

  const std::size_t best = argsup(out.trace);
  rep.value = out.trace.stats[best];
  rep.sup_index = out.trace.endpoints[best];
  rep.sup_date = series.labels.at(rep.sup_index);
  for (double level : {0.01, 0.05, 0.10}) {
    const double cv = builtin_cv(CvKind::PwySup, level);
    rep.critical_values[level] = cv;
    rep.reject[level] = rep.value > cv;
  }

  rep.detector_cv = opt.detector_cv;
  rep.min_duration = opt.min_duration.value_or(default_min_duration(rep.n));
  auto episodes = date_stamp(out.trace, rep.detector_cv, rep.min_duration);
  episodes = filter_episodes(std::move(episodes), opt.min_episode.value_or(rep.min_duration));
  rep.episodes = label_episodes(episodes, series.labels, rep.n);
  return out;
}

inline nlohmann::json to_json(const TestReport& r) {
  using nlohmann::json;
  json cvs = json::array();
  for (const auto& [level, cv] : r.critical_values) {
    cvs.push_back({{"level", level}, {"value", cv}, {"reject", r.reject.at(level)}});
  }
  json eps = json::array();
  for (const auto& e : r.episodes) {
    json j = {{"start", {{"index", e.start_index}, {"date", e.start_date}, {"fraction", e.start_fraction}}}};
    if (e.end_index) {
      j["end"] = {{"index", *e.end_index}, {"date", *e.end_date}, {"fraction", *e.end_fraction}};
    } else {
      j["end"] = nullptr;
    }
    eps.push_back(std::move(j));
  }
  json prov = {{"input_digest", r.provenance.input_digest},
               {"software_version", r.provenance.software_version},
               {"demeaned", r.provenance.demeaned},
               {"vol_proxy_used", r.provenance.vol_proxy_used}};
  prov["vol_proxy_digest"] = r.provenance.vol_proxy_digest
                                 ? json(*r.provenance.vol_proxy_digest) : json(nullptr);
  prov["seed"] = r.provenance.seed ? json(*r.provenance.seed) : json(nullptr);
  return {{"statistic", r.statistic},
          {"value", r.value},
          {"critical_values", std::move(cvs)},
          {"tau0", r.tau0},
          {"n", r.n},
          {"M", r.M},
          {"sup", {{"index", r.sup_index}, {"date", r.sup_date}}},
          {"detector_cv", r.detector_cv},
          {"min_duration", r.min_duration},
          {"episodes", std::move(eps)},
          {"provenance", std::move(prov)}};
}

inline TestReport report_from_json(const nlohmann::json& j) {
  TestReport r;
  r.statistic = j.at("statistic").get<std::string>();
  r.value = j.at("value").get<double>();
  for (const auto& c : j.at("critical_values")) {
    const double level = c.at("level").get<double>();
    r.critical_values[level] = c.at("value").get<double>();
    r.reject[level] = c.at("reject").get<bool>();
  }
  r.tau0 = j.at("tau0").get<double>();
  r.n = j.at("n").get<std::size_t>();
  r.M = j.at("M").get<std::size_t>();
  r.sup_index = j.at("sup").at("index").get<std::size_t>();
  r.sup_date = j.at("sup").at("date").get<std::string>();
  r.detector_cv = j.at("detector_cv").get<double>();
  r.min_duration = j.at("min_duration").get<double>();
  for (const auto& e : j.at("episodes")) {
    ReportEpisode ep;
    const auto& s = e.at("start");
    ep.start_index = s.at("index").get<std::size_t>();
    ep.start_date = s.at("date").get<std::string>();
    ep.start_fraction = s.at("fraction").get<double>();
    if (!e.at("end").is_null()) {
      const auto& f = e.at("end");
      ep.end_index = f.at("index").get<std::size_t>();
      ep.end_date = f.at("date").get<std::string>();
      ep.end_fraction = f.at("fraction").get<double>();
    }
    r.episodes.push_back(std::move(ep));
  }
  const auto& p = j.at("provenance");
  r.provenance.input_digest = p.at("input_digest").get<std::string>();
  r.provenance.software_version = p.at("software_version").get<std::string>();
  r.provenance.demeaned = p.at("demeaned").get<bool>();
  r.provenance.vol_proxy_used = p.at("vol_proxy_used").get<bool>();
  if (!p.at("vol_proxy_digest").is_null()) {
    r.provenance.vol_proxy_digest = p.at("vol_proxy_digest").get<std::string>();
  }
  if (!p.at("seed").is_null()) r.provenance.seed = p.at("seed").get<std::uint64_t>();
  return r;
}

inline void write_report(std::ostream& os, const TestReport& r) {
  os << to_json(r).dump(2) << '\n';
}

inline TestReport read_report(std::istream& is) {
  try {
    return report_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("read_report: ") + e.what());
  }
}

/// Tab-separated detector series (fraction, index, date, stat, cv) for
/// external plotting. Degenerate entries are written as "nan".
inline void write_trace(std::ostream& os, const DetectorTrace& trace,
                        const std::vector<std::string>& labels, double cv) {
  os << "fraction\tindex\tdate\tstat\tcv\n";
  for (std::size_t m = 0; m < trace.size(); ++m) {
    const std::size_t k = trace.endpoints[m];
    os << shortest(trace.fraction(m)) << '\t' << k << '\t' << (k < labels.size() ? labels[k] : "") << '\t';
    if (trace.degenerate(m)) {
      os << "nan";
    } else {
      os << shortest(trace.stats[m]);
    }
    os << '\t' << shortest(cv) << '\n';
  }
}

}  // namespace rvbubble::io
