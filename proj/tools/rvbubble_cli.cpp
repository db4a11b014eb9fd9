// rvbubble command-line tool.
//
//   rvbubble simulate   simulate a Heston log-price path on the fine grid
//   rvbubble rv         per-interval realized variances of an input file
//   rvbubble test       PWY / RVPWY test with date-stamped episodes
//   rvbubble datestamp  detector trace and episodes at a chosen threshold
//   rvbubble critvals   simulate null critical values
//   rvbubble mc         size / power Monte Carlo experiments
//
// Exit status is 0 whenever the command ran, whatever the test decision, and
// nonzero on input or pipeline errors.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include "rvbubble/io/ingest.hpp"
#include "rvbubble/io/report.hpp"
#include "rvbubble/io/tables.hpp"
#include "rvbubble/rvbubble.hpp"

namespace {

using namespace rvbubble;

struct IngestArgs {
  std::string input;
  std::string timestamp_column = "timestamp";
  std::string price_column = "price";
  std::string scale = "raw-price";
  std::string rule = "fixed";
  std::size_t M = 0;
  bool demean = false;
  bool ragged = false;
  std::string delimiter = ",";

  void add_to(CLI::App* app, bool input_required = true) {
    auto* opt = app->add_option("-i,--input", input, "Delimited text file with a header row");
    if (input_required) opt->required();
    app->add_option("--timestamp-column", timestamp_column, "Timestamp column name")
        ->capture_default_str();
    app->add_option("--price-column", price_column, "Price column name")->capture_default_str();
    app->add_option("--scale", scale, "raw-price | log-price | log-return")
        ->check(CLI::IsMember({"raw-price", "log-price", "log-return"}))
        ->capture_default_str();
    app->add_option("--rule", rule, "Interval rule: fixed | day | month")
        ->check(CLI::IsMember({"fixed", "day", "month"}))
        ->capture_default_str();
    app->add_option("--M", M, "Bars per interval under the fixed rule");
    app->add_flag("--demean", demean, "Demean increments within each interval before RV");
    app->add_flag("--ragged", ragged,
                  "Calendar rule: allow unequal bar counts (RV over whatever bars exist)");
    app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
  }

  io::IngestSpec spec(const std::string& path) const {
    io::IngestSpec s;
    s.path = path;
    s.timestamp_column = timestamp_column;
    s.price_column = price_column;
    s.scale = scale == "log-price"    ? io::PriceScale::LogPrice
              : scale == "log-return" ? io::PriceScale::LogReturn
                                      : io::PriceScale::RawPrice;
    s.rule = rule == "day"     ? io::IntervalRule::Day
             : rule == "month" ? io::IntervalRule::Month
                               : io::IntervalRule::FixedCount;
    s.M = M;
    s.demean = demean;
    s.allow_ragged = ragged;
    if (delimiter == "\\t" || delimiter == "tab") {
      s.delimiter = '\t';
    } else if (!delimiter.empty()) {
      s.delimiter = delimiter[0];
    }
    return s;
  }
};

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DataError("cannot open output '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::vector<TestKind> parse_tests(const std::vector<std::string>& names) {
  std::vector<TestKind> out;
  for (const auto& n : names) {
    if (n == "pwy") out.push_back(TestKind::PWY);
    else if (n == "rvpwy") out.push_back(TestKind::RVPWY);
    else if (n == "btpwy") out.push_back(TestKind::BTPWY);
    else if (n == "scpwy") out.push_back(TestKind::SCPWY);
    else if (n == "cusum") out.push_back(TestKind::CUSUM);
    else throw InvalidArgument("unknown test '" + n + "'");
  }
  return out;
}

struct ModelArgs {
  std::size_t n = 252;
  std::size_t M = 78;
  double H = 1.0;
  double a = 0.05;
  double b = 0.25;
  double c = 0.30;
  std::optional<double> sigma0_sq;
  std::string schedule = "null";
  double tau_star = 0.5;
  double kappa = 0.02;
  double tau1 = 0.4;
  double tau2 = 0.7;
  double alpha = 0.6;
  std::optional<double> mild_c;
  double reinit = 0.0;

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "Low-frequency intervals")->capture_default_str();
    app->add_option("--M", M, "Fine steps per interval")->capture_default_str();
    app->add_option("--H", H, "Interval length")->capture_default_str();
    app->add_option("--a", a, "Variance mean reversion")->capture_default_str();
    app->add_option("--b", b, "Long-run variance")->capture_default_str();
    app->add_option("--c", c, "Volatility of volatility")->capture_default_str();
    app->add_option("--sigma0-sq", sigma0_sq, "Initial variance (default: b)");
    app->add_option("--schedule", schedule, "null | shift | crash")
        ->check(CLI::IsMember({"null", "shift", "crash"}))
        ->capture_default_str();
    app->add_option("--tau-star", tau_star, "shift: regime start fraction")->capture_default_str();
    app->add_option("--kappa", kappa,
                    "shift: drift rate; crash: effective rate c/n^alpha when --mild-c is unset")
        ->capture_default_str();
    app->add_option("--tau1", tau1, "crash: bubble start fraction")->capture_default_str();
    app->add_option("--tau2", tau2, "crash: collapse fraction")->capture_default_str();
    app->add_option("--alpha", alpha, "crash: rate exponent")->capture_default_str();
    app->add_option("--mild-c", mild_c, "crash: constant c of c/n^alpha");
    app->add_option("--reinit", reinit, "crash: offset added at reinitialization")
        ->capture_default_str();
  }

  HestonParams heston() const { return {a, b, c, sigma0_sq.value_or(b)}; }
  GridSpec grid() const { return GridSpec(n, M, H); }

  KappaSchedule kappa_schedule() const {
    if (schedule == "shift") return OneShift{tau_star, kappa};
    if (schedule == "crash") {
      if (mild_c) return MildBubbleCrash{tau1, tau2, *mild_c, alpha, reinit};
      return MildBubbleCrash::with_effective_kappa(tau1, tau2, kappa, alpha, n, reinit);
    }
    return NullRegime{};
  }
};

void print_report_summary(std::ostream& os, const io::TestReport& r) {
  os << std::setprecision(6);
  os << r.statistic << " = " << r.value << " (sup at " << r.sup_date << ")\n";
  for (const auto& [level, cv] : r.critical_values) {
    os << "  " << level * 100 << "% cv " << cv << ": " << (r.reject.at(level) ? "reject" : "accept")
       << '\n';
  }
  os << "episodes (detector cv " << r.detector_cv << "):";
  if (r.episodes.empty()) os << " none";
  os << '\n';
  for (const auto& e : r.episodes) {
    os << "  " << e.start_date << " (" << e.start_fraction << ") -> "
       << (e.end_date ? *e.end_date : std::string("open")) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explosive-bubble tests on realized-volatility devolatized prices"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a Heston log-price path");
  ModelArgs sim_model;
  sim_model.add_to(sim);
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("-o,--out", sim_out, "Output CSV (default stdout)");
  double unused_tau0 = 0.1, unused_level = 0.05;
  sim->add_option("--tau0", unused_tau0, "Accepted for interface uniformity");
  sim->add_option("--level", unused_level, "Accepted for interface uniformity");

  // rv
  auto* rv = app.add_subcommand("rv", "Per-interval realized variances");
  IngestArgs rv_in;
  rv_in.add_to(rv);
  std::string rv_out;
  rv->add_option("-o,--out", rv_out, "Output file (default stdout)");
  std::uint64_t unused_seed = 0;
  rv->add_option("--seed", unused_seed, "Accepted for interface uniformity");
  rv->add_option("--tau0", unused_tau0, "Accepted for interface uniformity");
  rv->add_option("--level", unused_level, "Accepted for interface uniformity");

  // test
  auto* test = app.add_subcommand("test", "Run the PWY or RVPWY test");
  IngestArgs test_in;
  test_in.add_to(test);
  std::string test_kind = "rvpwy";
  double test_tau0 = 0.1;
  double test_level = 0.05;
  std::optional<std::uint64_t> test_seed;
  std::string test_proxy, test_out, test_trace;
  std::optional<double> test_min_episode;
  test->add_option("--test", test_kind, "pwy | rvpwy")
      ->check(CLI::IsMember({"pwy", "rvpwy"}))
      ->capture_default_str();
  test->add_option("--tau0", test_tau0, "Minimum window fraction")->capture_default_str();
  test->add_option("--level", test_level, "Level used for the headline decision")
      ->capture_default_str();
  test->add_option("--seed", test_seed, "Recorded in the report provenance");
  test->add_option("--vol-proxy", test_proxy,
                   "Fine-grid file whose realized volatility devolatizes the input "
                   "(e.g. nominal index for a real index)");
  test->add_option("--min-episode", test_min_episode,
                   "Drop completed episodes shorter than this fraction (default log(n)/n)");
  test->add_option("-o,--out", test_out, "Report JSON (default stdout)");
  test->add_option("--trace", test_trace, "Write the detector trace (TSV) here");

  // datestamp
  auto* ds = app.add_subcommand("datestamp", "Detector trace and date-stamped episodes");
  IngestArgs ds_in;
  ds_in.add_to(ds);
  std::string ds_detector = "rvdf";
  double ds_tau0 = 0.1;
  double ds_level = 0.05;
  std::optional<double> ds_cv, ds_min_duration, ds_min_episode;
  std::uint64_t ds_seed = 0;
  std::string ds_out, ds_trace;
  ds->add_option("--detector", ds_detector, "rvdf | df")
      ->check(CLI::IsMember({"rvdf", "df"}))
      ->capture_default_str();
  ds->add_option("--tau0", ds_tau0, "Minimum window fraction")->capture_default_str();
  ds->add_option("--level", ds_level, "Level of the built-in detector threshold")
      ->capture_default_str();
  ds->add_option("--cv", ds_cv, "Detector threshold (overrides --level)");
  ds->add_option("--min-duration", ds_min_duration, "Minimum duration (default log(n)/n)");
  ds->add_option("--min-episode", ds_min_episode, "Episode length filter (default min duration)");
  ds->add_option("--seed", ds_seed, "Unused; accepted for interface uniformity");
  ds->add_option("-o,--out", ds_out, "Episode listing (default stdout)");
  ds->add_option("--trace", ds_trace, "Write the detector trace (TSV) here");

  // critvals
  auto* cv = app.add_subcommand("critvals", "Simulate null critical values");
  std::size_t cv_n = 200, cv_reps = 10000;
  double cv_tau0 = 0.1;
  std::uint64_t cv_seed = 1;
  std::string cv_levels = "0.01,0.05,0.10", cv_stat = "supdf", cv_out;
  unsigned cv_threads = 1;
  std::optional<double> cv_level;
  cv->add_option("--n", cv_n, "Sample size")->capture_default_str();
  cv->add_option("--tau0", cv_tau0, "Minimum window fraction")->capture_default_str();
  cv->add_option("--reps", cv_reps, "Replications")->capture_default_str();
  cv->add_option("--seed", cv_seed, "Random seed")->capture_default_str();
  cv->add_option("--levels", cv_levels, "Comma-separated levels")->capture_default_str();
  cv->add_option("--level", cv_level, "Single level (overrides --levels)");
  cv->add_option("--statistic", cv_stat, "supdf | cusum")
      ->check(CLI::IsMember({"supdf", "cusum"}))
      ->capture_default_str();
  cv->add_option("--threads", cv_threads, "Worker threads")->capture_default_str();
  cv->add_option("-o,--out", cv_out, "Output table (default stdout)");

  // mc
  auto* mc = app.add_subcommand("mc", "Size / power Monte Carlo experiment");
  ModelArgs mc_model;
  mc_model.add_to(mc);
  std::string mc_experiment = "size";
  std::size_t mc_reps = 1000, mc_B = 199;
  double mc_tau0 = 0.1;
  std::string mc_levels = "0.01,0.05,0.10", mc_json, mc_out, mc_sweep_kappa, mc_sweep_tau;
  std::optional<double> mc_level;
  std::vector<std::string> mc_tests{"pwy", "rvpwy"};
  std::uint64_t mc_seed = 1;
  unsigned mc_threads = 1;
  mc->add_option("--experiment", mc_experiment, "size | power")
      ->check(CLI::IsMember({"size", "power"}))
      ->capture_default_str();
  mc->add_option("--reps", mc_reps, "Replications")->capture_default_str();
  mc->add_option("--tau0", mc_tau0, "Minimum window fraction")->capture_default_str();
  mc->add_option("--levels", mc_levels, "Comma-separated nominal sizes")->capture_default_str();
  mc->add_option("--level", mc_level, "Single nominal size (overrides --levels)");
  mc->add_option("--tests", mc_tests, "Any of pwy rvpwy btpwy scpwy cusum")->capture_default_str();
  mc->add_option("--seed", mc_seed, "Random seed")->capture_default_str();
  mc->add_option("--B", mc_B, "Bootstrap replications")->capture_default_str();
  mc->add_option("--threads", mc_threads, "Worker threads")->capture_default_str();
  mc->add_option("--sweep-kappa", mc_sweep_kappa, "power: comma-separated kappa* values");
  mc->add_option("--sweep-tau", mc_sweep_tau, "power: comma-separated tau* values");
  mc->add_option("--json", mc_json, "Also write a JSON dump here");
  mc->add_option("-o,--out", mc_out, "Delimited table (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto path = simulate_heston(sim_model.heston(), sim_model.kappa_schedule(),
                                        sim_model.grid(), sim_seed);
      Output out(sim_out);
      io::write_path_csv(out.stream(), path);
    } else if (*rv) {
      const auto series = io::ingest(rv_in.spec(rv_in.input));
      const auto rvs = rv_series(series.path, series.demean);
      Output out(rv_out);
      out.stream() << "index\tdate\trealized_variance\n";
      for (std::size_t i = 0; i < rvs.size(); ++i) {
        out.stream() << i + 1 << '\t' << series.labels[i + 1] << '\t' << shortest(rvs.values[i])
                     << '\n';
      }
    } else if (*test) {
      const auto series = io::ingest(test_in.spec(test_in.input));
      std::optional<io::IngestedSeries> proxy;
      if (!test_proxy.empty()) proxy = io::ingest(test_in.spec(test_proxy));
      io::TestOptions opt;
      opt.test = test_kind == "pwy" ? io::TestChoice::PWY : io::TestChoice::RVPWY;
      opt.tau0 = test_tau0;
      opt.seed = test_seed;
      opt.min_episode = test_min_episode;
      const auto outcome = io::run_test(series, opt, proxy ? &*proxy : nullptr);
      Output out(test_out);
      io::write_report(out.stream(), outcome.report);
      if (!test_out.empty()) {
        print_report_summary(std::cout, outcome.report);
        const double cv_at_level = builtin_cv(CvKind::PwySup, test_level);
        std::cout << "decision at " << test_level * 100 << "%: "
                  << (outcome.report.value > cv_at_level ? "reject" : "accept") << '\n';
      }
      if (!test_trace.empty()) {
        std::ofstream tf(test_trace);
        io::write_trace(tf, outcome.trace, outcome.labels, outcome.report.detector_cv);
      }
    } else if (*ds) {
      const auto series = io::ingest(ds_in.spec(ds_in.input));
      const auto trace = ds_detector == "df" ? df_trace(series.path, ds_tau0)
                                             : rvdf_trace(series.path, ds_tau0, series.demean);
      const double threshold = ds_cv.value_or(builtin_cv(CvKind::DfMarginal, ds_level));
      const double min_dur = ds_min_duration.value_or(default_min_duration(trace.n));
      const auto list = filter_episodes(date_stamp(trace, threshold, min_dur),
                                        ds_min_episode.value_or(min_dur));
      Output out(ds_out);
      out.stream() << "# cv " << shortest(threshold) << "\n# min_duration " << shortest(min_dur)
                   << "\nstart_index\tstart_date\tstart_fraction\tend_index\tend_date\t"
                   << "end_fraction\n";
      for (const auto& e : io::label_episodes(list, series.labels, trace.n)) {
        out.stream() << e.start_index << '\t' << e.start_date << '\t' << shortest(e.start_fraction)
                     << '\t';
        if (e.end_index) {
          out.stream() << *e.end_index << '\t' << *e.end_date << '\t' << shortest(*e.end_fraction)
                       << '\n';
        } else {
          out.stream() << "open\topen\topen\n";
        }
      }
      if (!ds_trace.empty()) {
        std::ofstream tf(ds_trace);
        io::write_trace(tf, trace, series.labels, threshold);
      }
    } else if (*cv) {
      const auto levels = cv_level ? std::vector<double>{*cv_level} : parse_list(cv_levels);
      const auto table = simulate_null_table(
          cv_n, cv_tau0, cv_reps, cv_seed, levels,
          cv_stat == "cusum" ? NullStatistic::Cusum : NullStatistic::SupDF, cv_threads);
      Output out(cv_out);
      write_table(out.stream(), table);
    } else if (*mc) {
      McConfig cfg;
      cfg.reps = mc_reps;
      cfg.grid = mc_model.grid();
      cfg.heston = mc_model.heston();
      cfg.tau0 = mc_tau0;
      cfg.levels = mc_level ? std::vector<double>{*mc_level} : parse_list(mc_levels);
      cfg.tests = parse_tests(mc_tests);
      cfg.seed = mc_seed;
      cfg.bootstrap_B = mc_B;
      cfg.threads = mc_threads;

      FrequencyTable table;
      if (mc_experiment == "size") {
        cfg.schedule = NullRegime{};
        table = run_size_experiment(cfg);
      } else {
        McConfig null_cfg = cfg;
        null_cfg.schedule = NullRegime{};
        std::vector<std::pair<std::string, KappaSchedule>> points;
        if (!mc_sweep_kappa.empty()) {
          for (double k : parse_list(mc_sweep_kappa)) {
            points.emplace_back("kappa=" + std::to_string(k), OneShift{mc_model.tau_star, k});
          }
        } else if (!mc_sweep_tau.empty()) {
          for (double t : parse_list(mc_sweep_tau)) {
            points.emplace_back("tau=" + std::to_string(t), OneShift{t, mc_model.kappa});
          }
        } else {
          points.emplace_back("", OneShift{mc_model.tau_star, mc_model.kappa});
        }
        table.seed = cfg.seed;
        for (const auto& [label, sched] : points) {
          McConfig point_cfg = cfg;
          point_cfg.schedule = sched;
          table.append(run_power_experiment(point_cfg, null_cfg, label));
        }
      }
      Output out(mc_out);
      io::write_frequency_table(out.stream(), table);
      if (!mc_json.empty()) {
        std::ofstream jf(mc_json);
        jf << io::to_json(table).dump(2) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "rvbubble: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
