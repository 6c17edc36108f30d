// drive_audit: batch analyzer for canonical driving scenarios.
//
// Subcommands: analyze (metrics + labels + reports), filter (criticality
// filter), synth (scenario generator), validate (invariant check), report
// (re-render tables from a previous analyze run). Exit codes: 0 success,
// 1 per-file failures, 2 configuration errors.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/pipeline.hpp"
#include "driveaudit/synthgen.hpp"

namespace {

using namespace driveaudit;

constexpr int kConfigError = 2;

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<MetricId> parse_metric_list(const std::vector<std::string>& names) {
  std::vector<MetricId> out;
  for (const std::string& n : names) {
    const auto m = metric_from_string(n);
    if (!m) throw ParameterError("--metrics", "unknown metric '" + n + "'");
    out.push_back(*m);
  }
  return out;
}

void check_ttc(const TtcConfig& ttc) {
  if (!(ttc.fine_step > 0.0)) throw ParameterError("--ttc-fine-step", "must be positive");
  if (!(ttc.grid_step >= ttc.fine_step)) {
    throw ParameterError("--ttc-grid-step", "must be at least the fine step");
  }
  const double ratio = ttc.grid_step / ttc.fine_step;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw ParameterError("--ttc-grid-step", "must be an integer multiple of the fine step");
  }
  if (!(ttc.grid_max >= ttc.grid_step)) {
    throw ParameterError("--ttc-grid-max", "must be at least one grid step");
  }
}

void print_failures(const RunSummary& s) {
  constexpr std::size_t kMaxShown = 20;
  for (std::size_t i = 0; i < s.failures.size() && i < kMaxShown; ++i) {
    std::cerr << "error: " << s.failures[i] << "\n";
  }
  if (s.failures.size() > kMaxShown) {
    std::cerr << "... and " << s.failures.size() - kMaxShown << " more\n";
  }
}

// Options shared by analyze and filter.
struct BatchFlags {
  std::vector<std::string> inputs;
  std::string out;
  std::string rules;
  std::vector<std::string> metrics;
  double corridor_halfwidth = MetricsConfig{}.corridor_halfwidth;
  double ttc_grid_step = TtcConfig{}.grid_step;
  double ttc_grid_max = TtcConfig{}.grid_max;
  double ttc_fine_step = TtcConfig{}.fine_step;
  int jobs = default_jobs();
  std::string corpus_label;
  std::string stats_mode;
  bool all_pairs = false;
};

void add_batch_flags(CLI::App& cmd, BatchFlags& f) {
  cmd.add_option("--input", f.inputs, "Scenario files or directories")
      ->required()
      ->type_name("PATH");
  cmd.add_option("--out", f.out, "Output directory")->required()->type_name("DIR");
  cmd.add_option("--rules", f.rules, "Threshold rules JSON file (default: shipped thresholds)")
      ->type_name("FILE");
  cmd.add_option("--metrics", f.metrics, "Metrics to compute (default: all)")->delimiter(',');
  cmd.add_option("--corridor-halfwidth", f.corridor_halfwidth,
                 "On-path corridor half width for GAP [m]");
  cmd.add_option("--ttc-grid-step", f.ttc_grid_step, "TTC reporting grid step [s]");
  cmd.add_option("--ttc-grid-max", f.ttc_grid_max, "TTC horizon [s]");
  cmd.add_option("--ttc-fine-step", f.ttc_fine_step, "TTC contact-detection step [s]");
  cmd.add_option("--jobs", f.jobs, "Worker threads")->envname("DRIVE_AUDIT_JOBS");
  cmd.add_option("--corpus-label", f.corpus_label, "Corpus name used in report tables");
  cmd.add_option("--stats-mode", f.stats_mode, "Statistics granularity: per-frame | per-agent");
  cmd.add_flag("--all-pairs", f.all_pairs,
               "Evaluate GAP/TTC/PET for every vehicle, not only the ego");
}

RunConfig to_run_config(const BatchFlags& f) {
  RunConfig cfg;
  for (const std::string& p : f.inputs) cfg.inputs.emplace_back(p);
  cfg.out_dir = f.out;
  if (!f.rules.empty()) cfg.rules_path = f.rules;
  cfg.metrics.enabled = parse_metric_list(f.metrics);
  cfg.metrics.corridor_halfwidth = f.corridor_halfwidth;
  cfg.metrics.ttc.grid_step = f.ttc_grid_step;
  cfg.metrics.ttc.grid_max = f.ttc_grid_max;
  cfg.metrics.ttc.fine_step = f.ttc_fine_step;
  cfg.metrics.pair_all_vehicles = f.all_pairs;
  check_ttc(cfg.metrics.ttc);
  if (!(cfg.metrics.corridor_halfwidth > 0.0)) {
    throw ParameterError("--corridor-halfwidth", "must be positive");
  }
  if (f.jobs < 1) throw ParameterError("--jobs", "must be at least 1");
  cfg.jobs = f.jobs;
  cfg.corpus_label = f.corpus_label;
  if (!f.stats_mode.empty()) {
    const auto m = stats_mode_from_string(f.stats_mode);
    if (!m) throw ParameterError("--stats-mode", "expected per-frame or per-agent");
    cfg.stats_mode = *m;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criticality and traffic-rule analytics over driving scenario corpora"};
  app.require_subcommand(1);

  // --- analyze ---
  BatchFlags analyze_flags;
  CLI::App* analyze = app.add_subcommand("analyze", "Compute metrics, labels, and reports");
  add_batch_flags(*analyze, analyze_flags);

  // --- filter ---
  BatchFlags filter_flags;
  std::string filter_mode = "drop-critical";
  CLI::App* filter = app.add_subcommand("filter", "Copy scenarios matching a criticality filter");
  add_batch_flags(*filter, filter_flags);
  filter->add_option("--mode", filter_mode, "drop-critical | keep-critical");

  // --- synth ---
  std::string synth_out;
  std::string synth_kind;
  int synth_n = 10;
  unsigned synth_seed = 0;
  double synth_noise = 0.0;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus with expectations");
  synth->add_option("--out", synth_out, "Output directory")->required()->type_name("DIR");
  synth->add_option("--kind", synth_kind,
                    "Case kind (car_following, crossing_paths, cyclist_overtake, "
                    "crosswalk_approach, solid_line_drift, stationary_field); default: mixed");
  synth->add_option("--n", synth_n, "Number of scenarios");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--noise-sigma", synth_noise, "Gaussian position noise sigma [m]");

  // --- validate ---
  std::vector<std::string> validate_inputs;
  CLI::App* validate = app.add_subcommand("validate", "Check scenario files against invariants");
  validate->add_option("--input", validate_inputs, "Scenario files or directories")
      ->required()
      ->type_name("PATH");

  // --- report ---
  std::string report_in, report_out, report_format, report_label, report_stats_mode;
  CLI::App* report = app.add_subcommand("report", "Re-render tables from an analyze run");
  report->add_option("--input", report_in, "Analyze output directory")
      ->required()
      ->type_name("DIR");
  report->add_option("--out", report_out, "Output directory")->required()->type_name("DIR");
  report->add_option("--format", report_format, "csv | json | md (default: all)");
  report->add_option("--corpus-label", report_label, "Override the stored corpus label");
  report->add_option("--stats-mode", report_stats_mode,
                     "Override the stored statistics granularity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*analyze) {
      const RunSummary s = run_analyze(to_run_config(analyze_flags));
      print_failures(s);
      std::cout << "analyzed " << s.files_seen << " scenario(s): " << s.files_ok << " ok, "
                << s.files_failed << " failed, " << s.sample_count << " samples\n"
                << "artifacts in " << analyze_flags.out << "\n";
      return s.exit_code;
    }
    if (*filter) {
      RunConfig cfg = to_run_config(filter_flags);
      const auto mode = filter_mode_from_string(filter_mode);
      if (!mode) throw ParameterError("--mode", "expected drop-critical or keep-critical");
      cfg.filter_mode = *mode;
      const RunSummary s = run_filter(cfg);
      print_failures(s);
      std::cout << "kept " << s.files_kept << " of " << s.files_seen << " scenario(s) ("
                << to_string(cfg.filter_mode) << "), " << s.files_failed << " failed\n"
                << "scenarios in " << (std::filesystem::path(filter_flags.out) / "scenarios").string()
                << "\n";
      return s.exit_code;
    }
    if (*synth) {
      CorpusOptions opt;
      opt.count = synth_n;
      opt.seed = synth_seed;
      opt.noise_sigma = synth_noise;
      if (!synth_kind.empty()) {
        const auto k = synth_kind_from_string(synth_kind);
        if (!k) throw ParameterError("--kind", "unknown case kind '" + synth_kind + "'");
        opt.kind = *k;
      }
      const std::vector<std::string> files = generate_corpus(synth_out, opt);
      std::cout << "wrote " << files.size() << " scenario(s) to " << synth_out << "\n"
                << "expectations: " << (std::filesystem::path(synth_out) / "expected.jsonl").string()
                << "\n";
      return 0;
    }
    if (*validate) {
      std::vector<std::filesystem::path> paths(validate_inputs.begin(), validate_inputs.end());
      return run_validate(paths, std::cout).exit_code;
    }
    if (*report) {
      RunConfig cfg;
      cfg.inputs = {std::filesystem::path(report_in)};
      cfg.out_dir = report_out;
      cfg.corpus_label = report_label;
      if (!report_format.empty()) {
        const auto f = report_format_from_string(report_format);
        if (!f) throw ParameterError("--format", "expected csv, json, or md");
        cfg.report_format = *f;
      }
      if (!report_stats_mode.empty()) {
        const auto m = stats_mode_from_string(report_stats_mode);
        if (!m) throw ParameterError("--stats-mode", "expected per-frame or per-agent");
        cfg.stats_mode = *m;
      }
      const RunSummary s = run_report(cfg);
      std::cout << "re-rendered reports for " << s.files_ok << " scenario(s) into " << report_out
                << "\n";
      return s.exit_code;
    }
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n"
              << "run with --help for usage\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return 0;
}
