#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driveaudit/classify.hpp"
#include "driveaudit/metrics.hpp"
#include "driveaudit/report.hpp"
#include "driveaudit/stats.hpp"

namespace driveaudit {

// Everything a batch run needs, with defaults materialized by the runner
// and echoed into <out_dir>/resolved_config.json. The parallelism degree is
// deliberately absent from that echo: it never changes any artifact, and
// recording it would break byte-for-byte comparability between runs.
struct RunConfig {
  std::vector<std::filesystem::path> inputs;  // scenario files or directories
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> rules_path;  // unset = shipped defaults
  MetricsConfig metrics;
  std::optional<StatsMode> stats_mode;  // unset = per-frame (report: inherited)
  FilterMode filter_mode = FilterMode::DropCritical;
  std::optional<ReportFormat> report_format;  // report: unset = every format
  int jobs = 1;
  std::string corpus_label;  // empty = "corpus" (report: inherited)
};

struct RunSummary {
  int exit_code = 0;  // 0 ok, 1 per-file failures occurred
  int files_seen = 0;
  int files_ok = 0;
  int files_failed = 0;
  int files_kept = 0;  // filter runs only
  long long sample_count = 0;
  std::vector<std::string> failures;  // "<file>: <reason>", input order
};

// Files or directories (scanned non-recursively for *.json, sorted by name)
// in input order. Throws ParameterError for a path that does not exist.
std::vector<std::filesystem::path> expand_inputs(
    const std::vector<std::filesystem::path>& inputs);

// Runs ingestion -> metrics -> classification over every input scenario and
// writes the full artifact tree under cfg.out_dir:
//   resolved_config.json       explicit config echo
//   manifest.jsonl             one record per input file, input order
//   dumps/<id>.samples.csv     defined samples, one file pair per scenario
//   dumps/<id>.samples.jsonl
//   labels.jsonl               per-agent criticality labels
//   medians.{csv,json,md}      corpus quantile table
//   critical_pct.{csv,json,md} corpus critical-share table
//   hist_<METRIC>.csv          fixed-range histograms, one per metric
//   run.log                    timestamped progress (the only
//                              non-reproducible artifact)
// Failing scenarios are recorded and skipped, never abort the batch.
// Throws (rather than returning nonzero) on configuration errors: missing
// inputs, unreadable rules, unwritable output directory.
RunSummary run_analyze(const RunConfig& cfg);

// Classifies every input scenario and copies the ones the filter mode keeps
// into <out_dir>/scenarios/, plus resolved_config.json, manifest.jsonl and
// run.log as above.
RunSummary run_filter(const RunConfig& cfg);

// Re-renders report tables from a previous analyze tree (cfg.inputs[0])
// into cfg.out_dir, without recomputing any metric. Honors
// cfg.report_format when set, otherwise writes every format.
RunSummary run_report(const RunConfig& cfg);

// Loads and invariant-checks every input scenario, one line per file to
// `out`. Exit code 1 when any file is invalid.
RunSummary run_validate(const std::vector<std::filesystem::path>& inputs, std::ostream& out);

}  // namespace driveaudit
