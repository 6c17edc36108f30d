#include "driveaudit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/sample_io.hpp"
#include "driveaudit/scenario_io.hpp"
#include "driveaudit/standardize.hpp"

namespace driveaudit {

namespace {

using nlohmann::ordered_json;

std::string iso_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  if (!out) throw IoError(path.string(), "write failed");
}

// Scenario ids appear in artifact file names; anything that could upset a
// filesystem is mapped to '_'.
std::string sanitize_for_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out.empty() ? "_" : out;
}

Scenario canonicalize(Scenario s) {
  if (s.meta.frame_rate_hz != kCanonicalFrameRateHz || s.frame_count != kCanonicalFrameCount) {
    s = resample_scenario(s, kCanonicalFrameRateHz, kCanonicalWindowSeconds);
  }
  return crop_map(s, kDefaultMapCropRadius);
}

ordered_json rules_to_json(const std::vector<ThresholdRule>& rules) {
  ordered_json arr = ordered_json::array();
  for (const ThresholdRule& r : rules) {
    ordered_json j;
    j["metric"] = std::string(to_string(r.metric));
    j["comparator"] = std::string(to_string(r.comparator));
    j["bound"] = r.bound;
    j["enabled"] = r.enabled;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<MetricId> resolved_metric_list(const MetricsConfig& m) {
  if (m.enabled.empty()) return {kAllMetrics.begin(), kAllMetrics.end()};
  return m.enabled;
}

// The explicit-config echo. Parallelism is logged to run.log instead (it
// cannot affect results and must not affect bytes).
ordered_json resolved_config_json(const RunConfig& cfg, const std::string& command,
                                  const std::vector<ThresholdRule>& rules, StatsMode stats_mode,
                                  const std::string& corpus_label) {
  ordered_json j;
  j["command"] = command;
  j["inputs"] = ordered_json::array();
  for (const auto& p : cfg.inputs) j["inputs"].push_back(p.string());
  j["rules_source"] = cfg.rules_path ? cfg.rules_path->string() : "default";
  j["rules"] = rules_to_json(rules);
  j["metrics"] = ordered_json::array();
  for (MetricId m : resolved_metric_list(cfg.metrics)) {
    j["metrics"].push_back(std::string(to_string(m)));
  }
  j["corridor_halfwidth"] = cfg.metrics.corridor_halfwidth;
  j["ttc"] = {{"grid_step", cfg.metrics.ttc.grid_step},
              {"grid_max", cfg.metrics.ttc.grid_max},
              {"fine_step", cfg.metrics.ttc.fine_step}};
  j["interaction_radius"] = cfg.metrics.interaction_radius;
  j["zone_radius"] = cfg.metrics.zone_radius;
  j["lane_match_max_lateral"] = cfg.metrics.lane_match_max_lateral;
  j["pair_all_vehicles"] = cfg.metrics.pair_all_vehicles;
  j["conflict_areas"] = cfg.metrics.auto_conflict_areas ? "auto" : "off";
  j["stats_mode"] = std::string(to_string(stats_mode));
  j["corpus_label"] = corpus_label;
  if (command == "filter") j["filter_mode"] = std::string(to_string(cfg.filter_mode));
  if (command == "report" && cfg.report_format) {
    j["format"] = std::string(to_string(*cfg.report_format));
  }
  return j;
}

// Everything computed for one input scenario before any artifact is
// written.
struct Outcome {
  std::string file;
  std::string scenario_id;
  bool ok = false;
  std::string error;
  int agent_count = 0;
  std::vector<MetricSample> samples;
  std::vector<CriticalityLabel> labels;
  ScenarioClassification cls;
};

Outcome process_one(const std::filesystem::path& path, const MetricsConfig& metrics_cfg,
                    const std::vector<ThresholdRule>& rules) {
  Outcome o;
  o.file = path.string();
  try {
    Scenario s = canonicalize(load_scenario(path));
    o.scenario_id = s.meta.scenario_id;
    o.agent_count = static_cast<int>(s.agents.size());
    o.samples = compute_all(s, metrics_cfg);
    o.labels = classify_agents(o.samples, rules);
    o.cls = classify_scenario(o.labels);
    o.ok = true;
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

// Runs `work` over every index with `jobs` workers and hands results to
// `drain` strictly in index order; in-flight results are bounded so memory
// stays proportional to the worker count, not the corpus. jobs == 1 runs
// everything inline.
void for_each_ordered(int n, int jobs, const std::function<Outcome(int)>& work,
                      const std::function<void(Outcome&&)>& drain) {
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) drain(work(i));
    return;
  }
  std::vector<std::optional<Outcome>> done(static_cast<std::size_t>(n));
  std::mutex mu;
  std::condition_variable produced, space;
  std::atomic<int> next{0};
  int drained = 0;
  const int window = 2 * jobs + 4;

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        Outcome o = work(i);
        std::unique_lock lk(mu);
        space.wait(lk, [&] { return i < drained + window; });
        done[static_cast<std::size_t>(i)] = std::move(o);
        produced.notify_all();
      }
    });
  }
  for (int k = 0; k < n; ++k) {
    std::unique_lock lk(mu);
    produced.wait(lk, [&] { return done[static_cast<std::size_t>(k)].has_value(); });
    Outcome o = std::move(*done[static_cast<std::size_t>(k)]);
    done[static_cast<std::size_t>(k)].reset();
    ++drained;
    lk.unlock();
    space.notify_all();
    drain(std::move(o));
  }
  for (std::thread& t : pool) t.join();
}

std::vector<ThresholdRule> resolve_rules(const RunConfig& cfg) {
  return cfg.rules_path ? load_rules(*cfg.rules_path) : default_rules();
}

void prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
}

ordered_json manifest_ok_record(const Outcome& o, long long samples, const std::string& dump) {
  ordered_json j;
  j["file"] = o.file;
  j["scenario_id"] = o.scenario_id;
  j["status"] = "ok";
  j["agents"] = o.agent_count;
  j["samples"] = samples;
  j["critical"] = o.cls.is_critical;
  if (!dump.empty()) j["dump"] = dump;
  return j;
}

ordered_json manifest_failed_record(const Outcome& o) {
  ordered_json j;
  j["file"] = o.file;
  if (!o.scenario_id.empty()) j["scenario_id"] = o.scenario_id;
  j["status"] = "failed";
  j["error"] = o.error;
  return j;
}

void write_report_files(const std::filesystem::path& dir, const std::string& corpus_label,
                        const StatsAccumulator& acc,
                        const std::vector<CriticalPercentageRow>& rows,
                        std::optional<ReportFormat> only_format) {
  const std::vector<CorpusSummaries> corpora = {{corpus_label, acc.summarize()}};
  const auto want = [&](ReportFormat f) { return !only_format || *only_format == f; };
  if (want(ReportFormat::Csv)) {
    write_file(dir / "medians.csv", render_medians_csv(corpora));
    write_file(dir / "critical_pct.csv", render_critical_csv(rows));
  }
  if (want(ReportFormat::Json)) {
    write_file(dir / "medians.json", render_medians_json(corpora));
    write_file(dir / "critical_pct.json", render_critical_json(rows));
  }
  if (want(ReportFormat::Md)) {
    write_file(dir / "medians.md", render_medians_md(corpora));
    write_file(dir / "critical_pct.md", render_critical_md(rows));
  }
  if (want(ReportFormat::Csv)) {
    for (const DistributionSummary& s : corpora[0].metrics) {
      write_file(dir / ("hist_" + std::string(to_string(s.metric)) + ".csv"),
                 render_histogram_csv(s));
    }
  }
}

// Sums within-scenario distinct critical-agent counts; agents in different
// scenarios are distinct even when their ids collide (every scenario has an
// "ego").
struct CriticalCounts {
  std::int64_t total_agents = 0;
  std::int64_t critical_agents = 0;
  std::array<std::int64_t, kAllMetrics.size()> per_metric{};

  void add(const ScenarioClassification& cls, int agent_count) {
    total_agents += agent_count;
    critical_agents += cls.critical_agent_count;
    for (const auto& [metric, count] : cls.critical_agents_per_metric) {
      per_metric[static_cast<std::size_t>(metric)] += count;
    }
  }

  std::vector<CriticalPercentageRow> rows(const std::string& label) const {
    if (total_agents == 0) return {};  // an empty corpus has no share to report
    CriticalPercentageRow row;
    row.corpus_label = label;
    row.total_agents = total_agents;
    for (std::size_t i = 0; i < per_metric.size(); ++i) {
      row.pct[i] =
          100.0 * static_cast<double>(per_metric[i]) / static_cast<double>(total_agents);
    }
    return {row};
  }
};

std::string file_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::filesystem::path> expand_inputs(
    const std::vector<std::filesystem::path>& inputs) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : inputs) {
    std::error_code ec;
    if (std::filesystem::is_directory(p, ec)) {
      std::vector<std::filesystem::path> dir_files;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
          dir_files.push_back(entry.path());
        }
      }
      std::sort(dir_files.begin(), dir_files.end(),
                [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
      files.insert(files.end(), dir_files.begin(), dir_files.end());
    } else if (std::filesystem::is_regular_file(p, ec)) {
      files.push_back(p);
    } else {
      throw ParameterError(p.string(), "input path does not exist");
    }
  }
  return files;
}

RunSummary run_analyze(const RunConfig& cfg) {
  const std::vector<std::filesystem::path> files = expand_inputs(cfg.inputs);
  const std::vector<ThresholdRule> rules = resolve_rules(cfg);
  const StatsMode stats_mode = cfg.stats_mode.value_or(StatsMode::PerFrame);
  const std::string label = cfg.corpus_label.empty() ? "corpus" : cfg.corpus_label;

  prepare_out_dir(cfg.out_dir);
  prepare_out_dir(cfg.out_dir / "dumps");
  write_file(cfg.out_dir / "resolved_config.json",
             resolved_config_json(cfg, "analyze", rules, stats_mode, label).dump(2) + "\n");

  std::ofstream log(cfg.out_dir / "run.log", std::ios::binary);
  std::ofstream manifest(cfg.out_dir / "manifest.jsonl", std::ios::binary);
  std::ofstream labels_out(cfg.out_dir / "labels.jsonl", std::ios::binary);
  if (!log || !manifest || !labels_out) {
    throw IoError(cfg.out_dir.string(), "cannot open output artifacts");
  }
  const auto start = std::chrono::steady_clock::now();
  log << iso_now() << " analyze started: " << files.size() << " file(s), jobs=" << cfg.jobs
      << "\n";

  RunSummary summary;
  summary.files_seen = static_cast<int>(files.size());
  StatsAccumulator acc;
  CriticalCounts counts;
  std::set<std::string> seen_ids;
  std::set<std::string> used_names;

  for_each_ordered(
      static_cast<int>(files.size()), cfg.jobs,
      [&](int i) { return process_one(files[static_cast<std::size_t>(i)], cfg.metrics, rules); },
      [&](Outcome&& o) {
        if (o.ok && !seen_ids.insert(o.scenario_id).second) {
          o.ok = false;
          o.error = "duplicate scenario_id '" + o.scenario_id + "'";
        }
        std::string dump_name;
        if (o.ok) {
          dump_name = sanitize_for_filename(o.scenario_id) + ".samples";
          if (!used_names.insert(dump_name).second) {
            o.ok = false;
            o.error = "dump file name collision for scenario_id '" + o.scenario_id + "'";
          }
        }
        if (!o.ok) {
          ++summary.files_failed;
          summary.failures.push_back(o.file + ": " + o.error);
          manifest << manifest_failed_record(o).dump() << "\n";
          log << iso_now() << " failed " << o.file << ": " << o.error << "\n";
          return;
        }
        ++summary.files_ok;
        summary.sample_count += static_cast<long long>(o.samples.size());
        write_file(cfg.out_dir / "dumps" / (dump_name + ".csv"), samples_to_csv(o.samples));
        write_file(cfg.out_dir / "dumps" / (dump_name + ".jsonl"), samples_to_jsonl(o.samples));
        labels_out << labels_to_jsonl(o.scenario_id, o.labels);
        manifest << manifest_ok_record(o, static_cast<long long>(o.samples.size()),
                                       "dumps/" + dump_name + ".csv")
                        .dump()
                 << "\n";
        acc.add_all(stats_mode == StatsMode::PerAgent ? reduce_per_agent(o.samples) : o.samples);
        counts.add(o.cls, o.agent_count);
      });

  write_report_files(cfg.out_dir, label, acc, counts.rows(label), std::nullopt);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << iso_now() << " analyze finished: ok=" << summary.files_ok
      << " failed=" << summary.files_failed << " samples=" << summary.sample_count
      << " elapsed=" << elapsed << "s\n";
  summary.exit_code = summary.files_failed > 0 ? 1 : 0;
  return summary;
}

RunSummary run_filter(const RunConfig& cfg) {
  const std::vector<std::filesystem::path> files = expand_inputs(cfg.inputs);
  const std::vector<ThresholdRule> rules = resolve_rules(cfg);
  const StatsMode stats_mode = cfg.stats_mode.value_or(StatsMode::PerFrame);
  const std::string label = cfg.corpus_label.empty() ? "corpus" : cfg.corpus_label;

  prepare_out_dir(cfg.out_dir);
  prepare_out_dir(cfg.out_dir / "scenarios");
  write_file(cfg.out_dir / "resolved_config.json",
             resolved_config_json(cfg, "filter", rules, stats_mode, label).dump(2) + "\n");

  std::ofstream log(cfg.out_dir / "run.log", std::ios::binary);
  std::ofstream manifest(cfg.out_dir / "manifest.jsonl", std::ios::binary);
  if (!log || !manifest) throw IoError(cfg.out_dir.string(), "cannot open output artifacts");
  const auto start = std::chrono::steady_clock::now();
  log << iso_now() << " filter started: " << files.size() << " file(s), mode="
      << to_string(cfg.filter_mode) << ", jobs=" << cfg.jobs << "\n";

  RunSummary summary;
  summary.files_seen = static_cast<int>(files.size());
  std::set<std::string> seen_ids;
  std::set<std::string> used_names;

  int index = 0;
  for_each_ordered(
      static_cast<int>(files.size()), cfg.jobs,
      [&](int i) { return process_one(files[static_cast<std::size_t>(i)], cfg.metrics, rules); },
      [&](Outcome&& o) {
        const std::filesystem::path src = files[static_cast<std::size_t>(index++)];
        if (o.ok && !seen_ids.insert(o.scenario_id).second) {
          o.ok = false;
          o.error = "duplicate scenario_id '" + o.scenario_id + "'";
        }
        const bool kept =
            o.ok && (cfg.filter_mode == FilterMode::DropCritical ? !o.cls.is_critical
                                                                 : o.cls.is_critical);
        std::string out_name;
        if (kept) {
          out_name = src.filename().string();
          if (!used_names.insert(out_name).second) {
            o.ok = false;
            o.error = "output name collision for '" + out_name + "'";
          }
        }
        if (!o.ok) {
          ++summary.files_failed;
          summary.failures.push_back(o.file + ": " + o.error);
          manifest << manifest_failed_record(o).dump() << "\n";
          log << iso_now() << " failed " << o.file << ": " << o.error << "\n";
          return;
        }
        ++summary.files_ok;
        summary.sample_count += static_cast<long long>(o.samples.size());
        if (kept) {
          ++summary.files_kept;
          write_file(cfg.out_dir / "scenarios" / out_name, file_read(src));
        }
        ordered_json j;
        j["file"] = o.file;
        j["scenario_id"] = o.scenario_id;
        j["status"] = "ok";
        j["critical"] = o.cls.is_critical;
        j["kept"] = kept;
        ordered_json triggers = ordered_json::array();
        for (const auto& [metric, count] : o.cls.critical_agents_per_metric) {
          if (count > 0) triggers.push_back(std::string(to_string(metric)));
        }
        j["triggers"] = std::move(triggers);
        manifest << j.dump() << "\n";
      });

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  log << iso_now() << " filter finished: ok=" << summary.files_ok
      << " failed=" << summary.files_failed << " kept=" << summary.files_kept
      << " elapsed=" << elapsed << "s\n";
  summary.exit_code = summary.files_failed > 0 ? 1 : 0;
  return summary;
}

RunSummary run_report(const RunConfig& cfg) {
  if (cfg.inputs.size() != 1) {
    throw ParameterError("input", "report takes exactly one analyze output directory");
  }
  const std::filesystem::path in_dir = cfg.inputs[0];
  if (!std::filesystem::is_directory(in_dir)) {
    throw ParameterError(in_dir.string(), "not a directory");
  }
  nlohmann::json stored;
  try {
    stored = nlohmann::json::parse(file_read(in_dir / "resolved_config.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError((in_dir / "resolved_config.json").string(), e.what());
  }

  std::string label = cfg.corpus_label;
  if (label.empty() && stored.contains("corpus_label")) {
    label = stored["corpus_label"].get<std::string>();
  }
  if (label.empty()) label = "corpus";
  StatsMode stats_mode = StatsMode::PerFrame;
  if (cfg.stats_mode) {
    stats_mode = *cfg.stats_mode;
  } else if (stored.contains("stats_mode")) {
    stats_mode = stats_mode_from_string(stored["stats_mode"].get<std::string>())
                     .value_or(StatsMode::PerFrame);
  }

  prepare_out_dir(cfg.out_dir);
  const std::vector<ThresholdRule> rules = resolve_rules(cfg);
  write_file(cfg.out_dir / "resolved_config.json",
             resolved_config_json(cfg, "report", rules, stats_mode, label).dump(2) + "\n");

  RunSummary summary;
  StatsAccumulator acc;
  CriticalCounts counts;

  // Walk the manifest of the analyze run; each ok record names its dump.
  std::istringstream manifest(file_read(in_dir / "manifest.jsonl"));
  std::string line;
  int lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = (in_dir / "manifest.jsonl").string() + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    ++summary.files_seen;
    if (!j.contains("status") || j["status"].get<std::string>() != "ok") {
      ++summary.files_failed;
      continue;
    }
    if (!j.contains("dump") || !j.contains("agents")) {
      throw SchemaError(where, "ok record missing dump/agents");
    }
    ++summary.files_ok;
    counts.total_agents += j["agents"].get<std::int64_t>();
    const std::vector<MetricSample> samples =
        samples_from_csv(file_read(in_dir / j["dump"].get<std::string>()),
                         j["dump"].get<std::string>());
    summary.sample_count += static_cast<long long>(samples.size());
    acc.add_all(stats_mode == StatsMode::PerAgent ? reduce_per_agent(samples) : samples);
  }

  // Critical shares come from the stored labels, scenario by scenario.
  for (const ScenarioLabels& sl :
       labels_from_jsonl(file_read(in_dir / "labels.jsonl"), "labels.jsonl")) {
    const ScenarioClassification cls = classify_scenario(sl.labels);
    counts.critical_agents += cls.critical_agent_count;
    for (const auto& [metric, count] : cls.critical_agents_per_metric) {
      counts.per_metric[static_cast<std::size_t>(metric)] += count;
    }
  }

  write_report_files(cfg.out_dir, label, acc, counts.rows(label), cfg.report_format);
  summary.exit_code = 0;
  return summary;
}

RunSummary run_validate(const std::vector<std::filesystem::path>& inputs, std::ostream& out) {
  const std::vector<std::filesystem::path> files = expand_inputs(inputs);
  RunSummary summary;
  summary.files_seen = static_cast<int>(files.size());
  for (const auto& f : files) {
    try {
      const Scenario s = load_scenario(f);
      out << "OK   " << f.string() << " (" << s.meta.scenario_id << ")\n";
      ++summary.files_ok;
    } catch (const std::exception& e) {
      out << "FAIL " << f.string() << ": " << e.what() << "\n";
      ++summary.files_failed;
      summary.failures.push_back(f.string() + ": " + e.what());
    }
  }
  out << summary.files_seen << " file(s) checked, " << summary.files_failed << " invalid\n";
  summary.exit_code = summary.files_failed > 0 ? 1 : 0;
  return summary;
}

}  // namespace driveaudit
