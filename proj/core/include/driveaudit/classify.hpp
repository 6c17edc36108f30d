#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "driveaudit/metrics.hpp"

namespace driveaudit {

enum class Comparator { Less, Greater, AbsGreater };

std::string_view to_string(Comparator c);                      // "<", ">", "abs>"
std::optional<Comparator> comparator_from_string(std::string_view s);

// One criticality threshold. A defined sample triggers when the strict
// comparison holds; boundary values never trigger, disabled rules never
// trigger.
struct ThresholdRule {
  MetricId metric = MetricId::VEL;
  Comparator comparator = Comparator::Less;
  double bound = 0.0;
  bool enabled = false;
};

// The shipped thresholds, one rule per metric: VEL > 14 m/s, |ACC| > 6 m/s²,
// TTC < 2 s, LADTB < 1.5 m, LADTP < 1.5 m, LODTP < 1.5 m (so the smaller
// pedestrian clearance component governs), DTPNZ < 1.5 m, SLC > 0 m; GAP,
// PET, VOZ and LODTB carry no bound and are disabled.
std::vector<ThresholdRule> default_rules();

bool rule_triggers(const ThresholdRule& rule, const MetricSample& sample);

// JSON array of {metric, comparator, bound, enabled}.
std::string serialize_rules(const std::vector<ThresholdRule>& rules);
std::vector<ThresholdRule> parse_rules(const std::string& text, const std::string& origin);
std::vector<ThresholdRule> load_rules(const std::filesystem::path& path);

struct TriggerRecord {
  MetricId metric = MetricId::VEL;
  int frame = 0;
  double value = 0.0;
};

struct CriticalityLabel {
  std::string agent_id;
  std::vector<TriggerRecord> triggered;  // in sample order
  bool is_critical = false;              // <=> triggered non-empty
};

// One label per subject appearing in `samples`, sorted by agent id.
std::vector<CriticalityLabel> classify_agents(const std::vector<MetricSample>& samples,
                                              const std::vector<ThresholdRule>& rules);

struct ScenarioClassification {
  bool is_critical = false;
  int agent_count = 0;           // labeled agents
  int critical_agent_count = 0;  // distinct critical agents
  std::map<MetricId, int> critical_agents_per_metric;
};

ScenarioClassification classify_scenario(const std::vector<CriticalityLabel>& labels);

enum class FilterMode { DropCritical, KeepCritical };

std::string_view to_string(FilterMode m);  // "drop-critical" / "keep-critical"
std::optional<FilterMode> filter_mode_from_string(std::string_view s);

// One manifest line per input file: what was decided and why. Files that
// fail to load are skipped with the error recorded; they are never emitted.
struct FilterDecision {
  std::string file;
  std::string scenario_id;  // empty when the file failed to load
  bool loaded = false;
  bool is_critical = false;
  bool kept = false;
  std::vector<MetricId> triggered_metrics;  // distinct, enum order
  std::string error;
};

// Classifies every file and decides which ones the mode keeps. The caller
// copies kept files; decisions come back in input order.
std::vector<FilterDecision> filter_corpus(const std::vector<std::filesystem::path>& files,
                                          const std::vector<ThresholdRule>& rules, FilterMode mode,
                                          const MetricsConfig& metrics_cfg = {});

}  // namespace driveaudit
