#include "driveaudit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/numeric_text.hpp"
#include "driveaudit/scenario_io.hpp"

namespace driveaudit {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::Greater: return ">";
    case Comparator::AbsGreater: return "abs>";
  }
  return "<";
}

std::optional<Comparator> comparator_from_string(std::string_view s) {
  if (s == "<") return Comparator::Less;
  if (s == ">") return Comparator::Greater;
  if (s == "abs>") return Comparator::AbsGreater;
  return std::nullopt;
}

std::vector<ThresholdRule> default_rules() {
  return {
    {MetricId::VEL, Comparator::Greater, 14.0, true},
    {MetricId::ACC, Comparator::AbsGreater, 6.0, true},
    {MetricId::GAP, Comparator::Less, 0.0, false},
    {MetricId::TTC, Comparator::Less, 2.0, true},
    {MetricId::PET, Comparator::Less, 0.0, false},
    {MetricId::LADTB, Comparator::Less, 1.5, true},
    {MetricId::LODTB, Comparator::Less, 0.0, false},
    {MetricId::LADTP, Comparator::Less, 1.5, true},
    {MetricId::LODTP, Comparator::Less, 1.5, true},
    {MetricId::DTPNZ, Comparator::Less, 1.5, true},
    {MetricId::VOZ, Comparator::Greater, 0.0, false},
    {MetricId::SLC, Comparator::Greater, 0.0, true},
  };
}

bool rule_triggers(const ThresholdRule& rule, const MetricSample& sample) {
  if (!rule.enabled || !sample.defined || rule.metric != sample.metric) return false;
  switch (rule.comparator) {
    case Comparator::Less: return sample.value < rule.bound;
    case Comparator::Greater: return sample.value > rule.bound;
    case Comparator::AbsGreater: return std::abs(sample.value) > rule.bound;
  }
  return false;
}

std::string serialize_rules(const std::vector<ThresholdRule>& rules) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const ThresholdRule& r = rules[i];
    out += "  {\"metric\": \"";
    out += to_string(r.metric);
    out += "\", \"comparator\": \"";
    out += to_string(r.comparator);
    out += "\", \"bound\": " + format_double(r.bound);
    out += ", \"enabled\": ";
    out += r.enabled ? "true" : "false";
    out += i + 1 < rules.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

std::vector<ThresholdRule> parse_rules(const std::string& text, const std::string& origin) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin, e.what());
  }
  if (!root.is_array()) throw SchemaError(origin, "rules file must be a JSON array");

  std::vector<ThresholdRule> rules;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string where = origin + "[" + std::to_string(i) + "]";
    const auto& jr = root[i];
    if (!jr.is_object()) throw SchemaError(where, "expected object");
    for (const char* key : {"metric", "comparator", "bound", "enabled"}) {
      if (!jr.contains(key)) throw SchemaError(where, std::string("missing field '") + key + "'");
    }
    if (!jr["metric"].is_string() || !jr["comparator"].is_string() || !jr["bound"].is_number() ||
        !jr["enabled"].is_boolean()) {
      throw SchemaError(where, "expected {metric: string, comparator: string, "
                               "bound: number, enabled: bool}");
    }
    ThresholdRule r;
    const auto metric = metric_from_string(jr["metric"].get<std::string>());
    if (!metric) throw SchemaError(where + ".metric", "unknown metric '" +
                                                        jr["metric"].get<std::string>() + "'");
    const auto cmp = comparator_from_string(jr["comparator"].get<std::string>());
    if (!cmp) throw SchemaError(where + ".comparator", "expected one of <, >, abs>");
    r.metric = *metric;
    r.comparator = *cmp;
    r.bound = jr["bound"].get<double>();
    r.enabled = jr["enabled"].get<bool>();
    rules.push_back(r);
  }
  return rules;
}

std::vector<ThresholdRule> load_rules(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open rules file");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_rules(buf.str(), path.filename().string());
}

std::vector<CriticalityLabel> classify_agents(const std::vector<MetricSample>& samples,
                                              const std::vector<ThresholdRule>& rules) {
  std::map<std::string, CriticalityLabel> by_agent;
  for (const MetricSample& s : samples) {
    if (s.subject.empty()) continue;
    CriticalityLabel& label = by_agent[s.subject];
    label.agent_id = s.subject;
    for (const ThresholdRule& r : rules) {
      if (rule_triggers(r, s)) {
        label.triggered.push_back({s.metric, s.frame, s.value});
        label.is_critical = true;
        break;  // one record per sample even if several rules name the metric
      }
    }
  }
  std::vector<CriticalityLabel> out;
  out.reserve(by_agent.size());
  for (auto& [id, label] : by_agent) out.push_back(std::move(label));
  return out;
}

ScenarioClassification classify_scenario(const std::vector<CriticalityLabel>& labels) {
  ScenarioClassification out;
  out.agent_count = static_cast<int>(labels.size());
  std::map<MetricId, std::set<std::string>> agents_per_metric;
  for (const CriticalityLabel& l : labels) {
    if (!l.is_critical) continue;
    ++out.critical_agent_count;
    out.is_critical = true;
    for (const TriggerRecord& t : l.triggered) agents_per_metric[t.metric].insert(l.agent_id);
  }
  for (const auto& [metric, agents] : agents_per_metric) {
    out.critical_agents_per_metric[metric] = static_cast<int>(agents.size());
  }
  return out;
}

std::string_view to_string(FilterMode m) {
  return m == FilterMode::DropCritical ? "drop-critical" : "keep-critical";
}

std::optional<FilterMode> filter_mode_from_string(std::string_view s) {
  if (s == "drop-critical") return FilterMode::DropCritical;
  if (s == "keep-critical") return FilterMode::KeepCritical;
  return std::nullopt;
}

std::vector<FilterDecision> filter_corpus(const std::vector<std::filesystem::path>& files,
                                          const std::vector<ThresholdRule>& rules, FilterMode mode,
                                          const MetricsConfig& metrics_cfg) {
  std::vector<FilterDecision> out;
  out.reserve(files.size());
  for (const auto& file : files) {
    FilterDecision d;
    d.file = file.string();
    try {
      const Scenario s = load_scenario(file);
      d.scenario_id = s.meta.scenario_id;
      d.loaded = true;
      const auto samples = compute_all(s, metrics_cfg);
      const auto labels = classify_agents(samples, rules);
      std::set<MetricId> metrics;
      for (const CriticalityLabel& l : labels) {
        for (const TriggerRecord& t : l.triggered) metrics.insert(t.metric);
        d.is_critical = d.is_critical || l.is_critical;
      }
      d.triggered_metrics.assign(metrics.begin(), metrics.end());
      d.kept = mode == FilterMode::DropCritical ? !d.is_critical : d.is_critical;
    } catch (const Error& e) {
      d.error = e.what();
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace driveaudit
