#pragma once

#include <string>
#include <vector>

#include "driveaudit/classify.hpp"
#include "driveaudit/metrics.hpp"

namespace driveaudit {

// Metric dumps: one record per defined sample, either columnar CSV with
// header `metric,subject,other,frame,value` or the equivalent JSON-lines
// form with the same field order. Undefined samples are skipped on write;
// reads return everything marked defined.

std::string samples_to_csv(const std::vector<MetricSample>& samples);
std::string samples_to_jsonl(const std::vector<MetricSample>& samples);

std::vector<MetricSample> samples_from_csv(const std::string& text, const std::string& origin);
std::vector<MetricSample> samples_from_jsonl(const std::string& text, const std::string& origin);

// Per-agent criticality labels, one JSON line per agent.
struct ScenarioLabels {
  std::string scenario_id;
  std::vector<CriticalityLabel> labels;
};

std::string labels_to_jsonl(const std::string& scenario_id,
                            const std::vector<CriticalityLabel>& labels);

// Groups consecutive lines of equal scenario_id back together.
std::vector<ScenarioLabels> labels_from_jsonl(const std::string& text, const std::string& origin);

}  // namespace driveaudit
