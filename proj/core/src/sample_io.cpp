#include "driveaudit/sample_io.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/numeric_text.hpp"

namespace driveaudit {

namespace {

using nlohmann::ordered_json;

constexpr const char* kCsvHeader = "metric,subject,other,frame,value";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string samples_to_csv(const std::vector<MetricSample>& samples) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricSample& s : samples) {
    if (!s.defined) continue;
    out += to_string(s.metric);
    out += ',' + s.subject + ',' + s.other + ',' + std::to_string(s.frame) + ',' +
           format_double(s.value) + '\n';
  }
  return out;
}

std::string samples_to_jsonl(const std::vector<MetricSample>& samples) {
  std::string out;
  for (const MetricSample& s : samples) {
    if (!s.defined) continue;
    ordered_json j;
    j["metric"] = std::string(to_string(s.metric));
    j["subject"] = s.subject;
    j["other"] = s.other;
    j["frame"] = s.frame;
    j["value"] = s.value;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<MetricSample> samples_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError(origin, "unexpected dump header");
  }
  std::vector<MetricSample> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto f = split_fields(line);
    if (f.size() != 5) throw ParseError(where, "expected 5 fields");
    MetricSample s;
    const auto metric = metric_from_string(f[0]);
    if (!metric) throw ParseError(where, "unknown metric '" + f[0] + "'");
    s.metric = *metric;
    s.subject = f[1];
    s.other = f[2];
    s.frame = static_cast<int>(parse_int(f[3], where));
    s.value = parse_double(f[4], where);
    s.defined = true;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MetricSample> samples_from_jsonl(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<MetricSample> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    if (!j.is_object() || !j.contains("metric") || !j.contains("subject") ||
        !j.contains("other") || !j.contains("frame") || !j.contains("value")) {
      throw SchemaError(where, "expected {metric, subject, other, frame, value}");
    }
    MetricSample s;
    const auto metric = metric_from_string(j["metric"].get<std::string>());
    if (!metric) throw SchemaError(where, "unknown metric");
    s.metric = *metric;
    s.subject = j["subject"].get<std::string>();
    s.other = j["other"].get<std::string>();
    s.frame = j["frame"].get<int>();
    s.value = j["value"].get<double>();
    s.defined = true;
    out.push_back(std::move(s));
  }
  return out;
}

std::string labels_to_jsonl(const std::string& scenario_id,
                            const std::vector<CriticalityLabel>& labels) {
  std::string out;
  for (const CriticalityLabel& l : labels) {
    ordered_json j;
    j["scenario_id"] = scenario_id;
    j["agent_id"] = l.agent_id;
    j["critical"] = l.is_critical;
    j["triggers"] = ordered_json::array();
    for (const TriggerRecord& t : l.triggered) {
      ordered_json jt;
      jt["metric"] = std::string(to_string(t.metric));
      jt["frame"] = t.frame;
      jt["value"] = t.value;
      j["triggers"].push_back(std::move(jt));
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ScenarioLabels> labels_from_jsonl(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<ScenarioLabels> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    if (!j.contains("scenario_id") || !j.contains("agent_id") || !j.contains("critical") ||
        !j.contains("triggers")) {
      throw SchemaError(where, "expected {scenario_id, agent_id, critical, triggers}");
    }
    const std::string sid = j["scenario_id"].get<std::string>();
    if (out.empty() || out.back().scenario_id != sid) out.push_back({sid, {}});
    CriticalityLabel l;
    l.agent_id = j["agent_id"].get<std::string>();
    l.is_critical = j["critical"].get<bool>();
    for (const auto& jt : j["triggers"]) {
      TriggerRecord t;
      const auto metric = metric_from_string(jt.at("metric").get<std::string>());
      if (!metric) throw SchemaError(where, "unknown metric in trigger");
      t.metric = *metric;
      t.frame = jt.at("frame").get<int>();
      t.value = jt.at("value").get<double>();
      l.triggered.push_back(t);
    }
    out.back().labels.push_back(std::move(l));
  }
  return out;
}

}  // namespace driveaudit
