#include "driveaudit/report.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/numeric_text.hpp"

namespace driveaudit {

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Md: return "md";
  }
  return "csv";
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "md") return ReportFormat::Md;
  return std::nullopt;
}

CriticalPercentageRow critical_percentages(const std::vector<CriticalityLabel>& labels,
                                           const std::string& corpus_label,
                                           std::int64_t total_agents) {
  if (total_agents == 0) throw DomainError("total_agents", "must be positive");
  CriticalPercentageRow row;
  row.corpus_label = corpus_label;
  row.total_agents = total_agents;
  std::array<std::set<std::string>, kAllMetrics.size()> agents;
  for (const CriticalityLabel& l : labels) {
    for (const TriggerRecord& t : l.triggered) {
      agents[static_cast<std::size_t>(t.metric)].insert(l.agent_id);
    }
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    row.pct[i] = 100.0 * static_cast<double>(agents[i].size()) /
                 static_cast<double>(total_agents);
  }
  return row;
}

namespace {

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Headline columns of the critical-share markdown table.
constexpr std::array<MetricId, 6> kHeadlineMetrics = {
  MetricId::VEL, MetricId::ACC, MetricId::TTC, MetricId::DTPNZ, MetricId::LADTB, MetricId::SLC,
};

}  // namespace

std::string render_medians_csv(const std::vector<CorpusSummaries>& corpora) {
  std::string out = "corpus,metric,count,median,q1,q3,min,max\n";
  for (const CorpusSummaries& c : corpora) {
    for (const DistributionSummary& s : c.metrics) {
      out += c.label;
      out += ',';
      out += to_string(s.metric);
      out += ',' + std::to_string(s.count) + ',';
      if (s.count > 0) {
        out += format_double(s.median) + ',' + format_double(s.q1) + ',' + format_double(s.q3) +
               ',' + format_double(s.min) + ',' + format_double(s.max);
      } else {
        out += ",,,,";
      }
      out += '\n';
    }
  }
  return out;
}

std::string render_medians_json(const std::vector<CorpusSummaries>& corpora) {
  nlohmann::ordered_json root;
  root["corpora"] = nlohmann::ordered_json::array();
  for (const CorpusSummaries& c : corpora) {
    nlohmann::ordered_json jc;
    jc["label"] = c.label;
    jc["metrics"] = nlohmann::ordered_json::array();
    for (const DistributionSummary& s : c.metrics) {
      nlohmann::ordered_json js;
      js["metric"] = std::string(to_string(s.metric));
      js["count"] = s.count;
      if (s.count > 0) {
        js["median"] = s.median;
        js["q1"] = s.q1;
        js["q3"] = s.q3;
        js["min"] = s.min;
        js["max"] = s.max;
      } else {
        js["median"] = nullptr;
        js["q1"] = nullptr;
        js["q3"] = nullptr;
        js["min"] = nullptr;
        js["max"] = nullptr;
      }
      jc["metrics"].push_back(std::move(js));
    }
    root["corpora"].push_back(std::move(jc));
  }
  return root.dump(2) + "\n";
}

std::string render_medians_md(const std::vector<CorpusSummaries>& corpora) {
  std::string out = "| Metric |";
  for (const CorpusSummaries& c : corpora) out += " " + c.label + " |";
  out += "\n| --- |";
  for (std::size_t i = 0; i < corpora.size(); ++i) out += " --- |";
  out += "\n";
  for (std::size_t mi = 0; mi < kAllMetrics.size(); ++mi) {
    out += "| ";
    out += to_string(kAllMetrics[mi]);
    out += " |";
    for (const CorpusSummaries& c : corpora) {
      const DistributionSummary& s = c.metrics.at(mi);
      out += s.count > 0 ? " " + two_decimals(s.median) + " |" : " - |";
    }
    out += "\n";
  }
  return out;
}

std::string render_critical_csv(const std::vector<CriticalPercentageRow>& rows) {
  std::string out = "corpus,total_agents";
  for (MetricId m : kAllMetrics) {
    out += ',';
    out += to_string(m);
  }
  out += '\n';
  for (const CriticalPercentageRow& r : rows) {
    out += r.corpus_label + ',' + std::to_string(r.total_agents);
    for (double p : r.pct) out += ',' + format_double(p);
    out += '\n';
  }
  return out;
}

std::string render_critical_json(const std::vector<CriticalPercentageRow>& rows) {
  nlohmann::ordered_json root;
  root["corpora"] = nlohmann::ordered_json::array();
  for (const CriticalPercentageRow& r : rows) {
    nlohmann::ordered_json jr;
    jr["label"] = r.corpus_label;
    jr["total_agents"] = r.total_agents;
    nlohmann::ordered_json pct;
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
      pct[std::string(to_string(kAllMetrics[i]))] = r.pct[i];
    }
    jr["critical_pct"] = std::move(pct);
    root["corpora"].push_back(std::move(jr));
  }
  return root.dump(2) + "\n";
}

std::string render_critical_md(const std::vector<CriticalPercentageRow>& rows) {
  std::string out = "| Corpus | Total Agents |";
  for (MetricId m : kHeadlineMetrics) {
    out += ' ';
    out += to_string(m);
    out += " |";
  }
  out += "\n| --- | --- |";
  for (std::size_t i = 0; i < kHeadlineMetrics.size(); ++i) out += " --- |";
  out += "\n";
  for (const CriticalPercentageRow& r : rows) {
    out += "| " + r.corpus_label + " | " + std::to_string(r.total_agents) + " |";
    for (MetricId m : kHeadlineMetrics) {
      out += " " + two_decimals(r.pct[static_cast<std::size_t>(m)]) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_medians(ReportFormat f, const std::vector<CorpusSummaries>& corpora) {
  switch (f) {
    case ReportFormat::Csv: return render_medians_csv(corpora);
    case ReportFormat::Json: return render_medians_json(corpora);
    case ReportFormat::Md: return render_medians_md(corpora);
  }
  return {};
}

std::string render_critical(ReportFormat f, const std::vector<CriticalPercentageRow>& rows) {
  switch (f) {
    case ReportFormat::Csv: return render_critical_csv(rows);
    case ReportFormat::Json: return render_critical_json(rows);
    case ReportFormat::Md: return render_critical_md(rows);
  }
  return {};
}

std::string render_histogram_csv(const DistributionSummary& summary) {
  std::string out = "lo,hi,count\n";
  const double width = (summary.histogram.hi - summary.histogram.lo) / summary.histogram.bins;
  for (int b = 0; b < summary.histogram.bins; ++b) {
    const double lo = summary.histogram.lo + b * width;
    const double hi = b + 1 == summary.histogram.bins ? summary.histogram.hi : lo + width;
    out += format_double(lo) + ',' + format_double(hi) + ',' +
           std::to_string(summary.bin_counts.at(b)) + '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

std::vector<CorpusSummaries> parse_medians_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "corpus,metric,count,median,q1,q3,min,max") {
    throw ParseError("medians.csv", "unexpected header");
  }
  std::vector<CorpusSummaries> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "medians.csv:" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw ParseError(where, "expected 8 fields");
    if (out.empty() || out.back().label != f[0]) out.push_back({f[0], {}});
    DistributionSummary s;
    const auto metric = metric_from_string(f[1]);
    if (!metric) throw ParseError(where, "unknown metric '" + f[1] + "'");
    s.metric = *metric;
    s.histogram = default_histogram_spec(s.metric);
    s.bin_counts.assign(s.histogram.bins, 0);
    s.count = parse_int(f[2], where);
    if (s.count > 0) {
      s.median = parse_double(f[3], where);
      s.q1 = parse_double(f[4], where);
      s.q3 = parse_double(f[5], where);
      s.min = parse_double(f[6], where);
      s.max = parse_double(f[7], where);
    }
    out.back().metrics.push_back(std::move(s));
  }
  return out;
}

std::vector<CriticalPercentageRow> parse_critical_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string expected_header = "corpus,total_agents";
  for (MetricId m : kAllMetrics) {
    expected_header += ',';
    expected_header += to_string(m);
  }
  if (!std::getline(in, line) || line != expected_header) {
    throw ParseError("critical_pct.csv", "unexpected header");
  }
  std::vector<CriticalPercentageRow> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = "critical_pct.csv:" + std::to_string(lineno);
    const auto f = split_csv_line(line);
    if (f.size() != 2 + kAllMetrics.size()) throw ParseError(where, "wrong field count");
    CriticalPercentageRow r;
    r.corpus_label = f[0];
    r.total_agents = parse_int(f[1], where);
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
      r.pct[i] = parse_double(f[2 + i], where);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace driveaudit
