#pragma once

#include <array>
#include <string>
#include <vector>

#include "driveaudit/classify.hpp"
#include "driveaudit/stats.hpp"

namespace driveaudit {

enum class ReportFormat { Csv, Json, Md };

std::string_view to_string(ReportFormat f);  // "csv" / "json" / "md"
std::optional<ReportFormat> report_format_from_string(std::string_view s);

struct CorpusSummaries {
  std::string label;
  std::vector<DistributionSummary> metrics;  // enum order, one per metric
};

// Share of agents flagged per metric, as percentages of total_agents.
struct CriticalPercentageRow {
  std::string corpus_label;
  std::int64_t total_agents = 0;
  std::array<double, kAllMetrics.size()> pct{};
};

// Distinct flagged agents per metric over total_agents; unrounded. Throws
// DomainError when total_agents is 0.
CriticalPercentageRow critical_percentages(const std::vector<CriticalityLabel>& labels,
                                           const std::string& corpus_label,
                                           std::int64_t total_agents);

// Median/quantile tables. CSV and JSON carry full-precision values (empty /
// null where count is 0); the markdown table lists metrics as rows and one
// column per corpus, rounded to 2 decimals.
std::string render_medians_csv(const std::vector<CorpusSummaries>& corpora);
std::string render_medians_json(const std::vector<CorpusSummaries>& corpora);
std::string render_medians_md(const std::vector<CorpusSummaries>& corpora);

// Critical-share tables. CSV and JSON carry all metrics unrounded; the
// markdown table has one row per corpus with the thresholded headline
// metrics (VEL, ACC, TTC, DTPNZ, LADTB, SLC) plus the agent total, rounded
// to 2 decimals.
std::string render_critical_csv(const std::vector<CriticalPercentageRow>& rows);
std::string render_critical_json(const std::vector<CriticalPercentageRow>& rows);
std::string render_critical_md(const std::vector<CriticalPercentageRow>& rows);

std::string render_medians(ReportFormat f, const std::vector<CorpusSummaries>& corpora);
std::string render_critical(ReportFormat f, const std::vector<CriticalPercentageRow>& rows);

// Per-bin rows `lo,hi,count`; bin edges in full precision.
std::string render_histogram_csv(const DistributionSummary& summary);

// Inverses of the CSV renderers, for tooling that re-reads report files.
std::vector<CorpusSummaries> parse_medians_csv(const std::string& text);
std::vector<CriticalPercentageRow> parse_critical_csv(const std::string& text);

}  // namespace driveaudit
