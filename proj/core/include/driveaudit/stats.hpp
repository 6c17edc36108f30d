#pragma once

#include <cstdint>
#include <vector>

#include "driveaudit/metrics.hpp"

namespace driveaudit {

struct HistogramSpec {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 100;
};

// Fixed per-metric ranges so histograms stay comparable across corpora.
// Values outside the range land in the edge bins.
HistogramSpec default_histogram_spec(MetricId m);

struct DistributionSummary {
  MetricId metric = MetricId::VEL;
  std::int64_t count = 0;
  // Quantiles by linear interpolation between closest ranks; meaningful
  // only when count > 0.
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  HistogramSpec histogram;
  std::vector<std::int64_t> bin_counts;  // sums to count
};

// Quantile of a sorted sequence with linear interpolation between the two
// closest ranks (h = (n-1)p). Throws DomainError on an empty input.
double quantile_sorted(const std::vector<double>& sorted_values, double p);

// Collects defined sample values per metric. Accumulators merge
// associatively, so corpus-wide statistics can be assembled from per-worker
// partials in any grouping (values concatenate in merge order).
class StatsAccumulator {
public:
  void add(const MetricSample& sample);
  void add_all(const std::vector<MetricSample>& samples);
  void merge(const StatsAccumulator& other);

  std::int64_t total_count() const;

  // One summary per metric, enum order, histogram over the default ranges.
  std::vector<DistributionSummary> summarize() const;

private:
  std::array<std::vector<double>, kAllMetrics.size()> values_;
};

enum class StatsMode { PerFrame, PerAgent };

std::string_view to_string(StatsMode m);  // "per-frame" / "per-agent"
std::optional<StatsMode> stats_mode_from_string(std::string_view s);

// Collapses each (metric, subject) series to one representative sample:
// the safety-relevant extreme (min for clearances/times, max for speeds,
// largest magnitude for acceleration). Used by the per-agent statistics
// mode; input order does not matter, output is deterministic.
std::vector<MetricSample> reduce_per_agent(const std::vector<MetricSample>& samples);

}  // namespace driveaudit
