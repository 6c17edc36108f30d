#include "driveaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "driveaudit/errors.hpp"

namespace driveaudit {

HistogramSpec default_histogram_spec(MetricId m) {
  switch (m) {
    case MetricId::VEL: return {0.0, 40.0, 100};
    case MetricId::ACC: return {-20.0, 20.0, 100};
    case MetricId::GAP: return {0.0, 100.0, 100};
    case MetricId::TTC: return {0.0, 40.0, 100};
    case MetricId::PET: return {0.0, 40.0, 100};
    case MetricId::LADTB:
    case MetricId::LODTB:
    case MetricId::LADTP:
    case MetricId::LODTP:
    case MetricId::DTPNZ: return {0.0, 5.0, 100};
    case MetricId::VOZ: return {0.0, 40.0, 100};
    case MetricId::SLC: return {0.0, 3.0, 100};
  }
  return {0.0, 1.0, 100};
}

double quantile_sorted(const std::vector<double>& sorted_values, double p) {
  if (sorted_values.empty()) throw DomainError("quantile", "empty sample set");
  p = std::clamp(p, 0.0, 1.0);
  const double h = (static_cast<double>(sorted_values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

void StatsAccumulator::add(const MetricSample& sample) {
  if (!sample.defined) return;
  values_[static_cast<std::size_t>(sample.metric)].push_back(sample.value);
}

void StatsAccumulator::add_all(const std::vector<MetricSample>& samples) {
  for (const MetricSample& s : samples) add(s);
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i].insert(values_[i].end(), other.values_[i].begin(), other.values_[i].end());
  }
}

std::int64_t StatsAccumulator::total_count() const {
  std::int64_t n = 0;
  for (const auto& v : values_) n += static_cast<std::int64_t>(v.size());
  return n;
}

std::vector<DistributionSummary> StatsAccumulator::summarize() const {
  std::vector<DistributionSummary> out;
  out.reserve(kAllMetrics.size());
  for (MetricId m : kAllMetrics) {
    DistributionSummary s;
    s.metric = m;
    s.histogram = default_histogram_spec(m);
    s.bin_counts.assign(s.histogram.bins, 0);

    std::vector<double> vals = values_[static_cast<std::size_t>(m)];
    s.count = static_cast<std::int64_t>(vals.size());
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      s.min = vals.front();
      s.max = vals.back();
      s.median = quantile_sorted(vals, 0.5);
      s.q1 = quantile_sorted(vals, 0.25);
      s.q3 = quantile_sorted(vals, 0.75);

      const double width = (s.histogram.hi - s.histogram.lo) / s.histogram.bins;
      for (double v : vals) {
        int bin = static_cast<int>(std::floor((v - s.histogram.lo) / width));
        bin = std::clamp(bin, 0, s.histogram.bins - 1);  // out-of-range joins edge bins
        ++s.bin_counts[bin];
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string_view to_string(StatsMode m) {
  return m == StatsMode::PerFrame ? "per-frame" : "per-agent";
}

std::optional<StatsMode> stats_mode_from_string(std::string_view s) {
  if (s == "per-frame") return StatsMode::PerFrame;
  if (s == "per-agent") return StatsMode::PerAgent;
  return std::nullopt;
}

namespace {

enum class Reduction { Min, Max, MaxMagnitude };

Reduction reduction_for(MetricId m) {
  switch (m) {
    case MetricId::VEL:
    case MetricId::VOZ:
    case MetricId::SLC: return Reduction::Max;
    case MetricId::ACC: return Reduction::MaxMagnitude;
    default: return Reduction::Min;  // clearances and times: closest call counts
  }
}

bool replaces(Reduction r, double candidate, double incumbent) {
  switch (r) {
    case Reduction::Min: return candidate < incumbent;
    case Reduction::Max: return candidate > incumbent;
    case Reduction::MaxMagnitude: return std::abs(candidate) > std::abs(incumbent);
  }
  return false;
}

}  // namespace

std::vector<MetricSample> reduce_per_agent(const std::vector<MetricSample>& samples) {
  std::map<std::pair<MetricId, std::string>, MetricSample> best;
  for (const MetricSample& s : samples) {
    if (!s.defined) continue;
    const auto key = std::make_pair(s.metric, s.subject);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(key, s);
    } else if (replaces(reduction_for(s.metric), s.value, it->second.value)) {
      it->second = s;
    }
  }
  std::vector<MetricSample> out;
  out.reserve(best.size());
  for (auto& [key, sample] : best) out.push_back(std::move(sample));
  std::sort(out.begin(), out.end(), sample_order_less);
  return out;
}

}  // namespace driveaudit
