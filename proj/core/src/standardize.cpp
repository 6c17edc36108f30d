#include "driveaudit/standardize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "driveaudit/errors.hpp"

namespace driveaudit {

namespace {

constexpr double kGridSnap = 1e-9;  // input-frame units

int count_valid(const AgentTrack& a) {
  int n = 0;
  for (std::uint8_t v : a.valid) n += v != 0;
  return n;
}

AgentState interpolate_states(const AgentState& s0, const AgentState& s1, double t) {
  AgentState out;
  out.position = s0.position + (s1.position - s0.position) * t;
  out.heading = normalize_angle(s0.heading + t * normalize_angle(s1.heading - s0.heading));
  if (s0.speed && s1.speed) {
    out.speed = *s0.speed + t * (*s1.speed - *s0.speed);
  }
  return out;
}

}  // namespace

Scenario resample_scenario(const Scenario& s, double target_hz, double window_s) {
  if (!(target_hz > 0.0)) throw ParameterError("target_hz", "must be positive");
  if (!(window_s > 0.0)) throw ParameterError("window_s", "must be positive");

  Scenario out;
  out.meta = s.meta;
  out.meta.frame_rate_hz = target_hz;
  out.frame_count = static_cast<int>(std::lround(window_s * target_hz));
  out.lanes = s.lanes;
  out.boundaries = s.boundaries;
  out.crosswalks = s.crosswalks;

  const double step = s.meta.frame_rate_hz / target_hz;  // input frames per output frame

  for (const AgentTrack& a : s.agents) {
    if (count_valid(a) < 2) continue;

    AgentTrack r;
    r.agent_id = a.agent_id;
    r.category = a.category;
    r.length = a.length;
    r.width = a.width;
    r.states.resize(out.frame_count);
    r.valid.assign(out.frame_count, 0);

    for (int k = 0; k < out.frame_count; ++k) {
      const double u = k * step;  // position on the input frame axis
      const double nearest = std::round(u);
      if (std::abs(u - nearest) <= kGridSnap) {
        const auto idx = static_cast<std::size_t>(nearest);
        if (idx < a.states.size() && a.is_valid(idx)) {
          r.states[k] = a.states[idx];
          r.valid[k] = 1;
        }
        continue;
      }
      const auto lo = static_cast<std::size_t>(std::floor(u));
      const std::size_t hi = lo + 1;
      if (hi < a.states.size() && a.is_valid(lo) && a.is_valid(hi)) {
        r.states[k] = interpolate_states(a.states[lo], a.states[hi], u - lo);
        r.valid[k] = 1;
      }
    }
    out.agents.push_back(std::move(r));
  }

  if (out.agents.empty()) {
    throw EmptyScenarioError("agents", "no agent has 2 valid frames to resample");
  }
  if (std::none_of(out.agents.begin(), out.agents.end(),
                   [](const AgentTrack& a) { return a.category == AgentCategory::Ego; })) {
    throw EmptyScenarioError("agents", "ego track too short to resample");
  }
  fill_missing_speeds(out);
  return out;
}

namespace {

double point_to_polyline(const std::vector<Vec2>& pts, Vec2 q) {
  if (pts.size() == 1) return (q - pts[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(q, pts[i], pts[i + 1]));
  }
  return best;
}

bool polyline_within(const std::vector<Vec2>& pts, const std::vector<Vec2>& probes, double radius) {
  for (const Vec2& q : probes) {
    if (point_to_polyline(pts, q) <= radius) return true;
  }
  return false;
}

bool ring_within(const std::vector<Vec2>& ring, const std::vector<Vec2>& probes, double radius) {
  const std::size_t n = ring.size();
  for (const Vec2& q : probes) {
    if (polygon_contains(ring, q)) return true;
    for (std::size_t i = 0; i < n; ++i) {
      if (point_segment_distance(q, ring[i], ring[(i + 1) % n]) <= radius) return true;
    }
  }
  return false;
}

}  // namespace

Scenario crop_map(const Scenario& s, double radius_m) {
  if (!(radius_m > 0.0)) throw ParameterError("radius_m", "must be positive");

  std::vector<Vec2> probes;
  for (const AgentTrack& a : s.agents) {
    for (std::size_t f = 0; f < a.states.size(); ++f) {
      if (a.is_valid(f)) probes.push_back(a.states[f].position);
    }
  }

  Scenario out;
  out.meta = s.meta;
  out.frame_count = s.frame_count;
  out.agents = s.agents;

  std::set<std::string> kept_lanes;
  std::set<std::string> needed_boundaries;
  for (const Lane& l : s.lanes) {
    if (!polyline_within(l.centerline, probes, radius_m)) continue;
    kept_lanes.insert(l.lane_id);
    if (!l.left_boundary.empty()) needed_boundaries.insert(l.left_boundary);
    if (!l.right_boundary.empty()) needed_boundaries.insert(l.right_boundary);
  }

  for (const Lane& l : s.lanes) {
    if (!kept_lanes.count(l.lane_id)) continue;
    Lane kept = l;
    const auto prune = [&](std::vector<std::string>& refs) {
      std::erase_if(refs, [&](const std::string& id) { return !kept_lanes.count(id); });
    };
    prune(kept.predecessors);
    prune(kept.successors);
    prune(kept.neighbors);
    out.lanes.push_back(std::move(kept));
  }

  for (const BoundaryLine& b : s.boundaries) {
    if (needed_boundaries.count(b.boundary_id) || polyline_within(b.polyline, probes, radius_m)) {
      out.boundaries.push_back(b);
    }
  }

  for (const Crosswalk& c : s.crosswalks) {
    if (ring_within(c.polygon, probes, radius_m)) out.crosswalks.push_back(c);
  }
  return out;
}

}  // namespace driveaudit
