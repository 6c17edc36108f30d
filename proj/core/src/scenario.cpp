#include "driveaudit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "driveaudit/errors.hpp"

namespace driveaudit {

std::string_view to_string(AgentCategory c) {
  switch (c) {
    case AgentCategory::Ego: return "ego";
    case AgentCategory::Vehicle: return "vehicle";
    case AgentCategory::Bus: return "bus";
    case AgentCategory::Bicycle: return "bicycle";
    case AgentCategory::Pedestrian: return "pedestrian";
    case AgentCategory::Other: return "other";
  }
  return "other";
}

AgentCategory agent_category_from_string(std::string_view s) {
  if (s == "ego") return AgentCategory::Ego;
  if (s == "vehicle") return AgentCategory::Vehicle;
  if (s == "bus") return AgentCategory::Bus;
  if (s == "bicycle") return AgentCategory::Bicycle;
  if (s == "pedestrian") return AgentCategory::Pedestrian;
  return AgentCategory::Other;
}

std::string_view to_string(BoundaryStyle s) {
  switch (s) {
    case BoundaryStyle::Solid: return "solid";
    case BoundaryStyle::Dashed: return "dashed";
    case BoundaryStyle::Other: return "other";
  }
  return "other";
}

BoundaryStyle boundary_style_from_string(std::string_view s) {
  if (s == "solid") return BoundaryStyle::Solid;
  if (s == "dashed") return BoundaryStyle::Dashed;
  return BoundaryStyle::Other;
}

std::string_view to_string(LaneType t) {
  switch (t) {
    case LaneType::Normal: return "normal";
    case LaneType::Bus: return "bus";
    case LaneType::Bicycle: return "bicycle";
  }
  return "normal";
}

LaneType lane_type_from_string(std::string_view s) {
  if (s == "bus") return LaneType::Bus;
  if (s == "bicycle") return LaneType::Bicycle;
  return LaneType::Normal;
}

const AgentTrack* Scenario::find_agent(std::string_view agent_id) const {
  for (const AgentTrack& a : agents) {
    if (a.agent_id == agent_id) return &a;
  }
  return nullptr;
}

const Lane* Scenario::find_lane(std::string_view lane_id) const {
  for (const Lane& l : lanes) {
    if (l.lane_id == lane_id) return &l;
  }
  return nullptr;
}

const BoundaryLine* Scenario::find_boundary(std::string_view boundary_id) const {
  for (const BoundaryLine& b : boundaries) {
    if (b.boundary_id == boundary_id) return &b;
  }
  return nullptr;
}

const Crosswalk* Scenario::find_crosswalk(std::string_view crosswalk_id) const {
  for (const Crosswalk& c : crosswalks) {
    if (c.crosswalk_id == crosswalk_id) return &c;
  }
  return nullptr;
}

const AgentTrack& Scenario::ego() const {
  for (const AgentTrack& a : agents) {
    if (a.category == AgentCategory::Ego) return a;
  }
  throw InvariantError("agents", "scenario has no ego agent");
}

namespace {

constexpr double kMinVertexSeparation = 1e-3;  // 1 mm

void check_polyline(const std::vector<Vec2>& pts, const std::string& where) {
  if (pts.size() < 2) {
    throw InvariantError(where, "polyline needs at least 2 points");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y)) {
      throw InvariantError(where + "[" + std::to_string(i) + "]", "non-finite coordinate");
    }
    if (i > 0 && (pts[i] - pts[i - 1]).norm() <= kMinVertexSeparation) {
      throw InvariantError(where + "[" + std::to_string(i) + "]",
                           "consecutive points closer than 1 mm");
    }
  }
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (s.meta.scenario_id.empty()) {
    throw InvariantError("meta.scenario_id", "must be non-empty");
  }
  if (!(s.meta.frame_rate_hz > 0.0)) {
    throw InvariantError("meta.frame_rate_hz", "must be positive");
  }
  if (s.frame_count <= 0) {
    throw InvariantError("frame_count", "must be positive");
  }

  std::set<std::string> boundary_ids;
  for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
    const BoundaryLine& b = s.boundaries[i];
    const std::string where = "map.boundaries[" + std::to_string(i) + "]";
    if (b.boundary_id.empty()) throw InvariantError(where + ".boundary_id", "must be non-empty");
    if (!boundary_ids.insert(b.boundary_id).second) {
      throw InvariantError(where + ".boundary_id", "duplicate id '" + b.boundary_id + "'");
    }
    check_polyline(b.polyline, where + ".polyline");
  }

  std::set<std::string> lane_ids;
  for (const Lane& l : s.lanes) lane_ids.insert(l.lane_id);
  for (std::size_t i = 0; i < s.lanes.size(); ++i) {
    const Lane& l = s.lanes[i];
    const std::string where = "map.lanes[" + std::to_string(i) + "]";
    if (l.lane_id.empty()) throw InvariantError(where + ".lane_id", "must be non-empty");
    check_polyline(l.centerline, where + ".centerline");
    using BoundaryRef = std::pair<const std::string*, const char*>;
    for (const auto& [ref, name] : {BoundaryRef{&l.left_boundary, "left_boundary"},
                                    BoundaryRef{&l.right_boundary, "right_boundary"}}) {
      if (!ref->empty() && !boundary_ids.count(*ref)) {
        throw InvariantError(where + "." + name,
                             "lane '" + l.lane_id + "' references undefined boundary '" + *ref + "'");
      }
    }
    using LaneRefList = std::pair<const std::vector<std::string>*, const char*>;
    for (const auto& [list, name] : {LaneRefList{&l.predecessors, "predecessors"},
                                     LaneRefList{&l.successors, "successors"},
                                     LaneRefList{&l.neighbors, "neighbors"}}) {
      for (const std::string& ref : *list) {
        if (!lane_ids.count(ref)) {
          throw InvariantError(where + "." + name,
                               "lane '" + l.lane_id + "' references undefined lane '" + ref + "'");
        }
      }
    }
  }

  std::set<std::string> crosswalk_ids;
  for (std::size_t i = 0; i < s.crosswalks.size(); ++i) {
    const Crosswalk& c = s.crosswalks[i];
    const std::string where = "map.crosswalks[" + std::to_string(i) + "]";
    if (c.crosswalk_id.empty()) throw InvariantError(where + ".crosswalk_id", "must be non-empty");
    if (!crosswalk_ids.insert(c.crosswalk_id).second) {
      throw InvariantError(where + ".crosswalk_id", "duplicate id '" + c.crosswalk_id + "'");
    }
    if (c.polygon.size() < 3 || !polygon_is_simple(c.polygon)) {
      throw InvariantError(where + ".polygon", "ring must be simple with at least 3 points");
    }
    if (std::abs(polygon_signed_area(c.polygon)) <= 0.0) {
      throw InvariantError(where + ".polygon", "ring must enclose positive area");
    }
  }

  std::set<std::string> agent_ids;
  int ego_count = 0;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentTrack& a = s.agents[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (a.agent_id.empty()) throw InvariantError(where + ".agent_id", "must be non-empty");
    if (!agent_ids.insert(a.agent_id).second) {
      throw InvariantError(where + ".agent_id", "duplicate id '" + a.agent_id + "'");
    }
    if (a.category == AgentCategory::Ego) ++ego_count;
    const bool point_ok = a.category == AgentCategory::Pedestrian && a.length == 0.0 && a.width == 0.0;
    if (!point_ok && !(a.length > 0.0 && a.width > 0.0)) {
      throw InvariantError(where, "agent '" + a.agent_id +
                                    "' needs positive extent (only pedestrians may be points)");
    }
    if (a.states.size() != static_cast<std::size_t>(s.frame_count)) {
      throw InvariantError(where + ".states", "length " + std::to_string(a.states.size()) +
                                                " != frame_count " + std::to_string(s.frame_count));
    }
    if (a.valid.size() != a.states.size()) {
      throw InvariantError(where + ".valid", "mask length != states length");
    }
    for (std::size_t f = 0; f < a.states.size(); ++f) {
      if (!a.valid[f]) continue;
      const AgentState& st = a.states[f];
      const std::string sw = where + ".states[" + std::to_string(f) + "]";
      if (!std::isfinite(st.position.x) || !std::isfinite(st.position.y)) {
        throw InvariantError(sw, "non-finite position on valid frame");
      }
      if (!(st.heading >= -kPi && st.heading < kPi)) {
        throw InvariantError(sw, "heading " + std::to_string(st.heading) + " outside [-pi, pi)");
      }
      if (st.speed && (!std::isfinite(*st.speed) || *st.speed < 0.0)) {
        throw InvariantError(sw, "speed must be finite and nonnegative");
      }
    }
  }
  if (ego_count != 1) {
    throw InvariantError("agents", "expected exactly 1 ego agent, found " + std::to_string(ego_count));
  }
}

void fill_missing_speeds(Scenario& s) {
  const double dt = s.dt();
  for (AgentTrack& a : s.agents) {
    const std::size_t n = a.states.size();
    for (std::size_t f = 0; f < n; ++f) {
      if (!a.is_valid(f) || a.states[f].speed) continue;
      if (f + 1 < n && a.is_valid(f + 1)) {
        a.states[f].speed = (a.states[f + 1].position - a.states[f].position).norm() / dt;
      } else if (f > 0 && a.is_valid(f - 1) && a.states[f - 1].speed) {
        a.states[f].speed = a.states[f - 1].speed;  // run end copies predecessor
      } else {
        a.states[f].speed = 0.0;  // isolated valid frame
      }
    }
  }
}

}  // namespace driveaudit
