#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driveaudit/geometry.hpp"
#include "driveaudit/vec2.hpp"

namespace driveaudit {

// Canonical time grid every standardized scenario is resampled onto.
inline constexpr double kCanonicalFrameRateHz = 10.0;
inline constexpr double kCanonicalWindowSeconds = 11.0;
inline constexpr int kCanonicalFrameCount = 110;
inline constexpr double kDefaultMapCropRadius = 150.0;

enum class AgentCategory { Ego, Vehicle, Bus, Bicycle, Pedestrian, Other };

std::string_view to_string(AgentCategory c);
AgentCategory agent_category_from_string(std::string_view s);  // unknown -> Other

// Ego, passenger vehicles, and buses all drive lanes and carry the
// vehicle-facing metrics; bicycles and pedestrians are their counterparts.
inline bool is_vehicle_category(AgentCategory c) {
  return c == AgentCategory::Ego || c == AgentCategory::Vehicle || c == AgentCategory::Bus;
}

struct ScenarioMeta {
  std::string scenario_id;
  std::string dataset_name;
  std::string city;
  double frame_rate_hz = kCanonicalFrameRateHz;
  std::optional<std::string> time_of_day;
};

struct AgentState {
  Vec2 position{0.0, 0.0};
  double heading = 0.0;
  std::optional<double> speed;  // m/s; recomputed from positions when absent
};

struct AgentTrack {
  std::string agent_id;
  AgentCategory category = AgentCategory::Other;
  double length = 0.0;
  double width = 0.0;
  std::vector<AgentState> states;       // one per frame
  std::vector<std::uint8_t> valid;      // 0/1 mask, same length as states

  bool is_valid(std::size_t frame) const { return frame < valid.size() && valid[frame] != 0; }

  OrientedBox box_at(std::size_t frame) const {
    const AgentState& st = states[frame];
    return {st.position, st.heading, length, width};
  }
};

enum class BoundaryStyle { Solid, Dashed, Other };

std::string_view to_string(BoundaryStyle s);
BoundaryStyle boundary_style_from_string(std::string_view s);  // unknown -> Other

struct BoundaryLine {
  std::string boundary_id;
  BoundaryStyle style = BoundaryStyle::Other;
  std::vector<Vec2> polyline;
};

enum class LaneType { Normal, Bus, Bicycle };

std::string_view to_string(LaneType t);
LaneType lane_type_from_string(std::string_view s);  // unknown -> Normal

struct Lane {
  std::string lane_id;
  LaneType lane_type = LaneType::Normal;
  std::vector<Vec2> centerline;
  std::string left_boundary;   // BoundaryLine id
  std::string right_boundary;  // BoundaryLine id
  std::vector<std::string> predecessors;
  std::vector<std::string> successors;
  std::vector<std::string> neighbors;
};

struct Crosswalk {
  std::string crosswalk_id;
  std::vector<Vec2> polygon;  // simple ring, implicitly closed
};

struct Scenario {
  ScenarioMeta meta;
  int frame_count = 0;
  std::vector<Lane> lanes;
  std::vector<BoundaryLine> boundaries;
  std::vector<Crosswalk> crosswalks;
  std::vector<AgentTrack> agents;

  double dt() const { return 1.0 / meta.frame_rate_hz; }

  const AgentTrack* find_agent(std::string_view agent_id) const;
  const Lane* find_lane(std::string_view lane_id) const;
  const BoundaryLine* find_boundary(std::string_view boundary_id) const;
  const Crosswalk* find_crosswalk(std::string_view crosswalk_id) const;

  // The unique ego agent; throws InvariantError if absent.
  const AgentTrack& ego() const;
};

// Checks every structural invariant (mask lengths, heading range, positive
// extents, referential integrity, simple crosswalk rings, unique ego, ...).
// Throws InvariantError carrying a path to the offending element.
void validate_scenario(const Scenario& s);

// Replaces absent per-frame speeds with forward differences of position
// (last valid frame of a run copies its predecessor); stored speeds are
// kept as-is. Tracks with a single valid frame get speed 0 there.
void fill_missing_speeds(Scenario& s);

}  // namespace driveaudit
