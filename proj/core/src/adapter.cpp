#include "driveaudit/adapter.hpp"

#include <cmath>
#include <string>

#include "driveaudit/errors.hpp"
#include "driveaudit/vec2.hpp"

namespace driveaudit {

namespace {

// Movement below this is treated as standing still for heading purposes.
constexpr double kHeadingMotionThreshold = 0.01;  // meters

// Fills headings the source table did not provide. For each such frame
// the displacement across the nearest valid frame pair (to the next
// valid frame, falling back to the previous one at track end) gives the
// direction of travel; when that displacement stays under 1 cm the last
// known orientation is reused, 0 if the track has had none yet.
void estimate_missing_headings(AgentTrack& track, const std::vector<std::uint8_t>& provided) {
  const std::size_t n = track.states.size();
  std::vector<int> next_valid(n, -1);
  std::vector<int> prev_valid(n, -1);
  int seen = -1;
  for (std::size_t f = 0; f < n; ++f) {
    prev_valid[f] = seen;
    if (track.is_valid(f)) seen = static_cast<int>(f);
  }
  seen = -1;
  for (std::size_t f = n; f-- > 0;) {
    next_valid[f] = seen;
    if (track.is_valid(f)) seen = static_cast<int>(f);
  }

  double last_known = 0.0;
  for (std::size_t f = 0; f < n; ++f) {
    if (!track.is_valid(f)) continue;
    AgentState& st = track.states[f];
    if (provided[f] != 0) {
      last_known = st.heading;
      continue;
    }
    const int partner = next_valid[f] >= 0 ? next_valid[f] : prev_valid[f];
    Vec2 d{0.0, 0.0};
    if (partner >= 0) {
      const Vec2 a = track.states[static_cast<std::size_t>(std::min<int>(f, partner))].position;
      const Vec2 b = track.states[static_cast<std::size_t>(std::max<int>(f, partner))].position;
      d = b - a;
    }
    if (d.norm() >= kHeadingMotionThreshold) {
      last_known = normalize_angle(std::atan2(d.y, d.x));
    }
    st.heading = last_known;
  }
}

}  // namespace

Scenario from_tabular(const TabularScenario& input) {
  if (input.frame_count <= 0) {
    throw SchemaError("frame_count", "must be positive");
  }

  Scenario out;
  out.meta = input.meta;
  out.frame_count = input.frame_count;

  // std::map iteration guarantees sorted, deterministic agent order.
  std::map<std::string, std::size_t> index;
  for (const auto& [agent_id, info] : input.agents) {
    AgentTrack track;
    track.agent_id = agent_id;
    track.category = info.category;
    track.length = info.length;
    track.width = info.width;
    track.states.resize(static_cast<std::size_t>(input.frame_count));
    track.valid.assign(static_cast<std::size_t>(input.frame_count), 0);
    index.emplace(agent_id, out.agents.size());
    out.agents.push_back(std::move(track));
  }

  std::vector<std::vector<std::uint8_t>> heading_provided(
      out.agents.size(), std::vector<std::uint8_t>(static_cast<std::size_t>(input.frame_count), 0));

  for (const TabularRow& row : input.rows) {
    const auto it = index.find(row.agent_id);
    const std::string where = "rows[" + row.agent_id + "," + std::to_string(row.frame) + "]";
    if (it == index.end()) {
      throw SchemaError(where, "agent_id has no entry in the agent table");
    }
    if (row.frame < 0 || row.frame >= input.frame_count) {
      throw SchemaError(where, "frame outside [0, " + std::to_string(input.frame_count) + ")");
    }
    AgentTrack& track = out.agents[it->second];
    const auto f = static_cast<std::size_t>(row.frame);
    if (track.valid[f] != 0) {
      throw SchemaError(where, "duplicate row for this agent and frame");
    }
    track.valid[f] = 1;
    AgentState& st = track.states[f];
    st.position = {row.x, row.y};
    if (row.heading) {
      st.heading = normalize_angle(*row.heading);
      heading_provided[it->second][f] = 1;
    }
    st.speed = row.speed;
  }

  for (std::size_t i = 0; i < out.agents.size(); ++i) {
    estimate_missing_headings(out.agents[i], heading_provided[i]);
  }
  fill_missing_speeds(out);
  validate_scenario(out);
  return out;
}

}  // namespace driveaudit
