#pragma once

// Reference ingestion adapter for sources that ship per-frame tables
// (one row per agent per frame) instead of canonical scenario files.
// It fills the two fields such tables routinely lack: headings are
// estimated from the direction of travel and speeds from position
// differences. Vendor-specific archive parsers are out of scope; they
// are expected to produce TabularScenario and reuse this conversion.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driveaudit/scenario.hpp"

namespace driveaudit {

struct TabularRow {
  std::string agent_id;
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> heading;  // radians; estimated from motion when absent
  std::optional<double> speed;    // m/s; recomputed from positions when absent
};

struct TabularAgentInfo {
  AgentCategory category = AgentCategory::Vehicle;
  double length = 0.0;
  double width = 0.0;
};

struct TabularScenario {
  ScenarioMeta meta;
  int frame_count = 0;
  // Every agent_id appearing in rows must have an entry here.
  std::map<std::string, TabularAgentInfo> agents;
  std::vector<TabularRow> rows;
};

// Converts a row table into a Scenario satisfying the full invariant
// checklist. Frames without a row are marked invalid (no extrapolation).
// Missing headings are estimated as the direction of displacement over
// the nearest valid frame pair; while displacement stays under 1 cm the
// last known orientation is carried over, defaulting to 0 at track
// start. Missing speeds are filled by forward differences. Agents are
// emitted in sorted agent_id order so the conversion is deterministic.
//
// Throws SchemaError for rows referencing unknown agents or frames
// outside [0, frame_count), and for duplicate (agent, frame) rows;
// InvariantError if the assembled scenario violates an invariant.
Scenario from_tabular(const TabularScenario& input);

}  // namespace driveaudit
