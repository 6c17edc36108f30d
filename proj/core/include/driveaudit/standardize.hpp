#pragma once

#include "driveaudit/scenario.hpp"

namespace driveaudit {

// Resamples every track onto a uniform grid of round(window_s * target_hz)
// frames starting at the scenario's first frame. Positions interpolate
// linearly, headings along the shortest arc, speeds linearly; grid times
// landing exactly on an input frame copy its state bit-for-bit (which makes
// resampling at the native rate the identity). Frames outside an agent's
// observed span, or bracketing an invalid input frame, come out invalid —
// never extrapolated. Agents with fewer than 2 valid input frames are
// dropped. Throws EmptyScenarioError when nothing (or no ego) survives.
Scenario resample_scenario(const Scenario& s, double target_hz, double window_s);

// Drops every lane/boundary/crosswalk farther than radius_m (inclusive)
// from all valid agent positions. Boundaries referenced by surviving lanes
// are kept regardless; lane-graph references to dropped lanes are pruned.
// Agents are untouched.
Scenario crop_map(const Scenario& s, double radius_m);

}  // namespace driveaudit
