#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driveaudit/geometry.hpp"
#include "driveaudit/scenario.hpp"

namespace driveaudit {

// Order fixed: report columns and sample sort order derive from it.
enum class MetricId {
  VEL,
  ACC,
  GAP,
  TTC,
  PET,
  LADTB,
  LODTB,
  LADTP,
  LODTP,
  DTPNZ,
  VOZ,
  SLC,
};

inline constexpr std::array<MetricId, 12> kAllMetrics = {
  MetricId::VEL,   MetricId::ACC,   MetricId::GAP,   MetricId::TTC,
  MetricId::PET,   MetricId::LADTB, MetricId::LODTB, MetricId::LADTP,
  MetricId::LODTP, MetricId::DTPNZ, MetricId::VOZ,   MetricId::SLC,
};

std::string_view to_string(MetricId m);
std::optional<MetricId> metric_from_string(std::string_view s);

// One metric evaluation. `other` carries the paired agent for pair metrics
// (GAP target, TTC counterpart, PET enterer, DTB/DTP/DTPNZ counterpart) or
// the crosswalk id for VOZ; empty otherwise. Samples with defined == false
// carry no meaningful value and never reach statistics or thresholds.
struct MetricSample {
  MetricId metric = MetricId::VEL;
  std::string subject;
  std::string other;
  int frame = 0;
  double value = 0.0;
  bool defined = false;
};

// Deterministic output order used everywhere samples are dumped.
bool sample_order_less(const MetricSample& a, const MetricSample& b);

struct TtcConfig {
  double grid_step = 0.5;  // s; reported values are multiples of this
  double grid_max = 40.0;  // s; horizon, beyond which TTC is undefined
  double fine_step = 0.01; // s; contact-detection resolution within the grid
};

struct MetricsConfig {
  TtcConfig ttc;
  double corridor_halfwidth = 1.5;     // m, on-path corridor for GAP
  double interaction_radius = 5.0;     // m, gate for the DTB/DTP families
  double zone_radius = 5.0;            // m, pedestrian-near-crosswalk gate for DTPNZ
  double lane_match_max_lateral = 5.0; // m, beyond this no lane matches for SLC
  bool pair_all_vehicles = false;      // GAP/TTC/PET for every vehicle, not only ego
  bool auto_conflict_areas = true;     // derive PET conflict areas from swept paths
  std::vector<MetricId> enabled;       // empty = all metrics
};

// --- per-metric operations --------------------------------------------------

// Speed per frame. Stored per-frame speeds are trusted as-is; absent ones
// come from forward position differences, with the last valid frame of each
// run copying its predecessor. One sample per frame; gaps are undefined.
std::vector<MetricSample> compute_vel(const AgentTrack& track, double dt);

// Signed acceleration: forward difference of consecutive defined speeds.
std::vector<MetricSample> compute_acc(const std::vector<MetricSample>& vel_series, double dt);

// The agent's recorded positions from `from_frame` to its last valid frame,
// with consecutive points closer than 1 cm merged. Throws
// DegeneratePathError when fewer than 2 distinct points remain (callers
// treat such agents as stationary).
PathParam build_reference_path(const AgentTrack& track, int from_frame);

// First future time at which the two agents' predicted boxes overlap, both
// advanced along their own reference paths under constant acceleration
// (speed clamped at zero, travel clamped at path end). Contact is detected
// at cfg.fine_step resolution and reported rounded up onto the grid;
// undefined when no contact happens within cfg.grid_max.
MetricSample compute_ttc(const AgentTrack& ego, const AgentTrack& other, int frame, double dt,
                         const TtcConfig& cfg = {});

// Free distance from the ego's front along its reference path to the
// nearest agent whose outline touches the corridor of the given half-width.
// Undefined when nothing is on the path ahead (or the ego has no path).
MetricSample compute_gap(const AgentTrack& ego, std::span<const AgentTrack> others, int frame,
                         double corridor_halfwidth = 1.5);

// Time from `a` leaving the conflict area to `b` entering it (directional:
// a exits first). Occupancy is box/polygon overlap per frame. Undefined if
// the two occupancy spans overlap or either event is missing. The sample
// sits on a's exit frame. Throws ConflictAreaError on a degenerate ring.
MetricSample compute_pet(const AgentTrack& a, const AgentTrack& b,
                         std::span<const Vec2> conflict_area, double dt);

// Lateral/longitudinal clearance between a vehicle and a bicycle
// (LADTB/LODTB) or pedestrian (LADTP/LODTP), decomposed in the vehicle's
// heading frame from the closest-point pair. Only evaluated within
// interaction_radius; throws CategoryError for other target categories.
// Returns {lateral, longitudinal}.
std::pair<MetricSample, MetricSample> compute_dtx(const AgentTrack& vehicle,
                                                  const AgentTrack& target, int frame,
                                                  double interaction_radius = 5.0);

// Distance to every pedestrian in or near a crosswalk currently under the
// vehicle; one sample per pedestrian per frame.
std::vector<MetricSample> compute_dtpnz(const AgentTrack& vehicle,
                                        std::span<const AgentTrack> pedestrians,
                                        std::span<const Crosswalk> crosswalks, int frame,
                                        double zone_radius = 5.0);

// The vehicle's speed while its box overlaps a crosswalk; `other` names the
// first overlapped crosswalk.
MetricSample compute_voz(const AgentTrack& vehicle, const std::vector<MetricSample>& vel_series,
                         std::span<const Crosswalk> crosswalks, int frame);

// Penetration of the vehicle box past a solid boundary of its matched lane
// (the lane whose centerline passes closest), 0 when merely touching.
// Undefined when no lane matches within max_lateral or the matched lane has
// no solid boundary.
MetricSample compute_slc(const AgentTrack& vehicle, std::span<const Lane> lanes,
                         std::span<const BoundaryLine> boundaries, int frame,
                         double max_lateral = 5.0);

// --- whole-scenario driver --------------------------------------------------

// Evaluates every enabled metric for every applicable agent/pair/frame and
// returns the defined samples in deterministic (metric, subject, other,
// frame) order. Pure function of its inputs.
std::vector<MetricSample> compute_all(const Scenario& s, const MetricsConfig& cfg = {});

}  // namespace driveaudit
