#include "driveaudit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"
#include "driveaudit/scenario_io.hpp"

namespace driveaudit {

namespace {

constexpr double kDt = 1.0 / kCanonicalFrameRateHz;
constexpr int kFrames = kCanonicalFrameCount;

constexpr double kCarLength = 4.5;
constexpr double kCarWidth = 2.0;
constexpr double kBikeLength = 1.8;
constexpr double kBikeWidth = 0.6;

// Frame-boundary events (square entry/exit, span overlap) are anchored a
// safe margin away from their geometric thresholds so float rounding can
// never flip which frame an event lands on.
constexpr double kEventMargin = 0.3;  // m

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ParameterError(field, message);
}

void require_range(double v, double lo, double hi, const std::string& field) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << "value " << v << " outside [" << lo << ", " << hi << "]";
    throw ParameterError(field, os.str());
  }
}

AgentTrack straight_track(std::string id, AgentCategory cat, double length, double width,
                          Vec2 start, double heading, double v0, double accel) {
  AgentTrack t;
  t.agent_id = std::move(id);
  t.category = cat;
  t.length = length;
  t.width = width;
  t.states.resize(kFrames);
  t.valid.assign(kFrames, 1);
  const Vec2 dir = unit_from_angle(heading);
  for (int f = 0; f < kFrames; ++f) {
    const double tt = f * kDt;
    const double travelled = v0 * tt + 0.5 * accel * tt * tt;
    t.states[f].position = start + dir * travelled;
    t.states[f].heading = heading;
    t.states[f].speed = v0 + accel * tt;
  }
  return t;
}

AgentTrack parked_vehicle(std::string id, Vec2 pos) {
  return straight_track(std::move(id), AgentCategory::Vehicle, kCarLength, kCarWidth, pos, 0.0,
                        0.0, 0.0);
}

// Parked vehicles behind the ego's starting point, alternating road sides,
// far enough out (12 m laterally, 16 m apart) to stay clear of corridors,
// interaction radii, and swept paths of the staged agents.
void add_background(Scenario& s, int n, Vec2 ego_start) {
  for (int k = 0; k < n; ++k) {
    const double x = ego_start.x - 15.0 - 16.0 * (k / 2);
    const double y = ego_start.y + ((k % 2 == 0) ? 12.0 : -12.0);
    s.agents.push_back(parked_vehicle("veh-bg-" + std::to_string(k), {x, y}));
  }
}

// One straight lane along +x with boundaries half_width either side of the
// centerline at y_center.
void add_straight_road(Scenario& s, double x0, double x1, double y_center, double half_width,
                       BoundaryStyle left_style, BoundaryStyle right_style,
                       const std::string& suffix) {
  BoundaryLine left;
  left.boundary_id = "b-left" + suffix;
  left.style = left_style;
  left.polyline = {{x0, y_center + half_width}, {x1, y_center + half_width}};
  BoundaryLine right;
  right.boundary_id = "b-right" + suffix;
  right.style = right_style;
  right.polyline = {{x0, y_center - half_width}, {x1, y_center - half_width}};
  Lane lane;
  lane.lane_id = "lane" + suffix;
  lane.lane_type = LaneType::Normal;
  lane.centerline = {{x0, y_center}, {x1, y_center}};
  lane.left_boundary = left.boundary_id;
  lane.right_boundary = right.boundary_id;
  s.boundaries.push_back(std::move(left));
  s.boundaries.push_back(std::move(right));
  s.lanes.push_back(std::move(lane));
}

Scenario base_scenario(const SynthCase& c) {
  Scenario s;
  s.meta.scenario_id = c.scenario_id;
  s.meta.dataset_name = "synthetic";
  s.meta.city = std::string(to_string(c.kind));
  s.meta.frame_rate_hz = kCanonicalFrameRateHz;
  s.frame_count = kFrames;
  return s;
}

Expectation expect_value(MetricId m, std::string subject, int lo, int hi, double value,
                         double tolerance) {
  Expectation e;
  e.metric = m;
  e.subject = std::move(subject);
  e.frame_lo = lo;
  e.frame_hi = hi;
  e.value = value;
  e.tolerance = tolerance;
  return e;
}

Expectation expect_absent(MetricId m, std::string subject, int lo = 0, int hi = kFrames - 1) {
  Expectation e;
  e.metric = m;
  e.subject = std::move(subject);
  e.frame_lo = lo;
  e.frame_hi = hi;
  return e;
}

void expect_kinematics(std::vector<Expectation>& out, const std::string& agent, double v0,
                       double accel) {
  out.push_back(expect_value(MetricId::VEL, agent, 0, 0, v0, 1e-6));
  out.push_back(expect_value(MetricId::ACC, agent, 0, kFrames - 2, accel, 1e-6));
}

void expect_no_map_metrics(std::vector<Expectation>& out, const std::string& agent) {
  out.push_back(expect_absent(MetricId::DTPNZ, agent));
  out.push_back(expect_absent(MetricId::VOZ, agent));
}

// --- car_following ----------------------------------------------------------

SynthResult make_car_following(const SynthCase& c) {
  require_range(c.ego_speed, 0.5, 40.0, "ego_speed");
  require_range(c.lead_speed, 0.0, 40.0, "lead_speed");
  require_range(c.ego_accel, 0.0, 4.0, "ego_accel");
  require_range(c.initial_gap, 2.0, 100.0, "initial_gap");
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  Scenario s = base_scenario(c);
  add_straight_road(s, -140.0, c.ego_speed * 11.0 + c.initial_gap + 40.0, 0.0, 2.0,
                    BoundaryStyle::Dashed, BoundaryStyle::Dashed, "-1");
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth, {0.0, 0.0},
                                    0.0, c.ego_speed, c.ego_accel));
  s.agents.push_back(straight_track("veh-lead", AgentCategory::Vehicle, kCarLength, kCarWidth,
                                    {c.initial_gap + kCarLength, 0.0}, 0.0, c.lead_speed, 0.0));
  add_background(s, c.background_agents, {0.0, 0.0});

  std::vector<Expectation> ex;
  expect_kinematics(ex, "ego", c.ego_speed, c.ego_accel);
  expect_kinematics(ex, "veh-lead", c.lead_speed, 0.0);
  ex.push_back(expect_absent(MetricId::PET, "ego"));
  ex.push_back(expect_absent(MetricId::PET, "veh-lead"));
  ex.push_back(expect_absent(MetricId::SLC, "ego"));
  expect_no_map_metrics(ex, "ego");

  const bool noisy = c.noise_sigma > 0.0;
  const double rel_speed = c.ego_speed - c.lead_speed;

  // Contact at the positive root of gap = rel_speed*t + accel*t^2/2; the
  // grid value rounds that up to the next 0.5 s. Only claimed when the
  // contact time sits comfortably inside a grid cell and inside the
  // recorded window, so frame rounding cannot move the answer.
  double contact = -1.0;
  if (c.ego_accel > 0.0) {
    contact =
        (-rel_speed + std::sqrt(rel_speed * rel_speed + 2.0 * c.ego_accel * c.initial_gap)) /
        c.ego_accel;
  } else if (rel_speed > 0.0) {
    contact = c.initial_gap / rel_speed;
  }
  if (!noisy) {
    if (contact < 0.0) {
      ex.push_back(expect_absent(MetricId::TTC, "ego", 0, 0));
    } else if (contact >= 0.05 && contact <= 10.0) {
      const double frac = contact - std::floor(contact / 0.5) * 0.5;
      if (frac >= 0.02 && frac <= 0.48) {
        ex.push_back(
            expect_value(MetricId::TTC, "ego", 0, 0, std::ceil(contact / 0.5) * 0.5, 0.0));
      }
    }
    // The lead's rear is the nearest on-path outline ahead of the ego.
    if (kCarLength / 2.0 + c.initial_gap <
        c.ego_speed * 10.9 + 0.5 * c.ego_accel * 10.9 * 10.9 - 0.5) {
      ex.push_back(expect_value(MetricId::GAP, "ego", 0, 0, c.initial_gap, 0.002));
    }
  }
  return {std::move(s), std::move(ex)};
}

// --- crossing_paths ---------------------------------------------------------

SynthResult make_crossing_paths(const SynthCase& c) {
  require_range(c.ego_speed, 4.0, 20.0, "ego_speed");
  require_range(c.cross_speed, 3.0, 20.0, "cross_speed");
  require(c.exit_frame >= 10 && c.exit_frame <= 80, "exit_frame", "must be in [10, 80]");
  require(c.entry_frame >= c.exit_frame + 5 && c.entry_frame <= 100, "entry_frame",
          "must be in [exit_frame + 5, 100]");
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  // The two swept corridors overlap in the square [xc-1, xc+1] x [-1, 1].
  // Either agent occupies it exactly while its center is within 3.25 m of
  // the crossing point, so start positions are chosen to put the ego's last
  // such frame at exit_frame and the crossing vehicle's first at
  // entry_frame, each with half a frame of slack.
  const double xc = 40.0;
  const double ego_x0 = xc + 3.25 - c.ego_speed * kDt * (c.exit_frame + 0.5);
  const double cross_y0 = -3.25 - c.cross_speed * kDt * (c.entry_frame - 0.5);

  Scenario s = base_scenario(c);
  add_straight_road(s, ego_x0 - 160.0, ego_x0 + c.ego_speed * 11.0 + 20.0, 0.0, 2.0,
                    BoundaryStyle::Dashed, BoundaryStyle::Dashed, "-1");
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth,
                                    {ego_x0, 0.0}, 0.0, c.ego_speed, 0.0));
  s.agents.push_back(straight_track("veh-cross", AgentCategory::Vehicle, kCarLength, kCarWidth,
                                    {xc, cross_y0}, kPi / 2.0, c.cross_speed, 0.0));
  add_background(s, c.background_agents, {ego_x0, 0.0});

  std::vector<Expectation> ex;
  expect_kinematics(ex, "ego", c.ego_speed, 0.0);
  expect_kinematics(ex, "veh-cross", c.cross_speed, 0.0);
  const bool noisy = c.noise_sigma > 0.0;
  if (!noisy) {
    const double pet = (c.entry_frame - c.exit_frame) * kDt;
    ex.push_back(
        expect_value(MetricId::PET, "ego", c.exit_frame, c.exit_frame, pet, 1e-9));
    ex.push_back(expect_absent(MetricId::PET, "veh-cross"));
    ex.push_back(expect_absent(MetricId::TTC, "ego"));
    ex.push_back(expect_absent(MetricId::GAP, "ego"));
  }
  ex.push_back(expect_absent(MetricId::SLC, "ego"));
  expect_no_map_metrics(ex, "ego");
  return {std::move(s), std::move(ex)};
}

// --- cyclist_overtake -------------------------------------------------------

SynthResult make_cyclist_overtake(const SynthCase& c) {
  require_range(c.ego_speed, 6.0, 20.0, "ego_speed");
  require_range(c.target_speed, 0.5, 8.0, "target_speed");
  require(c.ego_speed - c.target_speed >= 3.0, "target_speed",
          "must be at least 3 m/s slower than ego_speed");
  require_range(c.lateral_clearance, 0.3, 4.0, "lateral_clearance");
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  // Ego center to cyclist center; subtracting the half widths leaves the
  // edge-to-edge clearance.
  const double lateral = c.lateral_clearance + (kCarWidth + kBikeWidth) / 2.0;
  const double rel_speed = c.ego_speed - c.target_speed;
  // The ego draws level (centers aligned up to a quarter frame) at frame 55.
  const double bike_x0 = rel_speed * kDt * 55.25;

  Scenario s = base_scenario(c);
  add_straight_road(s, -140.0, c.ego_speed * 11.0 + 20.0, 0.0, 2.5, BoundaryStyle::Dashed,
                    BoundaryStyle::Dashed, "-1");
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth, {0.0, 0.0},
                                    0.0, c.ego_speed, 0.0));
  s.agents.push_back(straight_track("bike-1", AgentCategory::Bicycle, kBikeLength, kBikeWidth,
                                    {bike_x0, lateral}, 0.0, c.target_speed, 0.0));
  add_background(s, c.background_agents, {0.0, 0.0});

  // Frames where the two x-spans overlap by at least the event margin; the
  // closest-point pair is then purely lateral, so LADTB is the clearance
  // and LODTB is zero.
  const double span = (kCarLength + kBikeLength) / 2.0 - kEventMargin;
  int lo = kFrames, hi = -1;
  for (int f = 0; f < kFrames; ++f) {
    const double dx = bike_x0 - rel_speed * kDt * f;
    if (std::abs(dx) <= span) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  require(lo <= hi, "ego_speed", "overtake never reaches the side-by-side phase");

  std::vector<Expectation> ex;
  expect_kinematics(ex, "ego", c.ego_speed, 0.0);
  expect_kinematics(ex, "bike-1", c.target_speed, 0.0);
  const double tol = std::max(0.002, 10.0 * c.noise_sigma);
  ex.push_back(expect_value(MetricId::LADTB, "ego", lo, hi, c.lateral_clearance, tol));
  ex.push_back(expect_value(MetricId::LODTB, "ego", lo, hi, 0.0, tol));
  if (c.noise_sigma == 0.0) ex.push_back(expect_absent(MetricId::TTC, "ego"));
  if (c.lateral_clearance >= 0.7 + 10.0 * c.noise_sigma) {
    ex.push_back(expect_absent(MetricId::GAP, "ego"));
  }
  ex.push_back(expect_absent(MetricId::PET, "ego"));
  ex.push_back(expect_absent(MetricId::SLC, "ego"));
  expect_no_map_metrics(ex, "ego");
  return {std::move(s), std::move(ex)};
}

// --- crosswalk_approach -----------------------------------------------------

SynthResult make_crosswalk_approach(const SynthCase& c) {
  require_range(c.ego_speed, 2.0, 12.0, "ego_speed");
  require_range(c.lateral_clearance, 0.3, 3.5, "lateral_clearance");
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  const double xc = 40.0;  // crosswalk center
  const double ego_x0 = xc - c.ego_speed * kDt * 55.25;
  const double ped_y = kCarWidth / 2.0 + c.lateral_clearance;

  Scenario s = base_scenario(c);
  add_straight_road(s, ego_x0 - 150.0, ego_x0 + c.ego_speed * 11.0 + 20.0, 0.0, 2.0,
                    BoundaryStyle::Dashed, BoundaryStyle::Dashed, "-1");
  Crosswalk cw;
  cw.crosswalk_id = "cw-1";
  cw.polygon = {{xc - 2.0, -4.0}, {xc + 2.0, -4.0}, {xc + 2.0, 4.0}, {xc - 2.0, 4.0}};
  s.crosswalks.push_back(std::move(cw));
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth,
                                    {ego_x0, 0.0}, 0.0, c.ego_speed, 0.0));
  s.agents.push_back(straight_track("ped-1", AgentCategory::Pedestrian, 0.0, 0.0, {xc, ped_y},
                                    0.0, 0.0, 0.0));
  add_background(s, c.background_agents, {ego_x0, 0.0});

  // Frames where the pedestrian is above the ego's roofline span rather
  // than ahead or behind: the distance is then exactly the edge clearance.
  int lo = kFrames, hi = -1;
  for (int f = 0; f < kFrames; ++f) {
    const double dx = std::abs(ego_x0 + c.ego_speed * kDt * f - xc);
    if (dx <= kCarLength / 2.0 - kEventMargin) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  }
  require(lo <= hi, "ego_speed", "ego never straddles the pedestrian laterally");

  std::vector<Expectation> ex;
  expect_kinematics(ex, "ego", c.ego_speed, 0.0);
  ex.push_back(expect_value(MetricId::VEL, "ped-1", 0, 0, 0.0, 1e-6));
  const double tol = std::max(0.002, 10.0 * c.noise_sigma);
  ex.push_back(expect_value(MetricId::DTPNZ, "ego", lo, hi, c.lateral_clearance, tol));
  ex.push_back(expect_value(MetricId::LADTP, "ego", lo, hi, c.lateral_clearance, tol));
  ex.push_back(expect_value(MetricId::LODTP, "ego", lo, hi, 0.0, tol));
  // Every frame on the crosswalk reports the same (stored) speed, so the
  // claim can safely cover the whole window.
  ex.push_back(expect_value(MetricId::VOZ, "ego", 0, kFrames - 1, c.ego_speed, 1e-6));
  if (c.noise_sigma == 0.0) ex.push_back(expect_absent(MetricId::TTC, "ego"));
  if (c.lateral_clearance >= 0.7 + 10.0 * c.noise_sigma) {
    ex.push_back(expect_absent(MetricId::GAP, "ego"));
  }
  ex.push_back(expect_absent(MetricId::PET, "ego"));
  ex.push_back(expect_absent(MetricId::SLC, "ego"));
  return {std::move(s), std::move(ex)};
}

// --- solid_line_drift -------------------------------------------------------

SynthResult make_solid_line_drift(const SynthCase& c) {
  require_range(c.ego_speed, 3.0, 15.0, "ego_speed");
  require_range(c.line_offset, -0.8, 1.2, "line_offset");
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  Scenario s = base_scenario(c);
  add_straight_road(s, -150.0, c.ego_speed * 11.0 + 20.0, 0.0, 1.0, BoundaryStyle::Solid,
                    BoundaryStyle::Dashed, "-1");
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth,
                                    {0.0, c.line_offset}, 0.0, c.ego_speed, 0.0));
  add_background(s, c.background_agents, {0.0, 0.0});

  std::vector<Expectation> ex;
  expect_kinematics(ex, "ego", c.ego_speed, 0.0);
  // The solid boundary sits 1 m left of the centerline and the ego is 2 m
  // wide, so its left flank reaches max(0, offset) past the line.
  const double tol = std::max(0.002, 10.0 * c.noise_sigma);
  ex.push_back(expect_value(MetricId::SLC, "ego", 0, kFrames - 1,
                            std::max(0.0, c.line_offset), tol));
  if (c.noise_sigma == 0.0) {
    ex.push_back(expect_absent(MetricId::TTC, "ego"));
    ex.push_back(expect_absent(MetricId::GAP, "ego"));
  }
  ex.push_back(expect_absent(MetricId::PET, "ego"));
  expect_no_map_metrics(ex, "ego");
  return {std::move(s), std::move(ex)};
}

// --- stationary_field -------------------------------------------------------

SynthResult make_stationary_field(const SynthCase& c) {
  require_range(c.noise_sigma, 0.0, 0.05, "noise_sigma");

  Scenario s = base_scenario(c);
  s.agents.push_back(straight_track("ego", AgentCategory::Ego, kCarLength, kCarWidth, {0.0, 0.0},
                                    0.0, 0.0, 0.0));
  add_background(s, c.background_agents, {0.0, 0.0});

  std::vector<Expectation> ex;
  ex.push_back(expect_value(MetricId::VEL, "ego", 0, kFrames - 1, 0.0, 1e-6));
  ex.push_back(expect_value(MetricId::ACC, "ego", 0, kFrames - 2, 0.0, 1e-6));
  ex.push_back(expect_absent(MetricId::TTC, "ego"));
  ex.push_back(expect_absent(MetricId::GAP, "ego"));
  ex.push_back(expect_absent(MetricId::PET, "ego"));
  ex.push_back(expect_absent(MetricId::SLC, "ego"));
  expect_no_map_metrics(ex, "ego");
  return {std::move(s), std::move(ex)};
}

void apply_noise(Scenario& s, double sigma, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> jitter(0.0, sigma);
  for (AgentTrack& a : s.agents) {
    for (int f = 0; f < kFrames; ++f) {
      if (!a.is_valid(f)) continue;
      a.states[f].position.x += jitter(rng);
      a.states[f].position.y += jitter(rng);
    }
  }
}

}  // namespace

std::string_view to_string(SynthKind k) {
  switch (k) {
    case SynthKind::CarFollowing: return "car_following";
    case SynthKind::CrossingPaths: return "crossing_paths";
    case SynthKind::CyclistOvertake: return "cyclist_overtake";
    case SynthKind::CrosswalkApproach: return "crosswalk_approach";
    case SynthKind::SolidLineDrift: return "solid_line_drift";
    case SynthKind::StationaryField: return "stationary_field";
  }
  return "car_following";
}

std::optional<SynthKind> synth_kind_from_string(std::string_view s) {
  for (SynthKind k : kAllSynthKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

SynthResult generate(const SynthCase& c) {
  require(c.background_agents >= 0 && c.background_agents <= 40, "background_agents",
          "must be in [0, 40]");
  SynthResult r;
  switch (c.kind) {
    case SynthKind::CarFollowing: r = make_car_following(c); break;
    case SynthKind::CrossingPaths: r = make_crossing_paths(c); break;
    case SynthKind::CyclistOvertake: r = make_cyclist_overtake(c); break;
    case SynthKind::CrosswalkApproach: r = make_crosswalk_approach(c); break;
    case SynthKind::SolidLineDrift: r = make_solid_line_drift(c); break;
    case SynthKind::StationaryField: r = make_stationary_field(c); break;
  }
  if (c.noise_sigma > 0.0) apply_noise(r.scenario, c.noise_sigma, c.noise_seed);
  fill_missing_speeds(r.scenario);
  validate_scenario(r.scenario);
  return r;
}

std::vector<std::string> check_expectations(const std::vector<MetricSample>& samples,
                                            const std::vector<Expectation>& expectations) {
  std::vector<std::string> failures;
  for (const Expectation& e : expectations) {
    int hits = 0;
    for (const MetricSample& s : samples) {
      if (!s.defined || s.metric != e.metric || s.subject != e.subject) continue;
      if (s.frame < e.frame_lo || s.frame > e.frame_hi) continue;
      ++hits;
      std::ostringstream os;
      if (!e.value) {
        os << to_string(e.metric) << "/" << e.subject << ": unexpected sample " << s.value
           << " at frame " << s.frame;
        failures.push_back(os.str());
        break;
      }
      if (std::abs(s.value - *e.value) > e.tolerance) {
        os << to_string(e.metric) << "/" << e.subject << ": expected " << *e.value << " +/- "
           << e.tolerance << ", got " << s.value << " at frame " << s.frame;
        failures.push_back(os.str());
        break;
      }
    }
    if (e.value && hits == 0) {
      std::ostringstream os;
      os << to_string(e.metric) << "/" << e.subject << ": no sample in frames [" << e.frame_lo
         << ", " << e.frame_hi << "]";
      failures.push_back(os.str());
    }
  }
  return failures;
}

std::string expectations_to_jsonl(const std::string& scenario_id,
                                  const std::vector<Expectation>& expectations) {
  std::string out;
  for (const Expectation& e : expectations) {
    nlohmann::ordered_json j;
    j["scenario_id"] = scenario_id;
    j["metric"] = std::string(to_string(e.metric));
    j["subject"] = e.subject;
    j["frame_range"] = {e.frame_lo, e.frame_hi};
    if (e.value) {
      j["value"] = *e.value;
    } else {
      j["value"] = nullptr;
    }
    j["tolerance"] = e.tolerance;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ScenarioExpectations> expectations_from_jsonl(const std::string& text,
                                                          const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<ScenarioExpectations> out;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where, e.what());
    }
    if (!j.contains("scenario_id") || !j.contains("metric") || !j.contains("subject") ||
        !j.contains("frame_range") || !j.contains("value") || !j.contains("tolerance")) {
      throw SchemaError(where,
                        "expected {scenario_id, metric, subject, frame_range, value, tolerance}");
    }
    const std::string sid = j["scenario_id"].get<std::string>();
    if (out.empty() || out.back().scenario_id != sid) out.push_back({sid, {}});
    Expectation e;
    const auto metric = metric_from_string(j["metric"].get<std::string>());
    if (!metric) throw SchemaError(where, "unknown metric");
    e.metric = *metric;
    e.subject = j["subject"].get<std::string>();
    if (!j["frame_range"].is_array() || j["frame_range"].size() != 2) {
      throw SchemaError(where, "frame_range must be [lo, hi]");
    }
    e.frame_lo = j["frame_range"][0].get<int>();
    e.frame_hi = j["frame_range"][1].get<int>();
    if (!j["value"].is_null()) e.value = j["value"].get<double>();
    e.tolerance = j["tolerance"].get<double>();
    out.back().expectations.push_back(std::move(e));
  }
  return out;
}

std::vector<SynthCase> draw_corpus_cases(const CorpusOptions& options) {
  require(options.count > 0, "count", "must be positive");
  require_range(options.noise_sigma, 0.0, 0.05, "noise_sigma");
  std::mt19937 rng(options.seed);
  const auto unif = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const auto unif_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  std::vector<SynthCase> cases;
  cases.reserve(options.count);
  for (int i = 0; i < options.count; ++i) {
    SynthCase c;
    c.kind = options.kind ? *options.kind : kAllSynthKinds[i % kAllSynthKinds.size()];
    {
      std::ostringstream os;
      os << "synth-" << to_string(c.kind) << "-";
      os.width(6);
      os.fill('0');
      os << i;
      c.scenario_id = os.str();
    }
    c.noise_sigma = options.noise_sigma;
    c.noise_seed = options.seed + static_cast<unsigned>(i) * 977u + 1u;
    switch (c.kind) {
      case SynthKind::CarFollowing: {
        c.ego_speed = unif(6.0, 14.0);
        c.lead_speed = unif(0.0, c.ego_speed - 2.0);
        c.ego_accel = unif(0.0, 1.0) < 0.3 ? unif(0.3, 1.5) : 0.0;
        // Put the contact time well inside a 0.5 s grid cell, then derive
        // the starting gap from it.
        const double contact = 0.5 * unif_int(2, 14) + unif(0.07, 0.43);
        const double rel = c.ego_speed - c.lead_speed;
        c.initial_gap = rel * contact + 0.5 * c.ego_accel * contact * contact;
        while (c.initial_gap > 80.0) c.initial_gap -= rel * 0.5;
        c.background_agents = 8;
        break;
      }
      case SynthKind::CrossingPaths: {
        c.exit_frame = unif_int(20, 60);
        c.entry_frame = c.exit_frame + unif_int(5, 30);
        c.ego_speed = unif(5.0, 12.0);
        c.cross_speed = unif(3.5, 10.0);
        c.background_agents = 8;
        break;
      }
      case SynthKind::CyclistOvertake: {
        c.ego_speed = unif(8.0, 14.0);
        c.target_speed = unif(1.0, std::min(5.0, c.ego_speed - 4.0));
        c.lateral_clearance = unif(0.5, 2.5);
        c.background_agents = 8;
        break;
      }
      case SynthKind::CrosswalkApproach: {
        c.ego_speed = unif(2.5, 9.0);
        c.lateral_clearance = unif(0.6, 3.2);
        c.background_agents = 8;
        break;
      }
      case SynthKind::SolidLineDrift: {
        c.ego_speed = unif(4.0, 12.0);
        c.line_offset = unif(-0.6, 1.1);
        c.background_agents = 9;
        break;
      }
      case SynthKind::StationaryField: {
        c.background_agents = 9;
        break;
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<std::string> generate_corpus(const std::filesystem::path& out_dir,
                                         const CorpusOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), "cannot create directory: " + ec.message());

  const std::vector<SynthCase> cases = draw_corpus_cases(options);
  std::vector<std::string> files;
  files.reserve(cases.size());
  std::string manifest;
  for (const SynthCase& c : cases) {
    SynthResult r = generate(c);
    const std::string name = c.scenario_id + ".json";
    save_scenario(r.scenario, out_dir / name);
    manifest += expectations_to_jsonl(c.scenario_id, r.expectations);
    files.push_back(name);
  }
  const std::filesystem::path manifest_path = out_dir / "expected.jsonl";
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw IoError(manifest_path.string(), "cannot open for writing");
  out << manifest;
  if (!out) throw IoError(manifest_path.string(), "write failed");
  return files;
}

}  // namespace driveaudit
