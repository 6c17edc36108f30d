#include "driveaudit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "driveaudit/errors.hpp"

namespace driveaudit {

std::string_view to_string(MetricId m) {
  switch (m) {
    case MetricId::VEL: return "VEL";
    case MetricId::ACC: return "ACC";
    case MetricId::GAP: return "GAP";
    case MetricId::TTC: return "TTC";
    case MetricId::PET: return "PET";
    case MetricId::LADTB: return "LADTB";
    case MetricId::LODTB: return "LODTB";
    case MetricId::LADTP: return "LADTP";
    case MetricId::LODTP: return "LODTP";
    case MetricId::DTPNZ: return "DTPNZ";
    case MetricId::VOZ: return "VOZ";
    case MetricId::SLC: return "SLC";
  }
  return "VEL";
}

std::optional<MetricId> metric_from_string(std::string_view s) {
  for (MetricId m : kAllMetrics) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

bool sample_order_less(const MetricSample& a, const MetricSample& b) {
  return std::tie(a.metric, a.subject, a.other, a.frame) <
         std::tie(b.metric, b.subject, b.other, b.frame);
}

// ---------------------------------------------------------------------------
// VEL / ACC
// ---------------------------------------------------------------------------

std::vector<MetricSample> compute_vel(const AgentTrack& track, double dt) {
  const std::size_t n = track.states.size();
  std::vector<MetricSample> out(n);
  for (std::size_t f = 0; f < n; ++f) {
    MetricSample& s = out[f];
    s.metric = MetricId::VEL;
    s.subject = track.agent_id;
    s.frame = static_cast<int>(f);
    if (!track.is_valid(f)) continue;
    if (track.states[f].speed) {
      s.value = *track.states[f].speed;
      s.defined = true;
    } else if (f + 1 < n && track.is_valid(f + 1)) {
      s.value = (track.states[f + 1].position - track.states[f].position).norm() / dt;
      s.defined = true;
    } else if (f > 0 && out[f - 1].defined) {
      // last frame of a run repeats its predecessor
      s.value = out[f - 1].value;
      s.defined = true;
    }
  }
  return out;
}

std::vector<MetricSample> compute_acc(const std::vector<MetricSample>& vel_series, double dt) {
  const std::size_t n = vel_series.size();
  std::vector<MetricSample> out(n);
  for (std::size_t f = 0; f < n; ++f) {
    MetricSample& s = out[f];
    s.metric = MetricId::ACC;
    s.subject = vel_series[f].subject;
    s.frame = static_cast<int>(f);
    if (vel_series[f].defined && f + 1 < n && vel_series[f + 1].defined) {
      s.value = (vel_series[f + 1].value - vel_series[f].value) / dt;
      s.defined = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reference paths and TTC
// ---------------------------------------------------------------------------

PathParam build_reference_path(const AgentTrack& track, int from_frame) {
  if (from_frame < 0 || !track.is_valid(from_frame)) {
    throw DomainError("build_reference_path",
                      "agent '" + track.agent_id + "' not valid at frame " +
                        std::to_string(from_frame));
  }
  constexpr double kMergeBelow = 0.01;  // 1 cm
  std::vector<Vec2> pts;
  for (std::size_t f = from_frame; f < track.states.size(); ++f) {
    if (!track.is_valid(f)) continue;
    const Vec2 p = track.states[f].position;
    if (pts.empty() || (p - pts.back()).norm() >= kMergeBelow) pts.push_back(p);
  }
  if (pts.size() < 2) {
    throw DegeneratePathError(track.agent_id,
                              "fewer than 2 distinct positions from frame " +
                                std::to_string(from_frame));
  }
  return PathParam(std::move(pts));
}

namespace {

// Distance traveled after tau seconds from speed v >= 0 and constant
// acceleration a; a braking agent stops and stays (no reversing).
double clamped_displacement(double v, double a, double tau) {
  if (a < 0.0) {
    const double t_stop = v / -a;
    if (tau >= t_stop) return 0.5 * v * t_stop;
  }
  return (v + 0.5 * a * tau) * tau;
}

double series_value_or_zero(const std::vector<MetricSample>& series, int frame) {
  if (frame < 0 || frame >= static_cast<int>(series.size())) return 0.0;
  return series[frame].defined ? series[frame].value : 0.0;
}

struct TtcMotion {
  bool stationary = true;
  Vec2 position;
  double heading = 0.0;
  std::optional<PathParam> path;
  double v = 0.0;
  double a = 0.0;
  double remaining = 0.0;
};

TtcMotion make_ttc_motion(const AgentTrack& t, int frame, double dt) {
  TtcMotion m;
  m.position = t.states[frame].position;
  m.heading = t.states[frame].heading;
  try {
    PathParam p = build_reference_path(t, frame);
    m.remaining = p.total_length();
    m.path.emplace(std::move(p));
    m.stationary = false;
  } catch (const DegeneratePathError&) {
    return m;  // parked agents hold their recorded pose
  }
  const auto vel = compute_vel(t, dt);
  const auto acc = compute_acc(vel, dt);
  m.v = std::max(0.0, series_value_or_zero(vel, frame));
  m.a = series_value_or_zero(acc, frame);
  return m;
}

OrientedBox motion_box(const TtcMotion& m, const AgentTrack& t, double tau) {
  if (m.stationary) return {m.position, m.heading, t.length, t.width};
  const double dx = std::min(clamped_displacement(m.v, m.a, tau), m.remaining);
  const PoseSample ps = m.path->point_at_arclength(dx);
  return {ps.position, ps.heading, t.length, t.width};
}

// Upper bound on an agent's speed anywhere within the horizon.
double horizon_speed_cap(const TtcMotion& m, double horizon) {
  if (m.stationary) return 0.0;
  return m.a > 0.0 ? m.v + m.a * horizon : m.v;
}

}  // namespace

MetricSample compute_ttc(const AgentTrack& ego, const AgentTrack& other, int frame, double dt,
                         const TtcConfig& cfg) {
  MetricSample out;
  out.metric = MetricId::TTC;
  out.subject = ego.agent_id;
  out.other = other.agent_id;
  out.frame = frame;
  if (!ego.is_valid(frame) || !other.is_valid(frame)) return out;

  const TtcMotion ma = make_ttc_motion(ego, frame, dt);
  const TtcMotion mb = make_ttc_motion(other, frame, dt);

  const int max_k = static_cast<int>(std::lround(cfg.grid_max / cfg.fine_step));
  const int per_grid = std::max(1, static_cast<int>(std::lround(cfg.grid_step / cfg.fine_step)));
  const double close_per_step =
    (horizon_speed_cap(ma, cfg.grid_max) + horizon_speed_cap(mb, cfg.grid_max)) * cfg.fine_step;
  const double ra = OrientedBox{{}, 0.0, ego.length, ego.width}.half_diagonal();
  const double rb = OrientedBox{{}, 0.0, other.length, other.width}.half_diagonal();

  int k = 1;
  while (k <= max_k) {
    const double tau = k * cfg.fine_step;
    const OrientedBox ba = motion_box(ma, ego, tau);
    const OrientedBox bb = motion_box(mb, other, tau);
    if (boxes_intersect(ba, bb)) {
      const int grid_index = (k + per_grid - 1) / per_grid;
      out.value = grid_index * cfg.grid_step;
      out.defined = true;
      return out;
    }
    const bool pinned_a =
      ma.stationary || clamped_displacement(ma.v, ma.a, tau) >= ma.remaining;
    const bool pinned_b =
      mb.stationary || clamped_displacement(mb.v, mb.a, tau) >= mb.remaining;
    if (pinned_a && pinned_b) break;  // neither can move again: no future contact

    // Conservative advance: centers close at most close_per_step per step,
    // so a positive clearance licenses skipping that many fine steps.
    const double clearance = (ba.center - bb.center).norm() - ra - rb;
    int skip = 1;
    if (clearance > 0.0) {
      if (close_per_step <= 0.0) break;
      skip = std::max(1, static_cast<int>(std::floor(clearance / close_per_step)));
    }
    k += skip;
  }
  return out;
}

// ---------------------------------------------------------------------------
// GAP
// ---------------------------------------------------------------------------

MetricSample compute_gap(const AgentTrack& ego, std::span<const AgentTrack> others, int frame,
                         double corridor_halfwidth) {
  MetricSample out;
  out.metric = MetricId::GAP;
  out.subject = ego.agent_id;
  out.frame = frame;
  if (!ego.is_valid(frame)) return out;

  std::optional<PathParam> path;
  try {
    path.emplace(build_reference_path(ego, frame));
  } catch (const DegeneratePathError&) {
    return out;  // no future trajectory, nothing to measure along
  }

  const double s_front = 0.5 * ego.length;
  double best = std::numeric_limits<double>::infinity();
  for (const AgentTrack& o : others) {
    if (o.agent_id == ego.agent_id || !o.is_valid(frame)) continue;

    double s_min = std::numeric_limits<double>::infinity();
    const auto consider = [&](Vec2 q) {
      const PathProjection pr = path->project(q);
      // Corridor membership is distance to the polyline itself. The
      // projection's lateral component alone would under-count at path
      // vertices, where the nearest point is a corner rather than a
      // perpendicular foot.
      const Vec2 on_path = path->point_at_arclength(pr.arclength).position;
      if ((q - on_path).norm() <= corridor_halfwidth && pr.arclength >= s_front) {
        s_min = std::min(s_min, pr.arclength);
      }
    };
    const OrientedBox ob = o.box_at(frame);
    if (ob.is_point()) {
      consider(ob.center);
    } else {
      for (Vec2 c : box_corners(ob)) consider(c);
    }

    if (s_min < std::numeric_limits<double>::infinity() && s_min - s_front < best) {
      best = s_min - s_front;
      out.other = o.agent_id;
    }
  }
  if (best < std::numeric_limits<double>::infinity()) {
    out.value = best;
    out.defined = true;
  } else {
    out.other.clear();
  }
  return out;
}

// ---------------------------------------------------------------------------
// PET
// ---------------------------------------------------------------------------

namespace {

struct PetWindow {
  bool defined = false;
  int exit_frame = 0;
  int entry_frame = 0;
};

// First-exit/first-entry resolution over sorted occupancy frame sets.
PetWindow pet_window(const std::vector<int>& occupied_a, const std::vector<int>& occupied_b) {
  if (occupied_a.empty() || occupied_b.empty()) return {};
  const int b_entry = occupied_b.front();
  const auto it = std::lower_bound(occupied_a.begin(), occupied_a.end(), b_entry);
  if (it == occupied_a.begin()) return {};  // a never precedes b
  return {true, *std::prev(it), b_entry};
}

bool share_frame(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

MetricSample pet_sample(const std::string& subject, const std::string& other,
                        const std::vector<int>& occ_subject, const std::vector<int>& occ_other,
                        double dt) {
  MetricSample out;
  out.metric = MetricId::PET;
  out.subject = subject;
  out.other = other;
  if (share_frame(occ_subject, occ_other)) return out;  // simultaneous occupancy
  const PetWindow w = pet_window(occ_subject, occ_other);
  if (!w.defined) return out;
  out.frame = w.exit_frame;
  out.value = (w.entry_frame - w.exit_frame) * dt;
  out.defined = true;
  return out;
}

std::vector<int> ring_occupancy(const AgentTrack& t, std::span<const Vec2> ring) {
  std::vector<int> frames;
  for (std::size_t f = 0; f < t.states.size(); ++f) {
    if (t.is_valid(f) && box_intersects_polygon(t.box_at(f), ring)) {
      frames.push_back(static_cast<int>(f));
    }
  }
  return frames;
}

}  // namespace

MetricSample compute_pet(const AgentTrack& a, const AgentTrack& b,
                         std::span<const Vec2> conflict_area, double dt) {
  if (conflict_area.size() < 3 || !polygon_is_simple(conflict_area) ||
      std::abs(polygon_signed_area(conflict_area)) <= 0.0) {
    throw ConflictAreaError("conflict_area", "ring must be simple with positive area");
  }
  return pet_sample(a.agent_id, b.agent_id, ring_occupancy(a, conflict_area),
                    ring_occupancy(b, conflict_area), dt);
}

// ---------------------------------------------------------------------------
// DTB / DTP
// ---------------------------------------------------------------------------

std::pair<MetricSample, MetricSample> compute_dtx(const AgentTrack& vehicle,
                                                  const AgentTrack& target, int frame,
                                                  double interaction_radius) {
  MetricId lateral_id, longitudinal_id;
  if (target.category == AgentCategory::Bicycle) {
    lateral_id = MetricId::LADTB;
    longitudinal_id = MetricId::LODTB;
  } else if (target.category == AgentCategory::Pedestrian) {
    lateral_id = MetricId::LADTP;
    longitudinal_id = MetricId::LODTP;
  } else {
    throw CategoryError("target",
                        "agent '" + target.agent_id + "' must be a bicycle or pedestrian");
  }

  MetricSample lat, lon;
  lat.metric = lateral_id;
  lon.metric = longitudinal_id;
  lat.subject = lon.subject = vehicle.agent_id;
  lat.other = lon.other = target.agent_id;
  lat.frame = lon.frame = frame;

  if (vehicle.is_valid(frame) && target.is_valid(frame)) {
    const DistanceWitness w = box_distance_witness(vehicle.box_at(frame), target.box_at(frame));
    if (w.distance <= interaction_radius) {
      const Vec2 r = w.on_b - w.on_a;
      const Vec2 u = unit_from_angle(vehicle.states[frame].heading);
      lon.value = std::abs(r.dot(u));
      lat.value = std::abs(u.cross(r));
      lat.defined = lon.defined = true;
    }
  }
  return {lat, lon};
}

// ---------------------------------------------------------------------------
// DTPNZ / VOZ
// ---------------------------------------------------------------------------

std::vector<MetricSample> compute_dtpnz(const AgentTrack& vehicle,
                                        std::span<const AgentTrack> pedestrians,
                                        std::span<const Crosswalk> crosswalks, int frame,
                                        double zone_radius) {
  std::vector<MetricSample> out;
  if (!vehicle.is_valid(frame)) return out;
  const OrientedBox vb = vehicle.box_at(frame);

  std::vector<std::string> already_sampled;
  for (const Crosswalk& cw : crosswalks) {
    if (!box_intersects_polygon(vb, cw.polygon)) continue;
    for (const AgentTrack& p : pedestrians) {
      if (p.category != AgentCategory::Pedestrian || !p.is_valid(frame) ||
          p.agent_id == vehicle.agent_id) {
        continue;
      }
      if (std::find(already_sampled.begin(), already_sampled.end(), p.agent_id) !=
          already_sampled.end()) {
        continue;  // distance is crosswalk-independent; report each pedestrian once
      }
      if (box_polygon_distance(p.box_at(frame), cw.polygon) <= zone_radius) {
        MetricSample s;
        s.metric = MetricId::DTPNZ;
        s.subject = vehicle.agent_id;
        s.other = p.agent_id;
        s.frame = frame;
        s.value = box_distance(vb, p.box_at(frame));
        s.defined = true;
        out.push_back(std::move(s));
        already_sampled.push_back(p.agent_id);
      }
    }
  }
  return out;
}

MetricSample compute_voz(const AgentTrack& vehicle, const std::vector<MetricSample>& vel_series,
                         std::span<const Crosswalk> crosswalks, int frame) {
  MetricSample out;
  out.metric = MetricId::VOZ;
  out.subject = vehicle.agent_id;
  out.frame = frame;
  if (!vehicle.is_valid(frame)) return out;
  if (frame < 0 || frame >= static_cast<int>(vel_series.size()) || !vel_series[frame].defined) {
    return out;
  }
  const OrientedBox vb = vehicle.box_at(frame);
  for (const Crosswalk& cw : crosswalks) {
    if (box_intersects_polygon(vb, cw.polygon)) {
      out.other = cw.crosswalk_id;
      out.value = vel_series[frame].value;
      out.defined = true;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SLC
// ---------------------------------------------------------------------------

namespace {

struct LaneMatch {
  const Lane* lane = nullptr;
  Vec2 centerline_foot;  // closest centerline point to the vehicle center
};

// The lane whose centerline passes closest to q, considering only lanes
// whose closest point is a perpendicular foot (so a lane ending well behind
// the vehicle cannot win through its endpoint).
LaneMatch match_lane(std::span<const Lane> lanes, Vec2 q, double max_lateral) {
  LaneMatch best;
  double best_abs = std::numeric_limits<double>::infinity();
  for (const Lane& l : lanes) {
    if (l.centerline.size() < 2) continue;
    std::optional<PathParam> cl_storage;
    try {
      cl_storage.emplace(l.centerline);
    } catch (const DomainError&) {
      continue;  // degenerate centerline
    }
    const PathParam& cl = *cl_storage;
    const PathProjection pr = cl.project(q);
    const Vec2 foot = cl.point_at_arclength(pr.arclength).position;
    const double dist = (q - foot).norm();
    if (dist > max_lateral) continue;
    if (dist - std::abs(pr.lateral) > 1e-9) continue;  // endpoint, not a perpendicular foot
    if (std::abs(pr.lateral) < best_abs) {
      best_abs = std::abs(pr.lateral);
      best.lane = &l;
      best.centerline_foot = foot;
    }
  }
  return best;
}

}  // namespace

MetricSample compute_slc(const AgentTrack& vehicle, std::span<const Lane> lanes,
                         std::span<const BoundaryLine> boundaries, int frame,
                         double max_lateral) {
  MetricSample out;
  out.metric = MetricId::SLC;
  out.subject = vehicle.agent_id;
  out.frame = frame;
  if (!vehicle.is_valid(frame)) return out;

  const Vec2 center = vehicle.states[frame].position;
  const LaneMatch match = match_lane(lanes, center, max_lateral);
  if (!match.lane) return out;

  const auto find_boundary = [&](const std::string& id) -> const BoundaryLine* {
    if (id.empty()) return nullptr;
    for (const BoundaryLine& b : boundaries) {
      if (b.boundary_id == id) return &b;
    }
    return nullptr;
  };

  bool any_solid = false;
  double worst = 0.0;
  for (const BoundaryLine* b :
       {find_boundary(match.lane->left_boundary), find_boundary(match.lane->right_boundary)}) {
    if (!b || b->style != BoundaryStyle::Solid || b->polyline.size() < 2) continue;
    std::optional<PathParam> bp_storage;
    try {
      bp_storage.emplace(b->polyline);
    } catch (const DomainError&) {
      continue;
    }
    any_solid = true;
    const PathParam& bp = *bp_storage;
    const double lane_side = bp.project(match.centerline_foot).lateral;
    if (lane_side == 0.0) continue;  // centerline on the line itself: side unknown
    const double sign = lane_side > 0.0 ? 1.0 : -1.0;
    double deepest = 0.0;
    for (Vec2 corner : box_corners(vehicle.box_at(frame))) {
      // positive when the corner sits on the far side of the boundary
      deepest = std::max(deepest, -sign * bp.project(corner).lateral);
    }
    worst = std::max(worst, deepest);
  }
  if (!any_solid) return out;
  out.value = worst;
  out.defined = true;
  return out;
}

// ---------------------------------------------------------------------------
// Whole-scenario driver
// ---------------------------------------------------------------------------

namespace {

// Swept-overlap conflict pieces for a pair: every region one agent's box
// (at some frame) shares with the other's box at any frame. Their union is
// the intersection of the two swept footprints.
std::vector<std::vector<Vec2>> conflict_pieces(const AgentTrack& a, const AgentTrack& b) {
  std::vector<std::vector<Vec2>> pieces;
  const double reach = OrientedBox{{}, 0.0, a.length, a.width}.half_diagonal() +
                       OrientedBox{{}, 0.0, b.length, b.width}.half_diagonal();
  for (std::size_t fa = 0; fa < a.states.size(); ++fa) {
    if (!a.is_valid(fa)) continue;
    const OrientedBox ba = a.box_at(fa);
    for (std::size_t fb = 0; fb < b.states.size(); ++fb) {
      if (!b.is_valid(fb)) continue;
      if ((ba.center - b.states[fb].position).norm() > reach) continue;
      const OrientedBox bb = b.box_at(fb);
      if (!boxes_intersect(ba, bb)) continue;
      const auto ca = box_corners(ba);
      const auto cb = box_corners(bb);
      auto piece = clip_convex(std::span<const Vec2>(ca.data(), ca.size()),
                               std::span<const Vec2>(cb.data(), cb.size()));
      if (piece.size() >= 3 && std::abs(polygon_signed_area(piece)) > 1e-9) {
        pieces.push_back(std::move(piece));
      }
    }
  }
  return pieces;
}

std::vector<int> pieces_occupancy(const AgentTrack& t,
                                  const std::vector<std::vector<Vec2>>& pieces) {
  std::vector<int> frames;
  for (std::size_t f = 0; f < t.states.size(); ++f) {
    if (!t.is_valid(f)) continue;
    const OrientedBox box = t.box_at(f);
    for (const auto& piece : pieces) {
      if (box_intersects_polygon(box, piece)) {
        frames.push_back(static_cast<int>(f));
        break;
      }
    }
  }
  return frames;
}

}  // namespace

std::vector<MetricSample> compute_all(const Scenario& s, const MetricsConfig& cfg) {
  validate_scenario(s);

  const auto enabled = [&](MetricId m) {
    return cfg.enabled.empty() ||
           std::find(cfg.enabled.begin(), cfg.enabled.end(), m) != cfg.enabled.end();
  };
  const auto append_defined = [](std::vector<MetricSample>& dst, std::vector<MetricSample> src) {
    for (MetricSample& m : src) {
      if (m.defined) dst.push_back(std::move(m));
    }
  };

  std::vector<MetricSample> out;
  const double dt = s.dt();
  const int n = s.frame_count;

  std::map<std::string, std::vector<MetricSample>> vel_cache;
  for (const AgentTrack& a : s.agents) {
    auto vel = compute_vel(a, dt);
    if (enabled(MetricId::ACC)) append_defined(out, compute_acc(vel, dt));
    if (enabled(MetricId::VEL)) {
      auto copy = vel;
      append_defined(out, std::move(copy));
    }
    vel_cache.emplace(a.agent_id, std::move(vel));
  }

  const AgentTrack& ego = s.ego();
  std::vector<const AgentTrack*> vehicles;
  for (const AgentTrack& a : s.agents) {
    if (is_vehicle_category(a.category)) vehicles.push_back(&a);
  }
  std::vector<const AgentTrack*> subjects;
  if (cfg.pair_all_vehicles) {
    subjects = vehicles;
  } else {
    subjects = {&ego};
  }

  if (enabled(MetricId::GAP)) {
    for (const AgentTrack* subj : subjects) {
      for (int f = 0; f < n; ++f) {
        MetricSample g = compute_gap(*subj, s.agents, f, cfg.corridor_halfwidth);
        if (g.defined) out.push_back(std::move(g));
      }
    }
  }

  if (enabled(MetricId::TTC)) {
    for (const AgentTrack* subj : subjects) {
      for (const AgentTrack& other : s.agents) {
        if (other.agent_id == subj->agent_id) continue;
        for (int f = 0; f < n; ++f) {
          MetricSample t = compute_ttc(*subj, other, f, dt, cfg.ttc);
          if (t.defined) out.push_back(std::move(t));
        }
      }
    }
  }

  if (enabled(MetricId::PET) && cfg.auto_conflict_areas) {
    std::vector<std::pair<const AgentTrack*, const AgentTrack*>> pet_pairs;
    if (cfg.pair_all_vehicles) {
      for (std::size_t i = 0; i < vehicles.size(); ++i) {
        for (std::size_t j = i + 1; j < vehicles.size(); ++j) {
          pet_pairs.emplace_back(vehicles[i], vehicles[j]);
        }
      }
    } else {
      for (const AgentTrack* v : vehicles) {
        if (v->agent_id != ego.agent_id) pet_pairs.emplace_back(&ego, v);
      }
    }
    for (const auto& [a, b] : pet_pairs) {
      const auto pieces = conflict_pieces(*a, *b);
      if (pieces.empty()) continue;
      const auto occ_a = pieces_occupancy(*a, pieces);
      const auto occ_b = pieces_occupancy(*b, pieces);
      MetricSample forward = pet_sample(a->agent_id, b->agent_id, occ_a, occ_b, dt);
      if (forward.defined) out.push_back(std::move(forward));
      MetricSample backward = pet_sample(b->agent_id, a->agent_id, occ_b, occ_a, dt);
      if (backward.defined) out.push_back(std::move(backward));
    }
  }

  const bool any_dtx = enabled(MetricId::LADTB) || enabled(MetricId::LODTB) ||
                       enabled(MetricId::LADTP) || enabled(MetricId::LODTP);
  if (any_dtx) {
    for (const AgentTrack* v : vehicles) {
      for (const AgentTrack& target : s.agents) {
        if (target.category != AgentCategory::Bicycle &&
            target.category != AgentCategory::Pedestrian) {
          continue;
        }
        for (int f = 0; f < n; ++f) {
          if (!v->is_valid(f) || !target.is_valid(f)) continue;
          auto [lat, lon] = compute_dtx(*v, target, f, cfg.interaction_radius);
          if (lat.defined && enabled(lat.metric)) out.push_back(std::move(lat));
          if (lon.defined && enabled(lon.metric)) out.push_back(std::move(lon));
        }
      }
    }
  }

  if (enabled(MetricId::DTPNZ)) {
    for (const AgentTrack* v : vehicles) {
      for (int f = 0; f < n; ++f) {
        auto samples = compute_dtpnz(*v, s.agents, s.crosswalks, f, cfg.zone_radius);
        for (MetricSample& m : samples) out.push_back(std::move(m));
      }
    }
  }

  if (enabled(MetricId::VOZ)) {
    for (const AgentTrack* v : vehicles) {
      const auto& vel = vel_cache.at(v->agent_id);
      for (int f = 0; f < n; ++f) {
        MetricSample m = compute_voz(*v, vel, s.crosswalks, f);
        if (m.defined) out.push_back(std::move(m));
      }
    }
  }

  if (enabled(MetricId::SLC)) {
    for (const AgentTrack* v : vehicles) {
      for (int f = 0; f < n; ++f) {
        MetricSample m = compute_slc(*v, s.lanes, s.boundaries, f, cfg.lane_match_max_lateral);
        if (m.defined) out.push_back(std::move(m));
      }
    }
  }

  std::sort(out.begin(), out.end(), sample_order_less);
  return out;
}

}  // namespace driveaudit
