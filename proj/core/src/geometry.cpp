#include "driveaudit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "driveaudit/errors.hpp"

namespace driveaudit {

namespace {

constexpr double kEps = 1e-12;

struct SegmentWitness {
  double squared_distance;
  Vec2 on_first;
  Vec2 on_second;
};

// Closest points between segments [p1,q1] and [p2,q2]; handles degenerate
// (zero-length) segments by clamping.
SegmentWitness closest_points_on_segments(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = d1.dot(d1);
  const double e = d2.dot(d2);
  const double f = d2.dot(r);

  double s = 0.0;
  double t = 0.0;
  if (a <= kEps && e <= kEps) {
    // both degenerate
  } else if (a <= kEps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kEps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec2 c1 = p1 + d1 * s;
  const Vec2 c2 = p2 + d2 * t;
  return {(c1 - c2).squared_norm(), c1, c2};
}

void project_onto_axis(const std::array<Vec2, 4>& corners, Vec2 axis, double& lo, double& hi) {
  lo = hi = corners[0].dot(axis);
  for (int i = 1; i < 4; ++i) {
    const double p = corners[i].dot(axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
}

// Deterministic ordering so that symmetric queries evaluate identically.
bool box_precedes(const OrientedBox& a, const OrientedBox& b) {
  return std::tie(a.center.x, a.center.y, a.heading, a.length, a.width) <
         std::tie(b.center.x, b.center.y, b.heading, b.length, b.width);
}

bool point_in_box(const OrientedBox& b, Vec2 q) {
  const Vec2 rel = q - b.center;
  const Vec2 u = unit_from_angle(b.heading);
  const Vec2 v{-u.y, u.x};
  return std::abs(rel.dot(u)) <= 0.5 * b.length && std::abs(rel.dot(v)) <= 0.5 * b.width;
}

int orientation_sign(Vec2 a, Vec2 b, Vec2 c) {
  const double v = (b - a).cross(c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment_collinear(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

std::array<Vec2, 4> box_corners(const OrientedBox& b) {
  const Vec2 u = unit_from_angle(b.heading) * (0.5 * b.length);
  const Vec2 v = Vec2{-std::sin(b.heading), std::cos(b.heading)} * (0.5 * b.width);
  return {b.center + u + v, b.center - u + v, b.center - u - v, b.center + u - v};
}

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = box_corners(a);
  const auto cb = box_corners(b);
  const Vec2 ua = unit_from_angle(a.heading);
  const Vec2 ub = unit_from_angle(b.heading);
  const Vec2 axes[4] = {ua, {-ua.y, ua.x}, ub, {-ub.y, ub.x}};
  for (const Vec2& axis : axes) {
    double lo_a, hi_a, lo_b, hi_b;
    project_onto_axis(ca, axis, lo_a, hi_a);
    project_onto_axis(cb, axis, lo_b, hi_b);
    if (hi_a < lo_b || hi_b < lo_a) return false;
  }
  return true;
}

DistanceWitness box_distance_witness(const OrientedBox& a, const OrientedBox& b) {
  if (box_precedes(b, a)) {
    DistanceWitness w = box_distance_witness(b, a);
    std::swap(w.on_a, w.on_b);
    return w;
  }

  const auto ca = box_corners(a);
  const auto cb = box_corners(b);

  SegmentWitness best{std::numeric_limits<double>::infinity(), {}, {}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const SegmentWitness w =
        closest_points_on_segments(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4]);
      if (w.squared_distance < best.squared_distance) best = w;
    }
  }

  if (boxes_intersect(a, b)) {
    // Touching or crossing edges give a zero-distance witness; full
    // containment does not, so fall back to the contained center.
    Vec2 w = best.on_first;
    if (best.squared_distance > kEps) {
      w = point_in_box(b, a.center) ? a.center : b.center;
    }
    return {0.0, w, w};
  }
  return {std::sqrt(best.squared_distance), best.on_first, best.on_second};
}

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  return box_distance_witness(a, b).distance;
}

PathParam::PathParam(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw DomainError("PathParam", "polyline needs at least 2 points");
  }
  cumulative_.resize(points_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double len = (points_[i] - points_[i - 1]).norm();
    if (len <= 0.0) {
      throw DomainError("PathParam", "zero-length segment at index " + std::to_string(i - 1));
    }
    cumulative_[i] = cumulative_[i - 1] + len;
  }
}

PoseSample PathParam::point_at_arclength(double s) const {
  constexpr double kSlack = 1e-9;
  if (s < -kSlack || s > total_length() + kSlack) {
    throw DomainError("point_at_arclength",
                      "arclength " + std::to_string(s) + " outside [0, " +
                        std::to_string(total_length()) + "]");
  }
  s = std::clamp(s, 0.0, total_length());

  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  idx = std::min(idx, points_.size() - 2);

  const Vec2 a = points_[idx];
  const Vec2 b = points_[idx + 1];
  const double seg_len = cumulative_[idx + 1] - cumulative_[idx];
  const double t = (s - cumulative_[idx]) / seg_len;

  Vec2 pos;
  if (t <= 0.0) {
    pos = a;
  } else if (t >= 1.0) {
    pos = b;
  } else {
    pos = a + (b - a) * t;
  }
  return {pos, std::atan2(b.y - a.y, b.x - a.x)};
}

PathProjection PathParam::project(Vec2 q) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  PathProjection best;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double len2 = d.squared_norm();
    const double t = std::clamp((q - a).dot(d) / len2, 0.0, 1.0);
    const Vec2 closest = a + d * t;
    const double d2 = (q - closest).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      const double seg_len = cumulative_[i + 1] - cumulative_[i];
      const Vec2 dir = d * (1.0 / seg_len);
      best.arclength = cumulative_[i] + t * seg_len;
      best.lateral = dir.cross(q - closest);
    }
  }
  return best;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  if (len2 <= kEps) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + d * t)).norm();
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(a, b, c)) return true;
  if (o2 == 0 && on_segment_collinear(a, b, d)) return true;
  if (o3 == 0 && on_segment_collinear(c, d, a)) return true;
  if (o4 == 0 && on_segment_collinear(c, d, b)) return true;
  return false;
}

double polygon_signed_area(std::span<const Vec2> ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    acc += a.cross(b);
  }
  return 0.5 * acc;
}

bool polygon_is_simple(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[(i + 1) % n];
    if ((b - a).squared_norm() <= kEps) return false;
  }
  // Consecutive edges must not fold back onto each other.
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = ring[i];
    const Vec2 mid = ring[(i + 1) % n];
    const Vec2 next = ring[(i + 2) % n];
    const Vec2 d1 = mid - prev;
    const Vec2 d2 = next - mid;
    if (d1.cross(d2) == 0.0 && d1.dot(d2) < 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent around the wrap
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

bool polygon_contains(std::span<const Vec2> ring, Vec2 q) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(q, ring[i], ring[(i + 1) % n]) <= 1e-9) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 pi = ring[i];
    const Vec2 pj = ring[j];
    if ((pi.y > q.y) != (pj.y > q.y)) {
      const double x_cross = pj.x + (q.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool box_intersects_polygon(const OrientedBox& b, std::span<const Vec2> ring) {
  if (ring.size() < 3) return false;
  if (b.is_point()) return polygon_contains(ring, b.center);

  const auto corners = box_corners(b);
  for (const Vec2& v : ring) {
    if (point_in_box(b, v)) return true;
  }
  for (const Vec2& c : corners) {
    if (polygon_contains(ring, c)) return true;
  }
  const std::size_t n = ring.size();
  for (int i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (segments_intersect(corners[i], corners[(i + 1) % 4], ring[j], ring[(j + 1) % n])) {
        return true;
      }
    }
  }
  return false;
}

double box_polygon_distance(const OrientedBox& b, std::span<const Vec2> ring) {
  if (box_intersects_polygon(b, ring)) return 0.0;
  const std::size_t n = ring.size();
  double best = std::numeric_limits<double>::infinity();
  if (b.is_point()) {
    for (std::size_t j = 0; j < n; ++j) {
      best = std::min(best, point_segment_distance(b.center, ring[j], ring[(j + 1) % n]));
    }
    return best;
  }
  const auto corners = box_corners(b);
  for (int i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      best = std::min(best, std::sqrt(closest_points_on_segments(corners[i], corners[(i + 1) % 4],
                                                                 ring[j], ring[(j + 1) % n])
                                        .squared_distance));
    }
  }
  return best;
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !output.empty(); ++i) {
    const Vec2 a = clip[i];
    const Vec2 b = clip[(i + 1) % n];
    const Vec2 edge = b - a;

    std::vector<Vec2> input;
    input.swap(output);
    const auto inside = [&](Vec2 p) { return edge.cross(p - a) >= 0.0; };
    const auto intersect = [&](Vec2 p, Vec2 q) {
      const Vec2 d = q - p;
      const double denom = edge.cross(d);
      if (denom == 0.0) return p;
      const double t = edge.cross(a - p) / denom;
      return p + d * t;
    };

    for (std::size_t j = 0; j < input.size(); ++j) {
      const Vec2 cur = input[j];
      const Vec2 prev = input[(j + input.size() - 1) % input.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in) {
        if (!prev_in) output.push_back(intersect(prev, cur));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(intersect(prev, cur));
      }
    }
  }
  return output;
}

}  // namespace driveaudit
