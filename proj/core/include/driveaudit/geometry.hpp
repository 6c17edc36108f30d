#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "driveaudit/vec2.hpp"

namespace driveaudit {

/// Axis-oriented rectangle: `length` extends along `heading`, `width`
/// perpendicular to it. Zero extent in both dimensions denotes a point agent.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  bool is_point() const { return length <= 0.0 && width <= 0.0; }
  double half_diagonal() const { return 0.5 * std::sqrt(length * length + width * width); }
};

/// Corners in counterclockwise order, starting at front-left relative to
/// the heading. A zero-extent box yields four copies of the center.
std::array<Vec2, 4> box_corners(const OrientedBox& b);

/// Closed-set overlap test (separating axes); boundary contact counts.
bool boxes_intersect(const OrientedBox& a, const OrientedBox& b);

struct DistanceWitness {
  double distance = 0.0;
  Vec2 on_a;
  Vec2 on_b;
};

/// Minimum Euclidean distance between the two convex polygons together with
/// one closest point on each. Zero exactly when boxes_intersect is true.
DistanceWitness box_distance_witness(const OrientedBox& a, const OrientedBox& b);

double box_distance(const OrientedBox& a, const OrientedBox& b);

struct PoseSample {
  Vec2 position;
  double heading = 0.0;
};

struct PathProjection {
  double arclength = 0.0;
  /// Signed perpendicular offset; positive left of the travel direction.
  double lateral = 0.0;
};

/// Polyline with a cumulative arc-length parameterization.
class PathParam {
public:
  /// Points must be pairwise distinct between neighbors; throws DomainError
  /// on fewer than 2 points or a zero-length segment.
  explicit PathParam(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& cumulative_arclength() const { return cumulative_; }
  double total_length() const { return cumulative_.back(); }

  /// Position and tangent heading at arc length s in [0, total_length].
  /// Throws DomainError outside that range (beyond a 1e-9 slack).
  PoseSample point_at_arclength(double s) const;

  /// Closest-point projection; ties resolved toward smaller arc length.
  PathProjection project(Vec2 q) const;

private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

/// Distance from p to segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Closed-set segment intersection test (touching and collinear overlap count).
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Signed area of a ring (positive counterclockwise). The ring is implicitly
/// closed; the first vertex is not repeated.
double polygon_signed_area(std::span<const Vec2> ring);

/// True when no two non-adjacent edges intersect and no edge degenerates.
bool polygon_is_simple(std::span<const Vec2> ring);

/// Point-in-polygon with boundary points counting as inside.
bool polygon_contains(std::span<const Vec2> ring, Vec2 q);

/// Overlap test between an oriented box and a simple polygon ring.
bool box_intersects_polygon(const OrientedBox& b, std::span<const Vec2> ring);

/// Distance from a box to a simple polygon region (0 when overlapping).
double box_polygon_distance(const OrientedBox& b, std::span<const Vec2> ring);

/// Sutherland-Hodgman clip of a convex subject by a convex CCW clip ring.
/// Returns the intersection polygon, possibly empty.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

}  // namespace driveaudit
