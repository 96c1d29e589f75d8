#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lanekit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Right-hand normal of a direction: points to the driving-direction right.
inline Vec2 right_normal(Vec2 dir) { return {dir.y, -dir.x}; }

// An ordered 2D point chain. Valid polylines have >= 2 points, finite
// coordinates, and no two consecutive points closer than 1e-9 m.
struct Polyline2D {
  std::vector<Vec2> points;

  Polyline2D() = default;
  Polyline2D(std::initializer_list<Vec2> pts) : points(pts) {}
  explicit Polyline2D(std::vector<Vec2> pts) : points(std::move(pts)) {}

  bool operator==(const Polyline2D&) const = default;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  Vec2& operator[](std::size_t i) { return points[i]; }
  const Vec2& operator[](std::size_t i) const { return points[i]; }
  Vec2 front() const { return points.front(); }
  Vec2 back() const { return points.back(); }

  double arc_length() const;
  Polyline2D reversed() const;

  // nullopt when the polyline satisfies its invariants, otherwise a
  // human-readable reason.
  std::optional<std::string> invariant_violation() const;
};

// Point at arc-length position s along p, clamped to [0, length].
Vec2 point_at_arc(const Polyline2D& p, double s);

// Unit direction of the segment containing arc position s.
Vec2 direction_at_arc(const Polyline2D& p, double s);

// n points at uniform arc-length positions along p. Endpoints are taken
// verbatim from the input. Throws DegenerateInput when the total length
// is zero, std::invalid_argument when n < 2.
Polyline2D resample_polyline(const Polyline2D& p, int n);

// Heading (radians) of the chord between consecutive points at the start
// resp. end of the polyline.
double start_heading(const Polyline2D& p);
double end_heading(const Polyline2D& p);

// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

// --- polygons ------------------------------------------------------------

// Shoelace signed area; positive for counterclockwise rings. The ring is
// implicitly closed (last->first edge).
double signed_area(const std::vector<Vec2>& ring);

// True when no two non-adjacent edges of the closed ring properly intersect.
bool is_simple_polygon(const std::vector<Vec2>& ring);

// Sutherland-Hodgman clip of `subject` against a convex `clip` ring given in
// counterclockwise order. Returns the (possibly empty) intersection ring.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject,
                              const std::vector<Vec2>& clip);

// Intersection-over-union of two rings. `b` must be convex; `a` may be any
// simple ring.
double polygon_iou(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// Minimal distance between two point chains (0 when they cross).
double polyline_distance(const Polyline2D& a, const Polyline2D& b);

// Minimal distance from a closed ring to a point chain (0 on overlap or
// containment).
double polygon_polyline_distance(const std::vector<Vec2>& ring,
                                 const Polyline2D& line);

// --- axis-aligned box clipping --------------------------------------------

// Clips p against the square [-half, half]^2. A polyline that leaves and
// re-enters the box yields multiple runs; exact border intersection points
// are inserted. Runs shorter than 2 distinct points are dropped.
std::vector<Polyline2D> clip_polyline_to_box(const Polyline2D& p, double half);

// The longest run of clip_polyline_to_box, or nullopt when p misses the box.
std::optional<Polyline2D> clip_polyline_to_box_single(const Polyline2D& p,
                                                      double half);

}  // namespace lanekit
