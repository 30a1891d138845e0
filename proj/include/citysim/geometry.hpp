#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace citysim {

// Planar point in projected meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline Point lerp(Point a, Point b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

double polyline_length(std::span<const Point> pts);

// Point at arc-length `offset` along the polyline; clamps to the ends.
Point point_along(std::span<const Point> pts, double offset);

// Sub-polyline between two arc-length offsets. When `from > to` the returned
// points run backwards along the input.
std::vector<Point> sub_polyline(std::span<const Point> pts, double from, double to);

struct Projection {
  Point point;
  double offset = 0.0;    // arc length from the first vertex
  double distance = 0.0;  // from the query point
};

// Closest point on a polyline (perpendicular projection onto each segment).
Projection project_onto_polyline(std::span<const Point> pts, Point q);

// Even-odd ray casting. Points exactly on the boundary count as inside.
bool point_in_polygon(std::span<const Point> ring, Point p);

// True when no two non-adjacent edges of the closed ring touch or cross and
// the ring has at least three distinct vertices.
bool is_simple_polygon(std::span<const Point> ring);

bool segments_intersect(Point a, Point b, Point c, Point d);

// Equirectangular projection anchored at (lon0, lat0), in meters.
struct GeoAnchor {
  double lon0 = 0.0;
  double lat0 = 0.0;

  friend bool operator==(const GeoAnchor&, const GeoAnchor&) = default;
};

Point project_lonlat(const GeoAnchor& anchor, double lon, double lat);
void unproject(const GeoAnchor& anchor, Point p, double& lon, double& lat);

}  // namespace citysim
