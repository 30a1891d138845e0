#include "citysim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace citysim {
namespace {

constexpr double kEarthRadiusM = 6371008.8;
constexpr double kOnSegmentEps = 1e-9;

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point a, Point b, Point p) {
  const double len = distance(a, b);
  const double scale = std::max(1.0, len);
  if (std::abs(cross(a, b, p)) > kOnSegmentEps * scale * scale) return false;
  return p.x >= std::min(a.x, b.x) - kOnSegmentEps && p.x <= std::max(a.x, b.x) + kOnSegmentEps &&
         p.y >= std::min(a.y, b.y) - kOnSegmentEps && p.y <= std::max(a.y, b.y) + kOnSegmentEps;
}

int sign(double v) { return (v > 0) - (v < 0); }

// Drops a trailing vertex that repeats the first one.
std::span<const Point> open_ring(std::span<const Point> ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) return ring.first(ring.size() - 1);
  return ring;
}

}  // namespace

double polyline_length(std::span<const Point> pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += distance(pts[i - 1], pts[i]);
  return total;
}

Point point_along(std::span<const Point> pts, double offset) {
  if (pts.empty()) return {};
  if (offset <= 0.0) return pts.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double seg = distance(pts[i - 1], pts[i]);
    if (acc + seg >= offset) {
      if (seg == 0.0) return pts[i];
      return lerp(pts[i - 1], pts[i], (offset - acc) / seg);
    }
    acc += seg;
  }
  return pts.back();
}

std::vector<Point> sub_polyline(std::span<const Point> pts, double from, double to) {
  std::vector<Point> out;
  if (pts.empty()) return out;
  const bool reversed = from > to;
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  out.push_back(point_along(pts, lo));
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    acc += distance(pts[i - 1], pts[i]);
    if (acc > lo && acc < hi) out.push_back(pts[i]);
  }
  out.push_back(point_along(pts, hi));
  if (reversed) std::reverse(out.begin(), out.end());
  return out;
}

Projection project_onto_polyline(std::span<const Point> pts, Point q) {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (pts.empty()) return best;
  if (pts.size() == 1) return {pts.front(), 0.0, distance(pts.front(), q)};
  double acc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Point a = pts[i - 1];
    const Point b = pts[i];
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / len2, 0.0, 1.0);
    const Point p = lerp(a, b, t);
    const double d = distance(p, q);
    const double seg = std::sqrt(len2);
    // Strict comparison keeps the earliest segment on ties.
    if (d < best.distance) best = {p, acc + t * seg, d};
    acc += seg;
  }
  return best;
}

bool point_in_polygon(std::span<const Point> ring_in, Point p) {
  const auto ring = open_ring(ring_in);
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(ring[i], ring[(i + 1) % n], p)) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = ring[i];
    const Point b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const int d1 = sign(cross(c, d, a));
  const int d2 = sign(cross(c, d, b));
  const int d3 = sign(cross(a, b, c));
  const int d4 = sign(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && on_segment(c, d, a)) || (d2 == 0 && on_segment(c, d, b)) ||
         (d3 == 0 && on_segment(a, b, c)) || (d4 == 0 && on_segment(a, b, d));
}

bool is_simple_polygon(std::span<const Point> ring_in) {
  const auto ring = open_ring(ring_in);
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ring[i] == ring[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = ring[j];
      const Point d = ring[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex is fine; a collinear fold-back is not.
        const Point other_first = (j == i + 1) ? a : b;
        const Point other_second = (j == i + 1) ? d : c;
        if (on_segment(c, d, other_first) || on_segment(a, b, other_second)) return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  // Degenerate (zero-area) rings are not simple polygons.
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross({0, 0}, ring[i], ring[(i + 1) % n]);
  return std::abs(area2) > 0.0;
}

Point project_lonlat(const GeoAnchor& anchor, double lon, double lat) {
  constexpr double deg = std::numbers::pi / 180.0;
  return {kEarthRadiusM * (lon - anchor.lon0) * deg * std::cos(anchor.lat0 * deg),
          kEarthRadiusM * (lat - anchor.lat0) * deg};
}

void unproject(const GeoAnchor& anchor, Point p, double& lon, double& lat) {
  constexpr double deg = std::numbers::pi / 180.0;
  lat = anchor.lat0 + p.y / kEarthRadiusM / deg;
  lon = anchor.lon0 + p.x / (kEarthRadiusM * std::cos(anchor.lat0 * deg)) / deg;
}

}  // namespace citysim
