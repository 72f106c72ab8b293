#include "peck/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace peck {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }
double distance(Vec2 a, Vec2 b) { return norm(a - b); }

double polygon_signed_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

double polygon_area(const Polygon& poly) { return std::fabs(polygon_signed_area(poly)); }

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation_sign(Vec2 o, Vec2 a, Vec2 b, double tol) {
  const double c = cross(o, a, b);
  if (c > tol) return 1;
  if (c < -tol) return -1;
  return 0;
}

bool in_box(Vec2 p, Vec2 a, Vec2 b, double tol) {
  return p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
         p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol;
}

// Segments share at least one point (touching endpoints included).
bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  const int d1 = orientation_sign(c, d, a, tol);
  const int d2 = orientation_sign(c, d, b, tol);
  const int d3 = orientation_sign(a, b, c, tol);
  const int d4 = orientation_sign(a, b, d, tol);
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
  if (d1 == 0 && in_box(a, c, d, tol)) return true;
  if (d2 == 0 && in_box(b, c, d, tol)) return true;
  if (d3 == 0 && in_box(c, a, b, tol)) return true;
  if (d4 == 0 && in_box(d, a, b, tol)) return true;
  return false;
}

// Interiors of the two segments cross at a single point.
bool segments_cross_properly(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  const int d1 = orientation_sign(c, d, a, tol);
  const int d2 = orientation_sign(c, d, b, tol);
  const int d3 = orientation_sign(a, b, c, tol);
  const int d4 = orientation_sign(a, b, d, tol);
  return d1 * d2 < 0 && d3 * d4 < 0;
}

Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

bool point_on_segment(Vec2 p, Vec2 a, Vec2 b, double tol) {
  if (!in_box(p, a, b, tol)) return false;
  const double seg = distance(a, b);
  if (seg == 0.0) return distance(p, a) <= tol;
  // perpendicular distance via the cross product
  return std::fabs(cross(a, b, p)) / seg <= tol;
}

bool point_in_polygon(Vec2 p, const Polygon& poly, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (point_on_segment(p, poly[i], poly[(i + 1) % n], tol)) return true;
  }
  // Even-odd ray crossing toward +x.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    const bool straddles = (a.y > p.y) != (b.y > p.y);
    if (straddles) {
      const double x_at = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_at) inside = !inside;
    }
  }
  return inside;
}

bool point_strictly_inside(Vec2 p, const Polygon& poly, double tol) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_on_segment(p, poly[i], poly[(i + 1) % n], tol)) return false;
  }
  return point_in_polygon(p, poly, tol);
}

Vec2 nearest_point_on_boundary(Vec2 p, const Polygon& poly) {
  Vec2 best = poly.front();
  double best_d = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 q = closest_point_on_segment(p, poly[i], poly[(i + 1) % n]);
    const double d = distance(p, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

Vec2 nearest_point_in_polygon(Vec2 p, const Polygon& poly) {
  if (point_in_polygon(p, poly)) return p;
  return nearest_point_on_boundary(p, poly);
}

bool polygon_is_simple(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  if (polygon_area(poly) <= 0.0) return false;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges (they share a vertex by construction)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const Vec2 c = poly[j];
      const Vec2 d = poly[(j + 1) % n];
      if (segments_touch(a, b, c, d, tol)) return false;
    }
  }
  return true;
}

bool polygons_interiors_overlap(const Polygon& a, const Polygon& b) {
  const double tol = 1e-9;
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (segments_cross_properly(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb], tol)) {
        return true;
      }
    }
  }
  auto any_strictly_inside = [&](const Polygon& pts, const Polygon& host) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (point_strictly_inside(pts[i], host, tol)) return true;
      const Vec2 mid = 0.5 * (pts[i] + pts[(i + 1) % n]);
      if (point_strictly_inside(mid, host, tol)) return true;
    }
    return false;
  };
  return any_strictly_inside(a, b) || any_strictly_inside(b, a);
}

}  // namespace peck
