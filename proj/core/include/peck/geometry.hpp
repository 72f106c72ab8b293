#pragma once

#include <vector>

namespace peck {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

double dot(Vec2 a, Vec2 b);
double norm(Vec2 v);
double distance(Vec2 a, Vec2 b);

using Polygon = std::vector<Vec2>;

// Signed shoelace area; positive for counter-clockwise vertex order.
double polygon_signed_area(const Polygon& poly);

// Absolute shoelace area.
double polygon_area(const Polygon& poly);

// True if p lies on the closed segment [a,b] within tolerance tol.
bool point_on_segment(Vec2 p, Vec2 a, Vec2 b, double tol = 1e-9);

// Even-odd membership, boundary-inclusive: points on an edge count as inside.
bool point_in_polygon(Vec2 p, const Polygon& poly, double tol = 1e-9);

// Even-odd membership excluding the boundary.
bool point_strictly_inside(Vec2 p, const Polygon& poly, double tol = 1e-9);

// Nearest point of the closed polygonal region to p (p itself when inside).
Vec2 nearest_point_in_polygon(Vec2 p, const Polygon& poly);

// Nearest point on the polygon boundary to p.
Vec2 nearest_point_on_boundary(Vec2 p, const Polygon& poly);

// True if the polygon has >= 3 vertices, positive area, and no two
// non-adjacent edges intersect.
bool polygon_is_simple(const Polygon& poly);

// True if the interiors of two simple polygons intersect. Polygons that only
// touch along edges or vertices do not count as overlapping.
bool polygons_interiors_overlap(const Polygon& a, const Polygon& b);

}  // namespace peck
