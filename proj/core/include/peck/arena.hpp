#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "peck/geometry.hpp"
#include "peck/side.hpp"

namespace peck {

// One stimulus contact zone on the arena floor. Coordinates are millimeters
// in the arena frame (origin at one corner, x across the long dimension).
struct Zone {
  std::string id;
  Polygon polygon;  // mm, simple, >= 3 vertices
  bool heated = false;
  bool has_face = false;
  std::optional<Side> breathing_group;
};

struct ArenaLayout {
  double width_mm = 900.0;
  double height_mm = 600.0;
  std::vector<Zone> zones;
  double breathing_period_s = 300.0;
  double session_len_s = 1800.0;
  std::string experiment_id;
};

// Affine pixel -> mm map fitted from corner correspondences.
struct CalibrationTransform {
  // mm = linear * pixel + offset
  std::array<double, 4> linear{1.0, 0.0, 0.0, 1.0};  // row-major a11 a12 a21 a22
  Vec2 offset{0.0, 0.0};
  double residual_mm = 0.0;  // RMS over the calibration points

  Vec2 apply(Vec2 pixel) const {
    return {linear[0] * pixel.x + linear[1] * pixel.y + offset.x,
            linear[2] * pixel.x + linear[3] * pixel.y + offset.y};
  }
};

enum class Metric { interface, face, heating, breathing };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);
inline constexpr std::array<Metric, 4> kAllMetrics{Metric::interface, Metric::face,
                                                   Metric::heating, Metric::breathing};

// Throws DataError when any layout invariant fails: non-positive arena,
// degenerate or self-intersecting zone polygons, zones outside the arena
// rectangle, or zones with overlapping interiors.
void validate_layout(const ArenaLayout& layout);

// Parse a layout document (JSON text, schema in the README). Validates.
ArenaLayout load_layout(const std::string& json_text);
ArenaLayout load_layout_file(const std::string& path);

// Built-in layouts "exp1a", "exp1b", "exp2", "exp3". In exp1b the faceplate
// sits on the left interface; sessions with the opposite assignment can load
// a flipped layout file instead.
ArenaLayout preset_layout(const std::string& name);
std::vector<std::string> preset_names();

// Resolve a --layout argument: preset name first, then a file path.
ArenaLayout resolve_layout(const std::string& name_or_path);

std::string layout_to_json(const ArenaLayout& layout);

// Least-squares affine fit from four pixel corners to the arena corners
// (0,0), (W,0), (W,H), (0,H) in that order. Throws DataError when the
// pixel corners are collinear.
CalibrationTransform calibrate(const std::array<Vec2, 4>& pixel_corners,
                               double width_mm, double height_mm);

// Boundary-inclusive even-odd membership.
bool point_in_zone(Vec2 p_mm, const Zone& zone);

// No-preference baseline for a metric: the zone-area fraction of the arena
// for the interface metric, 0.5 for the binary cue metrics.
double chance_level(const ArenaLayout& layout, Metric metric);

}  // namespace peck
