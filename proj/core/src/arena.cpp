#include "peck/arena.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "peck/errors.hpp"

namespace peck {

std::string to_string(Side s) { return s == Side::left ? "left" : "right"; }

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw DataError("unknown side '" + s + "' (expected left or right)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::interface: return "interface";
    case Metric::face: return "face";
    case Metric::heating: return "heating";
    case Metric::breathing: return "breathing";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == s) return m;
  }
  throw DataError("unknown metric '" + s + "'");
}

void validate_layout(const ArenaLayout& layout) {
  if (!(layout.width_mm > 0.0) || !(layout.height_mm > 0.0)) {
    throw DataError("arena dimensions must be positive");
  }
  if (!(layout.breathing_period_s > 0.0)) throw DataError("breathing_period_s must be positive");
  if (!(layout.session_len_s > 0.0)) throw DataError("session_len_s must be positive");
  const double tol = 1e-9;
  for (const Zone& z : layout.zones) {
    if (z.polygon.size() < 3) throw DataError("zone '" + z.id + "': polygon needs >= 3 vertices");
    if (!polygon_is_simple(z.polygon)) {
      throw DataError("zone '" + z.id + "': polygon is degenerate or self-intersecting");
    }
    for (const Vec2& v : z.polygon) {
      if (v.x < -tol || v.x > layout.width_mm + tol || v.y < -tol || v.y > layout.height_mm + tol) {
        std::ostringstream os;
        os << "zone '" << z.id << "': vertex (" << v.x << ", " << v.y
           << ") lies outside the arena rectangle";
        throw DataError(os.str());
      }
    }
  }
  for (std::size_t i = 0; i < layout.zones.size(); ++i) {
    for (std::size_t j = i + 1; j < layout.zones.size(); ++j) {
      if (layout.zones[i].id == layout.zones[j].id) {
        throw DataError("duplicate zone id '" + layout.zones[i].id + "'");
      }
      if (polygons_interiors_overlap(layout.zones[i].polygon, layout.zones[j].polygon)) {
        throw DataError("zones '" + layout.zones[i].id + "' and '" + layout.zones[j].id +
                        "' have overlapping interiors");
      }
    }
  }
}

namespace {

using nlohmann::json;

ArenaLayout layout_from_json(const json& doc) {
  ArenaLayout layout;
  try {
    const auto& arena = doc.at("arena");
    layout.width_mm = arena.at("width_mm").get<double>();
    layout.height_mm = arena.at("height_mm").get<double>();
    layout.breathing_period_s = doc.value("breathing_period_s", 300.0);
    layout.session_len_s = doc.value("session_len_s", 1800.0);
    layout.experiment_id = doc.value("experiment_id", std::string{});
    for (const auto& jz : doc.at("zones")) {
      Zone z;
      z.id = jz.at("id").get<std::string>();
      for (const auto& jv : jz.at("vertices_mm")) {
        if (!jv.is_array() || jv.size() != 2) {
          throw DataError("zone '" + z.id + "': each vertex must be [x, y]");
        }
        z.polygon.push_back({jv[0].get<double>(), jv[1].get<double>()});
      }
      z.heated = jz.value("heated", false);
      z.has_face = jz.value("has_face", false);
      if (jz.contains("breathing_group") && !jz["breathing_group"].is_null()) {
        z.breathing_group = side_from_string(jz["breathing_group"].get<std::string>());
      }
      layout.zones.push_back(std::move(z));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("layout document violates schema: ") + e.what());
  }
  validate_layout(layout);
  return layout;
}

}  // namespace

ArenaLayout load_layout(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw DataError("layout document is not valid JSON");
  return layout_from_json(doc);
}

ArenaLayout load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open layout file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_layout(buf.str());
}

std::string layout_to_json(const ArenaLayout& layout) {
  json doc;
  doc["arena"] = {{"width_mm", layout.width_mm}, {"height_mm", layout.height_mm}};
  doc["breathing_period_s"] = layout.breathing_period_s;
  doc["session_len_s"] = layout.session_len_s;
  doc["experiment_id"] = layout.experiment_id;
  doc["zones"] = json::array();
  for (const Zone& z : layout.zones) {
    json jz;
    jz["id"] = z.id;
    jz["vertices_mm"] = json::array();
    for (const Vec2& v : z.polygon) jz["vertices_mm"].push_back({v.x, v.y});
    jz["heated"] = z.heated;
    jz["has_face"] = z.has_face;
    if (z.breathing_group) {
      jz["breathing_group"] = to_string(*z.breathing_group);
    } else {
      jz["breathing_group"] = nullptr;
    }
    doc["zones"].push_back(std::move(jz));
  }
  return doc.dump(2) + "\n";
}

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
  return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

// Horizontal interface footprint: 200 mm along the wall, 100 mm deep.
constexpr double kPadAlong = 200.0;
constexpr double kPadDeep = 100.0;
constexpr double kArenaW = 900.0;
constexpr double kArenaH = 600.0;

ArenaLayout make_exp1(bool with_face) {
  ArenaLayout layout;
  layout.width_mm = kArenaW;
  layout.height_mm = kArenaH;
  layout.experiment_id = with_face ? "exp1b" : "exp1a";
  const double y0 = (kArenaH - kPadAlong) / 2.0;
  const double y1 = y0 + kPadAlong;
  Zone left{"left", rect(0.0, y0, kPadDeep, y1), false, false, Side::left};
  Zone right{"right", rect(kArenaW - kPadDeep, y0, kArenaW, y1), false, false, Side::right};
  if (with_face) left.has_face = true;
  layout.zones = {left, right};
  return layout;
}

ArenaLayout make_exp2() {
  ArenaLayout layout;
  layout.width_mm = kArenaW;
  layout.height_mm = kArenaH;
  layout.experiment_id = "exp2";
  // Four corner interfaces, long edge along the long walls; the heated pair
  // sits on one diagonal.
  Zone fl{"front_left", rect(0.0, 0.0, kPadAlong, kPadDeep), true, true, Side::left};
  Zone fr{"front_right", rect(kArenaW - kPadAlong, 0.0, kArenaW, kPadDeep), false, true, Side::right};
  Zone bl{"back_left", rect(0.0, kArenaH - kPadDeep, kPadAlong, kArenaH), false, true, Side::left};
  Zone br{"back_right", rect(kArenaW - kPadAlong, kArenaH - kPadDeep, kArenaW, kArenaH), true, true, Side::right};
  layout.zones = {fl, fr, bl, br};
  return layout;
}

ArenaLayout make_exp3() {
  ArenaLayout layout;
  layout.width_mm = kArenaW;
  layout.height_mm = kArenaH;
  layout.experiment_id = "exp3";
  // Contact region of a vertical interface: isoceles right triangle with the
  // hypotenuse on the wall, sized so the two triangles cover exactly 1.9% of
  // the floor (the published area ratio).
  const double hyp = std::sqrt(2.0 * 0.019 * kArenaW * kArenaH);
  const double cy = kArenaH / 2.0;
  Polygon left_tri{{0.0, cy - hyp / 2.0}, {hyp / 2.0, cy}, {0.0, cy + hyp / 2.0}};
  Polygon right_tri{{kArenaW, cy - hyp / 2.0}, {kArenaW, cy + hyp / 2.0}, {kArenaW - hyp / 2.0, cy}};
  Zone left{"left", left_tri, false, true, Side::left};
  Zone right{"right", right_tri, true, true, Side::right};
  layout.zones = {left, right};
  return layout;
}

}  // namespace

std::vector<std::string> preset_names() { return {"exp1a", "exp1b", "exp2", "exp3"}; }

ArenaLayout preset_layout(const std::string& name) {
  ArenaLayout layout;
  if (name == "exp1a") {
    layout = make_exp1(false);
  } else if (name == "exp1b") {
    layout = make_exp1(true);
  } else if (name == "exp2") {
    layout = make_exp2();
  } else if (name == "exp3") {
    layout = make_exp3();
  } else {
    throw DataError("unknown layout preset '" + name + "'");
  }
  validate_layout(layout);
  return layout;
}

ArenaLayout resolve_layout(const std::string& name_or_path) {
  for (const std::string& p : preset_names()) {
    if (p == name_or_path) return preset_layout(p);
  }
  return load_layout_file(name_or_path);
}

CalibrationTransform calibrate(const std::array<Vec2, 4>& pixel_corners,
                               double width_mm, double height_mm) {
  if (!(width_mm > 0.0) || !(height_mm > 0.0)) {
    throw DataError("calibrate: arena dimensions must be positive");
  }
  const std::array<Vec2, 4> mm_corners{Vec2{0.0, 0.0}, Vec2{width_mm, 0.0},
                                       Vec2{width_mm, height_mm}, Vec2{0.0, height_mm}};
  Eigen::Matrix<double, 4, 3> design;
  Eigen::Vector4d mx, my;
  for (int i = 0; i < 4; ++i) {
    design(i, 0) = pixel_corners[i].x;
    design(i, 1) = pixel_corners[i].y;
    design(i, 2) = 1.0;
    mx(i) = mm_corners[i].x;
    my(i) = mm_corners[i].y;
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 4, 3>> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw DataError("degenerate calibration: corners are collinear");
  const Eigen::Vector3d row_x = qr.solve(mx);
  const Eigen::Vector3d row_y = qr.solve(my);

  CalibrationTransform t;
  t.linear = {row_x(0), row_x(1), row_y(0), row_y(1)};
  t.offset = {row_x(2), row_y(2)};
  const double det = t.linear[0] * t.linear[3] - t.linear[1] * t.linear[2];
  if (std::fabs(det) < 1e-12) throw DataError("degenerate calibration: singular linear part");

  double ss = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Vec2 mapped = t.apply(pixel_corners[i]);
    const Vec2 diff = mapped - mm_corners[i];
    ss += dot(diff, diff);
  }
  t.residual_mm = std::sqrt(ss / 4.0);
  return t;
}

bool point_in_zone(Vec2 p_mm, const Zone& zone) { return point_in_polygon(p_mm, zone.polygon); }

double chance_level(const ArenaLayout& layout, Metric metric) {
  if (metric != Metric::interface) return 0.5;
  double zone_area = 0.0;
  for (const Zone& z : layout.zones) zone_area += polygon_area(z.polygon);
  return zone_area / (layout.width_mm * layout.height_mm);
}

}  // namespace peck
