#include "peck/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "peck/errors.hpp"
#include "peck/metrics.hpp"
#include "peck/rng.hpp"

namespace peck {

namespace {

double reflect_into(double v, double lo, double hi) {
  // fold until inside; steps are small so this rarely loops more than once
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return v;
}

// Drift of unit magnitude toward the nearest zone satisfying pred; zero when
// already inside one.
template <typename Pred>
Vec2 attraction_direction(Vec2 pos, const ArenaLayout& layout, Pred pred) {
  double best_d = std::numeric_limits<double>::infinity();
  Vec2 best_target{};
  bool found = false;
  for (const Zone& z : layout.zones) {
    if (!pred(z)) continue;
    if (point_in_zone(pos, z)) return {0.0, 0.0};
    const Vec2 q = nearest_point_on_boundary(pos, z.polygon);
    const double d = distance(pos, q);
    if (d < best_d) {
      best_d = d;
      best_target = q;
      found = true;
    }
  }
  if (!found || best_d < 1e-9) return {0.0, 0.0};
  return (1.0 / best_d) * (best_target - pos);
}

}  // namespace

std::array<Vec2, 4> synth_pixel_corners(const ArenaLayout& layout) {
  // Fixed synthetic camera: 1.2 px/mm with a 100 px horizontal offset.
  const double s = 1.2;
  const Vec2 off{100.0, 0.0};
  const double w = layout.width_mm, h = layout.height_mm;
  return {Vec2{off.x, off.y}, Vec2{off.x + s * w, off.y}, Vec2{off.x + s * w, off.y + s * h},
          Vec2{off.x, off.y + s * h}};
}

SynthChick simulate_chick(const ArenaLayout& layout, const BehaviorParams& params,
                          double fps, double session_len_s, const std::string& chick_id,
                          Side start_side) {
  validate_layout(layout);
  if (!(params.step_sd_mm > 0.0)) throw std::invalid_argument("step_sd_mm must be positive");
  if (params.attract_interface < 0.0 || params.attract_heat < 0.0 ||
      params.attract_face < 0.0 || params.dwell_bias < 0.0) {
    throw std::invalid_argument("attraction weights must be >= 0");
  }

  Rng rng(params.seed);
  const long n_frames = static_cast<long>(std::llround(session_len_s * fps));
  const double dt = 1.0 / fps;

  // Camera model: mm -> pixel.
  const double cam_scale = 1.2;
  const Vec2 cam_off{100.0, 0.0};

  SynthChick out;
  out.track.fps = fps;
  out.track.keypoint = "center";
  out.track.keypoint_names = {"center"};
  out.track.frames.reserve(n_frames);
  out.truth.chick_id = chick_id;
  out.truth.start_side = start_side;

  const BreathingSchedule sched{start_side, layout.breathing_period_s, session_len_s};

  Vec2 pos{layout.width_mm / 2.0, layout.height_mm / 2.0};
  long burst_left = 0;
  long in_zone = 0, on_face = 0, on_heat = 0, on_breath = 0;

  for (long f = 0; f < n_frames; ++f) {
    const double t = static_cast<double>(f) * dt;

    // Ground truth from the true mm position.
    for (const Zone& z : layout.zones) {
      if (point_in_zone(pos, z)) {
        ++in_zone;
        if (z.has_face) ++on_face;
        if (z.heated) ++on_heat;
        if (z.breathing_group && *z.breathing_group == sched.active_side(t)) ++on_breath;
        break;
      }
    }

    // Emission: pixel coordinates with bounded tracker jitter plus a
    // likelihood stream with occasional low-confidence bursts.
    const double jx = std::clamp(0.6 * rng.normal(), -2.4, 2.4);
    const double jy = std::clamp(0.6 * rng.normal(), -2.4, 2.4);
    double likelihood;
    if (burst_left > 0) {
      --burst_left;
      likelihood = rng.uniform(0.05, 0.55);
    } else {
      likelihood = std::min(params.likelihood_base + rng.uniform(-0.03, 0.04), 0.999);
      if (rng.uniform() < params.burst_rate_per_s * dt) {
        burst_left = 1 + static_cast<long>(std::floor(
                             -params.burst_mean_len_s * fps * std::log(1.0 - rng.uniform())));
      }
    }
    TrackedFrame frame;
    frame.index = f;
    frame.x = cam_off.x + cam_scale * pos.x + jx;
    frame.y = cam_off.y + cam_scale * pos.y + jy;
    frame.likelihood = likelihood;
    out.track.frames.push_back(frame);

    // Walk update.
    bool inside_any = false;
    for (const Zone& z : layout.zones) {
      if (point_in_zone(pos, z)) {
        inside_any = true;
        break;
      }
    }
    Vec2 drift{0.0, 0.0};
    if (t >= params.onset_delay_s) {
      if (params.attract_interface > 0.0) {
        drift = drift + (params.attract_interface * params.step_sd_mm) *
                            attraction_direction(pos, layout, [](const Zone&) { return true; });
      }
      if (params.attract_heat > 0.0) {
        drift = drift + (params.attract_heat * params.step_sd_mm) *
                            attraction_direction(pos, layout,
                                                 [](const Zone& z) { return z.heated; });
      }
      if (params.attract_face > 0.0) {
        drift = drift + (params.attract_face * params.step_sd_mm) *
                            attraction_direction(pos, layout,
                                                 [](const Zone& z) { return z.has_face; });
      }
    }
    const double noise_scale =
        inside_any ? params.step_sd_mm / (1.0 + params.dwell_bias) : params.step_sd_mm;
    pos.x = reflect_into(pos.x + drift.x + noise_scale * rng.normal(), 0.0, layout.width_mm);
    pos.y = reflect_into(pos.y + drift.y + noise_scale * rng.normal(), 0.0, layout.height_mm);
  }

  out.truth.frames_total = n_frames;
  out.truth.frames_in_zone = in_zone;
  out.truth.p_interface = static_cast<double>(in_zone) / static_cast<double>(n_frames);
  if (in_zone > 0) {
    out.truth.p_face = static_cast<double>(on_face) / static_cast<double>(in_zone);
    out.truth.p_heating = static_cast<double>(on_heat) / static_cast<double>(in_zone);
    out.truth.p_breathing = static_cast<double>(on_breath) / static_cast<double>(in_zone);
  }
  return out;
}

SynthDataset make_dataset(const ArenaLayout& layout, const BehaviorParams& shared,
                          int n_chicks, std::uint64_t base_seed, double fps,
                          double session_len_s) {
  if (n_chicks < 1) throw std::invalid_argument("make_dataset: n_chicks must be >= 1");
  SynthDataset ds;
  ds.pixel_corners = synth_pixel_corners(layout);
  for (int i = 0; i < n_chicks; ++i) {
    BehaviorParams p = shared;
    p.seed = base_seed + static_cast<std::uint64_t>(i);
    char name[32];
    std::snprintf(name, sizeof name, "chick_%02d", i + 1);
    const Side start = (i % 2 == 0) ? Side::left : Side::right;
    ds.chicks.push_back(simulate_chick(layout, p, fps, session_len_s, name, start));
  }
  return ds;
}

void write_ground_truth_csv(const std::vector<GroundTruth>& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "chick_id,start_side,frames_total,frames_in_zone,p_interface,p_face,p_heating,"
         "p_breathing\n";
  char buf[256];
  for (const GroundTruth& gt : truth) {
    auto opt = [](const std::optional<double>& v) {
      if (!v) return std::string{};
      char b[32];
      std::snprintf(b, sizeof b, "%.9f", *v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%s,%s,%ld,%ld,%.9f,", gt.chick_id.c_str(),
                  to_string(gt.start_side).c_str(), gt.frames_total, gt.frames_in_zone,
                  gt.p_interface);
    out << buf << opt(gt.p_face) << ',' << opt(gt.p_heating) << ',' << opt(gt.p_breathing)
        << '\n';
  }
}

}  // namespace peck
