#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peck/arena.hpp"
#include "peck/ingest.hpp"
#include "peck/side.hpp"

namespace peck {

// Behavior knobs for the synthetic chick. Attraction is a drift toward the
// nearest point of the nearest matching zone, magnitude weight * step_sd.
struct BehaviorParams {
  double step_sd_mm = 15.0;  // random-walk scale per frame
  double attract_interface = 0.0;
  double attract_heat = 0.0;
  double attract_face = 0.0;
  double dwell_bias = 0.0;      // shrinks steps while inside a zone
  double onset_delay_s = 0.0;   // attraction inactive before this time
  double likelihood_base = 0.95;
  double burst_rate_per_s = 0.02;  // low-likelihood burst starts per second
  double burst_mean_len_s = 2.0;
  std::uint64_t seed = 1;
};

// Pixel corners the synthetic camera maps the arena corners to, in the
// calibrate() corner order. The pipeline recovers mm positions through the
// matching CalibrationTransform.
std::array<Vec2, 4> synth_pixel_corners(const ArenaLayout& layout);

// Zone-time fractions realized by the true mm path, before pixel and
// likelihood noise are added.
struct GroundTruth {
  std::string chick_id;
  Side start_side = Side::left;  // breathing schedule assigned to this chick
  long frames_total = 0;
  long frames_in_zone = 0;
  double p_interface = 0.0;
  std::optional<double> p_face;
  std::optional<double> p_heating;
  std::optional<double> p_breathing;
};

struct SynthChick {
  RawTrack track;
  GroundTruth truth;
};

// Biased random walk reflected at the arena walls, emitted as tracker output
// (pixels + per-frame likelihoods). Deterministic for a fixed seed.
SynthChick simulate_chick(const ArenaLayout& layout, const BehaviorParams& params,
                          double fps = 10.0, double session_len_s = 1800.0,
                          const std::string& chick_id = "chick",
                          Side start_side = Side::left);

struct SynthDataset {
  std::vector<SynthChick> chicks;
  std::array<Vec2, 4> pixel_corners;
};

// Per-chick seeds are base_seed + index, so adding chicks never perturbs
// existing ones. Start sides alternate (counterbalanced).
SynthDataset make_dataset(const ArenaLayout& layout, const BehaviorParams& shared,
                          int n_chicks, std::uint64_t base_seed, double fps = 10.0,
                          double session_len_s = 1800.0);

void write_ground_truth_csv(const std::vector<GroundTruth>& truth, const std::string& path);

}  // namespace peck
