#pragma once

#include <optional>
#include <string>
#include <vector>

#include "peck/arena.hpp"

namespace peck {

struct TrackedFrame {
  long index = 0;
  double x = 0.0;          // pixels
  double y = 0.0;          // pixels
  double likelihood = 0.0; // in [0,1]
};

// Single-keypoint track as exported by the pose tracker.
struct RawTrack {
  std::vector<TrackedFrame> frames;  // strictly increasing frame index
  double fps = 0.0;
  std::string keypoint;
  std::vector<std::string> keypoint_names;  // keypoints present in the source header
  long rejected_rows = 0;                   // data rows dropped as unparsable
};

struct QcReport {
  long total_frames = 0;
  long good_frames = 0;
  double good_fraction = 0.0;
  bool passed = false;
  double threshold_likelihood = 0.6;
  double min_fraction = 0.90;
};

// One slot per whole second; empty when no frame in the interval reached the
// likelihood threshold.
struct SlotSample {
  double x = 0.0;  // pixels
  double y = 0.0;
};
using SlotSeries = std::vector<std::optional<SlotSample>>;

struct TrajectorySample {
  double t = 0.0;  // seconds since session start
  double x = 0.0;  // mm
  double y = 0.0;  // mm
  bool interpolated = false;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // 1 Hz, t = 0,1,2,...
  std::string chick_id;
  double session_len = 0.0;  // seconds
  int max_gap_s = 0;         // longest run of empty slots that was filled
  int n_interpolated = 0;
  int n_clamped = 0;  // samples clamped onto the arena boundary
};

// Parse a tracking CSV (three header rows: scorer, bodyparts, coords) and
// extract the named keypoint. Data rows whose cells fail numeric parsing are
// dropped and counted in rejected_rows. Throws DataError for a missing file,
// malformed header, unknown keypoint, likelihood outside [0,1], or
// non-monotonic frame index.
RawTrack parse_tracking_csv(const std::string& path, const std::string& keypoint,
                            double fps);

// Retention rule: passed iff the fraction of frames with
// likelihood >= threshold_likelihood is >= min_fraction (both inclusive).
QcReport qc_check(const RawTrack& track, double threshold_likelihood = 0.6,
                  double min_fraction = 0.90);

// Highest-likelihood frame per one-second interval; ties go to the earliest
// frame. Slot count is ceil(session seconds) exactly.
SlotSeries downsample_1hz(const RawTrack& track, double threshold_likelihood = 0.6);

// Fill gaps (linear interpolation interior, nearest-valid extension at the
// edges), map pixels to mm, and clamp marginal excursions onto the arena
// rectangle. Excursions beyond clamp_tolerance_mm are an error.
Trajectory interpolate_gaps(const SlotSeries& slots, const CalibrationTransform& transform,
                            double arena_width_mm, double arena_height_mm,
                            const std::string& chick_id = "",
                            double clamp_tolerance_mm = 5.0);

// Serialize a RawTrack in the same CSV dialect parse_tracking_csv consumes.
// Doubles are printed shortest-round-trip, so parse(write(t)) == t.
void write_tracking_csv(const RawTrack& track, const std::string& path,
                        const std::string& scorer = "synthetic");

}  // namespace peck
