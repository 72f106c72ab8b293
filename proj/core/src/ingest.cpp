#include "peck/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "peck/errors.hpp"

namespace peck {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool parse_double(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{}) return false;
  while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  return ptr == last && std::isfinite(out);
}

bool parse_long(const std::string& cell, long& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{}) return false;
  while (ptr != last && (*ptr == ' ' || *ptr == '\t')) ++ptr;
  return ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

RawTrack parse_tracking_csv(const std::string& path, const std::string& keypoint,
                            double fps) {
  if (!(fps > 0.0)) throw std::invalid_argument("parse_tracking_csv: fps must be positive");
  std::ifstream in(path);
  if (!in) throw DataError("missing file '" + path + "'");

  std::string scorer_line, parts_line, coords_line;
  if (!std::getline(in, scorer_line) || !std::getline(in, parts_line) ||
      !std::getline(in, coords_line)) {
    throw DataError("malformed header in '" + path + "': expected three header rows");
  }
  const auto parts = split_csv_line(strip_cr(parts_line));
  const auto coords = split_csv_line(strip_cr(coords_line));
  if (parts.size() < 4 || coords.size() != parts.size() || parts[0] != "bodyparts" ||
      coords[0] != "coords") {
    throw DataError("malformed header in '" + path + "'");
  }

  RawTrack track;
  track.fps = fps;
  track.keypoint = keypoint;

  // Locate the x column of the requested keypoint; its y and likelihood
  // columns must follow immediately.
  int x_col = -1;
  for (std::size_t c = 1; c < parts.size(); ++c) {
    if (std::find(track.keypoint_names.begin(), track.keypoint_names.end(), parts[c]) ==
        track.keypoint_names.end()) {
      track.keypoint_names.push_back(parts[c]);
    }
    if (parts[c] == keypoint && coords[c] == "x" && x_col < 0) {
      x_col = static_cast<int>(c);
    }
  }
  if (x_col < 0) throw DataError("unknown keypoint '" + keypoint + "' in '" + path + "'");
  const std::size_t xc = static_cast<std::size_t>(x_col);
  if (xc + 2 >= parts.size() || parts[xc + 1] != keypoint || parts[xc + 2] != keypoint ||
      coords[xc + 1] != "y" || coords[xc + 2] != "likelihood") {
    throw DataError("malformed header in '" + path + "': keypoint '" + keypoint +
                    "' lacks x,y,likelihood columns");
  }

  std::string line;
  long prev_index = -1;
  bool have_prev = false;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    TrackedFrame frame;
    if (cells.size() <= xc + 2 || !parse_long(cells[0], frame.index) ||
        !parse_double(cells[xc], frame.x) || !parse_double(cells[xc + 1], frame.y) ||
        !parse_double(cells[xc + 2], frame.likelihood)) {
      ++track.rejected_rows;
      continue;
    }
    if (frame.likelihood < 0.0 || frame.likelihood > 1.0) {
      std::ostringstream os;
      os << "likelihood outside [0,1] at frame " << frame.index << " in '" << path << "'";
      throw DataError(os.str());
    }
    if (have_prev && frame.index <= prev_index) {
      std::ostringstream os;
      os << "non-monotonic frame index at frame " << frame.index << " in '" << path << "'";
      throw DataError(os.str());
    }
    prev_index = frame.index;
    have_prev = true;
    track.frames.push_back(frame);
  }
  return track;
}

QcReport qc_check(const RawTrack& track, double threshold_likelihood, double min_fraction) {
  if (track.frames.empty()) throw DataError("qc_check: empty track");
  QcReport report;
  report.threshold_likelihood = threshold_likelihood;
  report.min_fraction = min_fraction;
  report.total_frames = static_cast<long>(track.frames.size());
  for (const TrackedFrame& f : track.frames) {
    if (f.likelihood >= threshold_likelihood) ++report.good_frames;
  }
  report.good_fraction =
      static_cast<double>(report.good_frames) / static_cast<double>(report.total_frames);
  report.passed = report.good_fraction >= min_fraction;
  return report;
}

SlotSeries downsample_1hz(const RawTrack& track, double threshold_likelihood) {
  if (track.frames.empty()) throw DataError("downsample_1hz: empty track");
  if (!(track.fps > 0.0)) throw std::invalid_argument("downsample_1hz: fps must be positive");

  const long last_index = track.frames.back().index;
  const double session_seconds = static_cast<double>(last_index + 1) / track.fps;
  const std::size_t n_slots = static_cast<std::size_t>(std::ceil(session_seconds));

  SlotSeries slots(n_slots);
  std::vector<double> best_likelihood(n_slots, -1.0);
  for (const TrackedFrame& f : track.frames) {
    const auto slot = static_cast<std::size_t>(
        std::floor(static_cast<double>(f.index) / track.fps));
    if (slot >= n_slots) continue;
    // strict > keeps the earliest frame on ties
    if (f.likelihood > best_likelihood[slot]) {
      best_likelihood[slot] = f.likelihood;
      slots[slot] = SlotSample{f.x, f.y};
    }
  }
  for (std::size_t k = 0; k < n_slots; ++k) {
    if (best_likelihood[k] < threshold_likelihood) slots[k].reset();
  }
  return slots;
}

Trajectory interpolate_gaps(const SlotSeries& slots, const CalibrationTransform& transform,
                            double arena_width_mm, double arena_height_mm,
                            const std::string& chick_id, double clamp_tolerance_mm) {
  const std::size_t n = slots.size();
  std::vector<std::size_t> filled;
  for (std::size_t k = 0; k < n; ++k) {
    if (slots[k]) filled.push_back(k);
  }
  if (filled.empty()) throw DataError("interpolate_gaps: all slots empty");

  Trajectory traj;
  traj.chick_id = chick_id;
  traj.session_len = static_cast<double>(n);
  traj.samples.resize(n);

  // Fill in pixel space first (affine maps commute with linear interpolation).
  std::vector<SlotSample> px(n);
  int gap_run = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (slots[k]) {
      px[k] = *slots[k];
      gap_run = 0;
      continue;
    }
    traj.samples[k].interpolated = true;
    ++traj.n_interpolated;
    ++gap_run;
    traj.max_gap_s = std::max(traj.max_gap_s, gap_run);

    const auto next_it = std::lower_bound(filled.begin(), filled.end(), k);
    if (next_it == filled.begin()) {
      px[k] = *slots[filled.front()];  // leading gap: nearest-valid extension
    } else if (next_it == filled.end()) {
      px[k] = *slots[filled.back()];  // trailing gap
    } else {
      const std::size_t hi = *next_it;
      const std::size_t lo = *(next_it - 1);
      const double w = static_cast<double>(k - lo) / static_cast<double>(hi - lo);
      px[k].x = slots[lo]->x + w * (slots[hi]->x - slots[lo]->x);
      px[k].y = slots[lo]->y + w * (slots[hi]->y - slots[lo]->y);
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 mm = transform.apply({px[k].x, px[k].y});
    double x = mm.x;
    double y = mm.y;
    const double over_x = std::max({0.0 - x, x - arena_width_mm, 0.0});
    const double over_y = std::max({0.0 - y, y - arena_height_mm, 0.0});
    if (over_x > clamp_tolerance_mm || over_y > clamp_tolerance_mm) {
      std::ostringstream os;
      os << "position (" << x << ", " << y << ") mm at t=" << k
         << " s lies more than " << clamp_tolerance_mm << " mm outside the arena";
      throw DataError(os.str());
    }
    if (over_x > 0.0 || over_y > 0.0) ++traj.n_clamped;
    traj.samples[k].t = static_cast<double>(k);
    traj.samples[k].x = std::clamp(x, 0.0, arena_width_mm);
    traj.samples[k].y = std::clamp(y, 0.0, arena_height_mm);
  }
  return traj;
}

void write_tracking_csv(const RawTrack& track, const std::string& path,
                        const std::string& scorer) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "scorer," << scorer << ',' << scorer << ',' << scorer << '\n';
  out << "bodyparts," << track.keypoint << ',' << track.keypoint << ',' << track.keypoint
      << '\n';
  out << "coords,x,y,likelihood\n";
  for (const TrackedFrame& f : track.frames) {
    out << f.index << ',' << format_double(f.x) << ',' << format_double(f.y) << ','
        << format_double(f.likelihood) << '\n';
  }
}

}  // namespace peck
