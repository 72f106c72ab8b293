#include "peck/metrics.hpp"

#include <cmath>

#include "peck/errors.hpp"

namespace peck {

OccupancySeries zone_occupancy(const Trajectory& traj, const ArenaLayout& layout,
                               const BreathingSchedule& sched) {
  if (traj.samples.empty()) throw DataError("zone_occupancy: empty trajectory");
  if (std::fabs(sched.session_len_s - traj.session_len) > 0.5) {
    throw DataError("zone_occupancy: schedule and trajectory session lengths differ");
  }
  OccupancySeries occ;
  occ.chick_id = traj.chick_id;
  occ.records.reserve(traj.samples.size());
  for (const TrajectorySample& s : traj.samples) {
    OccupancyRecord rec;
    rec.t = s.t;
    rec.interpolated = s.interpolated;
    const Vec2 p{s.x, s.y};
    for (const Zone& z : layout.zones) {
      if (point_in_zone(p, z)) {
        rec.zone_id = z.id;
        rec.on_face = z.has_face;
        rec.on_heated = z.heated;
        rec.on_breathing = z.breathing_group && *z.breathing_group == sched.active_side(s.t);
        break;  // zones have disjoint interiors; first match wins on shared edges
      }
    }
    occ.records.push_back(std::move(rec));
  }
  return occ;
}

namespace {

struct Tally {
  long seconds = 0;
  long in_zone = 0;
  long on_face = 0;
  long on_heated = 0;
  long on_breathing = 0;

  void add(const OccupancyRecord& rec) {
    ++seconds;
    if (rec.zone_id) {
      ++in_zone;
      if (rec.on_face) ++on_face;
      if (rec.on_heated) ++on_heated;
      if (rec.on_breathing) ++on_breathing;
    }
  }

  BinPreference to_preference(int bin) const {
    BinPreference p;
    p.bin = bin;
    p.seconds = seconds;
    p.in_zone_seconds = in_zone;
    if (seconds > 0) {
      p.p_interface = static_cast<double>(in_zone) / static_cast<double>(seconds);
    }
    if (in_zone > 0) {
      p.p_face = static_cast<double>(on_face) / static_cast<double>(in_zone);
      p.p_heating = static_cast<double>(on_heated) / static_cast<double>(in_zone);
      p.p_breathing = static_cast<double>(on_breathing) / static_cast<double>(in_zone);
    }
    return p;
  }
};

}  // namespace

PreferenceSeries compute_preferences(const OccupancySeries& occ, const ArenaLayout& layout,
                                     const PreferenceOptions& opts) {
  if (occ.records.empty()) throw DataError("compute_preferences: empty occupancy");
  if (!(opts.bin_len_s > 0.0)) throw std::invalid_argument("bin_len_s must be positive");

  const long bin_len = static_cast<long>(std::llround(opts.bin_len_s));
  const long session_seconds = static_cast<long>(occ.records.size());
  const int n_bins = static_cast<int>((session_seconds + bin_len - 1) / bin_len);

  std::vector<Tally> bin_tallies(n_bins);
  Tally session_tally;
  for (const OccupancyRecord& rec : occ.records) {
    if (!opts.include_interpolated && rec.interpolated) continue;
    const int bin = static_cast<int>(static_cast<long>(rec.t) / bin_len);
    bin_tallies[bin].add(rec);
    session_tally.add(rec);
  }

  PreferenceSeries series;
  series.chick_id = occ.chick_id;
  series.chance_interface = chance_level(layout, Metric::interface);
  for (int b = 0; b < n_bins; ++b) {
    BinPreference p = bin_tallies[b].to_preference(b + 1);
    // A final bin shorter than bin_len covers a truncated session tail.
    p.truncated = (b == n_bins - 1) && (session_seconds % bin_len != 0);
    series.bins.push_back(p);
  }
  series.session = session_tally.to_preference(0);
  series.session.truncated = session_seconds % bin_len != 0;
  return series;
}

}  // namespace peck
