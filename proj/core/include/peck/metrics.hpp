#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "peck/arena.hpp"
#include "peck/ingest.hpp"
#include "peck/side.hpp"

namespace peck {

// Which pouch group is in the breathing state at time t. The side alternates
// every period; transition instants belong to the new side (half-open
// intervals).
struct BreathingSchedule {
  Side start_side = Side::left;
  double period_s = 300.0;
  double session_len_s = 1800.0;

  Side active_side(double t) const {
    const long window = static_cast<long>(std::floor(t / period_s));
    return (window % 2 == 0) ? start_side : opposite(start_side);
  }
};

struct OccupancyRecord {
  double t = 0.0;
  std::optional<std::string> zone_id;
  bool on_face = false;
  bool on_heated = false;
  bool on_breathing = false;
  bool interpolated = false;
};

struct OccupancySeries {
  std::string chick_id;
  std::vector<OccupancyRecord> records;  // 1 Hz
};

struct BinPreference {
  int bin = 0;  // 1-based; 0 marks the session-level aggregate
  long seconds = 0;
  long in_zone_seconds = 0;
  std::optional<double> p_interface;
  std::optional<double> p_face;
  std::optional<double> p_heating;
  std::optional<double> p_breathing;
  bool truncated = false;

  std::optional<double> value(Metric m) const {
    switch (m) {
      case Metric::interface: return p_interface;
      case Metric::face: return p_face;
      case Metric::heating: return p_heating;
      case Metric::breathing: return p_breathing;
    }
    return std::nullopt;
  }
};

struct PreferenceSeries {
  std::string chick_id;
  std::vector<BinPreference> bins;
  BinPreference session;
  double chance_interface = 0.0;

  double chance(Metric m) const { return m == Metric::interface ? chance_interface : 0.5; }
};

// Label every second of a trajectory with its containing zone and the
// stimulus flags in force at that second.
OccupancySeries zone_occupancy(const Trajectory& traj, const ArenaLayout& layout,
                               const BreathingSchedule& sched);

struct PreferenceOptions {
  double bin_len_s = 300.0;
  // The published pipeline interpolates and then analyzes; excluding
  // interpolated seconds is a sensitivity option.
  bool include_interpolated = true;
};

// Per-bin and session-level preference metrics. The conditional metrics
// (face/heating/breathing) are absent, not zero, in bins without interface
// contact.
PreferenceSeries compute_preferences(const OccupancySeries& occ, const ArenaLayout& layout,
                                     const PreferenceOptions& opts = {});

}  // namespace peck
