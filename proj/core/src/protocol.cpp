#include "peck/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "peck/errors.hpp"

namespace peck {

namespace {

long ticks_of(double seconds, double tick) {
  const double q = seconds / tick;
  const long n = std::lround(q);
  if (std::fabs(q - static_cast<double>(n)) > 1e-9 || n <= 0) return -1;
  return n;
}

int group_of(Side s) { return s == Side::left ? 0 : 1; }
int in_pump(int group) { return group == 0 ? kPumpInLeft : kPumpInRight; }
int out_pump(int group) { return group == 0 ? kPumpOutLeft : kPumpOutRight; }

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "idle";
    case Phase::inflating: return "inflating";
    case Phase::deflating: return "deflating";
    case Phase::switch_deflate: return "switch_deflate";
  }
  return "?";
}

void validate(const ProtocolConfig& cfg) {
  if (!(cfg.tick_s > 0.0)) throw DataError("protocol: tick must be positive");
  if (!(0.0 < cfg.p_min_psi && cfg.p_min_psi < cfg.p_max_psi)) {
    throw DataError("protocol: need 0 < p_min < p_max");
  }
  if (cfg.heat_setpoint_c + cfg.heat_tolerance_c > cfg.heat_cap_c + 1e-12) {
    throw DataError("protocol: heat setpoint + tolerance must not exceed the cap");
  }
  if (ticks_of(cfg.cycle_period_s, cfg.tick_s) < 0 ||
      ticks_of(cfg.cycle_period_s / 2.0, cfg.tick_s) < 0) {
    throw DataError("protocol: tick must divide the half actuation cycle");
  }
  if (ticks_of(cfg.side_period_s, cfg.tick_s) < 0) {
    throw DataError("protocol: tick must divide the side period");
  }
  if (!(cfg.session_len_s > 0.0)) throw DataError("protocol: session length must be positive");
  if (!(cfg.max_pump_on_s > 0.0)) throw DataError("protocol: max pump-on bound must be positive");
  if (!(cfg.plant_tau_s > 0.0) || !(cfg.thermal_tau_s > 0.0)) {
    throw DataError("protocol: time constants must be positive");
  }
  if (!(cfg.heater_target_c > cfg.heat_setpoint_c)) {
    throw DataError("protocol: heater target must exceed the setpoint");
  }
}

ControllerState initial_state(const ProtocolConfig& cfg, bool running) {
  validate(cfg);
  ControllerState st;
  st.running = running;
  st.active_side = cfg.start_side;
  st.phase = running ? Phase::inflating : Phase::idle;
  st.surface_temp_c = cfg.initial_temp_c;
  return st;
}

ControllerState step(const ControllerState& state, const ProtocolConfig& cfg) {
  const double dt = cfg.tick_s;
  const long side_ticks = ticks_of(cfg.side_period_s, dt);
  const long cycle_ticks = ticks_of(cfg.cycle_period_s, dt);
  const long half_cycle = cycle_ticks / 2;
  const double pressure_decay = std::exp(-dt / cfg.plant_tau_s);
  const double thermal_decay = std::exp(-dt / cfg.thermal_tau_s);

  ControllerState next = state;
  next.tick_index = state.tick_index + 1;
  next.t = static_cast<double>(next.tick_index) * dt;

  std::array<bool, 4> command{};
  bool active_floor_deflate = false;  // deflating half-cycle keeps p >= p_min

  if (next.running) {
    // Side schedule: the window containing the new time; transition instants
    // belong to the new side.
    const long window = next.tick_index / side_ticks;
    const Side sched_side = (window % 2 == 0) ? cfg.start_side : opposite(cfg.start_side);
    if (sched_side != next.active_side) {
      next.active_side = sched_side;
      next.phase = Phase::switch_deflate;
      next.cycle_tick = 0;
    }

    const int active_group = group_of(next.active_side);
    const int outgoing_group = 1 - active_group;

    if (next.phase == Phase::switch_deflate) {
      if (next.pressure_psi[outgoing_group] < kDeflatedPsi) {
        next.phase = Phase::inflating;
        next.cycle_tick = 0;
      } else {
        command[out_pump(outgoing_group)] = true;
      }
    }
    if (next.phase == Phase::inflating || next.phase == Phase::deflating) {
      const long pos = next.cycle_tick % cycle_ticks;
      const bool inflating = pos < half_cycle;
      next.phase = inflating ? Phase::inflating : Phase::deflating;
      if (inflating) {
        command[in_pump(active_group)] = true;
      } else if (next.pressure_psi[active_group] > cfg.p_min_psi + 1e-12) {
        command[out_pump(active_group)] = true;
        active_floor_deflate = true;
      }
      ++next.cycle_tick;
    }
  } else {
    next.phase = Phase::idle;
    // Stop command implies a safety release of any residual pressure.
    for (int g = 0; g < 2; ++g) {
      if (next.pressure_psi[g] >= kDeflatedPsi) command[out_pump(g)] = true;
    }
  }

  // Fail-safe: a pump may stay on for at most max_pump_on_s continuously.
  for (int pump = 0; pump < 4; ++pump) {
    if (!command[pump]) {
      next.pump_on[pump] = false;
      next.pump_on_elapsed_s[pump] = 0.0;
      next.pump_latched_off[pump] = false;
      continue;
    }
    if (next.pump_latched_off[pump]) {
      next.pump_on[pump] = false;
      continue;
    }
    const double would_be = next.pump_on_elapsed_s[pump] + dt;
    if (would_be > cfg.max_pump_on_s + 1e-9) {
      next.faults.push_back({next.t, pump, "pump-on time limit exceeded; pump forced off"});
      next.pump_latched_off[pump] = true;
      next.pump_on[pump] = false;
    } else {
      next.pump_on[pump] = true;
      next.pump_on_elapsed_s[pump] = would_be;
    }
  }

  // First-order pneumatic plant per group; a closed pouch holds pressure.
  for (int g = 0; g < 2; ++g) {
    double p = next.pressure_psi[g];
    if (next.pump_on[in_pump(g)]) {
      p = cfg.p_max_psi + (p - cfg.p_max_psi) * pressure_decay;
    } else if (next.pump_on[out_pump(g)]) {
      p *= pressure_decay;
      const bool is_active_cycle = next.running && next.phase == Phase::deflating &&
                                   g == group_of(next.active_side) && active_floor_deflate;
      if (is_active_cycle && p < cfg.p_min_psi) p = cfg.p_min_psi;
    }
    next.pressure_psi[g] = std::clamp(p, 0.0, cfg.p_max_psi);
  }

  // Bang-bang heater with a hysteresis band of width heat_tolerance around
  // the setpoint, hard-clamped below the cap.
  if (next.running) {
    if (next.surface_temp_c >= cfg.heat_setpoint_c + 0.5 * cfg.heat_tolerance_c) {
      next.heater_on = false;
    } else if (next.surface_temp_c <= cfg.heat_setpoint_c - 0.5 * cfg.heat_tolerance_c) {
      next.heater_on = true;
    }
  } else {
    next.heater_on = false;
  }
  const double target = next.heater_on ? cfg.heater_target_c : cfg.ambient_c;
  next.surface_temp_c = target + (next.surface_temp_c - target) * thermal_decay;
  if (next.surface_temp_c > cfg.heat_cap_c) {
    next.surface_temp_c = cfg.heat_cap_c;
    next.heater_on = false;
    next.faults.push_back({next.t, -1, "surface temperature clamped at the cap"});
  }

  return next;
}

SessionLog run_session(const ProtocolConfig& cfg, const CommandScript& script) {
  validate(cfg);
  CommandScript sorted = script;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Command& a, const Command& b) { return a.t < b.t; });

  SessionLog log;
  log.cfg = cfg;
  const long n_ticks = static_cast<long>(std::ceil(cfg.session_len_s / cfg.tick_s - 1e-9));
  log.ticks.reserve(n_ticks);

  ControllerState st = initial_state(cfg, script.empty());
  std::size_t next_cmd = 0;
  std::optional<Side> override_side;

  for (long k = 0; k < n_ticks; ++k) {
    while (next_cmd < sorted.size() && sorted[next_cmd].t <= st.t + 1e-12) {
      const Command& cmd = sorted[next_cmd++];
      switch (cmd.kind) {
        case Command::Kind::start:
          if (!st.running) {
            st.running = true;
            st.phase = Phase::inflating;
            st.cycle_tick = 0;
          }
          break;
        case Command::Kind::stop:
          st.running = false;
          st.phase = Phase::idle;
          break;
        case Command::Kind::side_override:
          override_side = cmd.side;
          break;
        case Command::Kind::side_auto:
          override_side.reset();
          break;
      }
    }

    TickRecord rec;
    rec.t = st.t;
    rec.side = st.active_side;
    rec.phase = st.phase;
    rec.pressure_psi = st.pressure_psi;
    rec.pump_on = st.pump_on;
    rec.surface_temp_c = st.surface_temp_c;
    rec.heater_on = st.heater_on;
    log.ticks.push_back(rec);

    if (override_side) {
      // Forced side enters through the same interlock path as the schedule.
      ProtocolConfig forced = cfg;
      forced.start_side = *override_side;
      forced.side_period_s = cfg.session_len_s + cfg.tick_s;  // hold until released
      // side period must stay tick-aligned
      forced.side_period_s = std::ceil(forced.side_period_s / cfg.tick_s) * cfg.tick_s;
      st = step(st, forced);
    } else {
      st = step(st, cfg);
    }
  }
  log.faults = st.faults;
  return log;
}

std::vector<Side> per_second_sides(const SessionLog& log) {
  std::vector<Side> sides;
  const double tick = log.cfg.tick_s;
  const long per_second = std::lround(1.0 / tick);
  for (std::size_t k = 0; k < log.ticks.size(); k += per_second) {
    sides.push_back(log.ticks[k].side);
  }
  return sides;
}

std::vector<SafetyViolation> check_safety(const SessionLog& log, const ProtocolConfig& cfg) {
  std::vector<SafetyViolation> out;
  const double eps = 1e-9;
  std::array<double, 4> on_run{};
  for (const TickRecord& rec : log.ticks) {
    for (int g = 0; g < 2; ++g) {
      if (rec.pressure_psi[g] < -eps || rec.pressure_psi[g] > cfg.p_max_psi + eps) {
        out.push_back({rec.t, "pressure outside [0, p_max] in group " + std::to_string(g)});
      }
      if (rec.pump_on[in_pump(g)] && rec.pump_on[out_pump(g)]) {
        out.push_back({rec.t, "in and out pumps co-activated in group " + std::to_string(g)});
      }
      // Deflate-before-switch: inflation only while the opposite group is
      // fully deflated.
      if (rec.pump_on[in_pump(g)] && rec.pressure_psi[1 - g] >= kDeflatedPsi + eps) {
        out.push_back({rec.t, "inflation while the opposite group is not deflated"});
      }
    }
    if (rec.surface_temp_c > cfg.heat_cap_c + eps) {
      out.push_back({rec.t, "surface temperature above the cap"});
    }
    for (int pump = 0; pump < 4; ++pump) {
      on_run[pump] = rec.pump_on[pump] ? on_run[pump] + cfg.tick_s : 0.0;
      if (on_run[pump] > cfg.max_pump_on_s + 0.5 * cfg.tick_s) {
        out.push_back({rec.t, "pump " + std::to_string(pump) + " on beyond the fail-safe bound"});
        on_run[pump] = 0.0;  // report each episode once
      }
    }
  }
  return out;
}

void write_session_log_csv(const SessionLog& log, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw DataError("cannot open '" + path + "' for writing");
  outf << "t,side,phase,p_left,p_right,pump_in_left,pump_out_left,pump_in_right,"
          "pump_out_right,temp,heater\n";
  char buf[256];
  for (const TickRecord& rec : log.ticks) {
    std::snprintf(buf, sizeof buf, "%.6f,%s,%s,%.9f,%.9f,%d,%d,%d,%d,%.6f,%d\n", rec.t,
                  to_string(rec.side).c_str(), to_string(rec.phase).c_str(),
                  rec.pressure_psi[0], rec.pressure_psi[1], rec.pump_on[0] ? 1 : 0,
                  rec.pump_on[1] ? 1 : 0, rec.pump_on[2] ? 1 : 0, rec.pump_on[3] ? 1 : 0,
                  rec.surface_temp_c, rec.heater_on ? 1 : 0);
    outf << buf;
  }
}

CommandScript load_command_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file '" + path + "'");
  CommandScript script;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string t_cell, kind_cell, side_cell;
    std::getline(ss, t_cell, ',');
    std::getline(ss, kind_cell, ',');
    std::getline(ss, side_cell, ',');
    Command cmd;
    try {
      cmd.t = std::stod(t_cell);
    } catch (const std::exception&) {
      throw DataError("command script: bad timestamp '" + t_cell + "'");
    }
    if (kind_cell == "start") {
      cmd.kind = Command::Kind::start;
    } else if (kind_cell == "stop") {
      cmd.kind = Command::Kind::stop;
    } else if (kind_cell == "side_override") {
      cmd.kind = Command::Kind::side_override;
      cmd.side = side_from_string(side_cell);
    } else if (kind_cell == "side_auto") {
      cmd.kind = Command::Kind::side_auto;
    } else {
      throw DataError("command script: unknown command '" + kind_cell + "'");
    }
    script.push_back(cmd);
  }
  return script;
}

}  // namespace peck
