#pragma once

#include <array>
#include <string>
#include <vector>

#include "peck/side.hpp"

namespace peck {

// Discrete-time model of the interface controller: two pouch groups with an
// inflation and a deflation pump each, a bang-bang heater, the 5-minute side
// alternation, and the safety interlocks.
struct ProtocolConfig {
  double cycle_period_s = 1.5;
  double p_min_psi = 0.1;
  double p_max_psi = 0.5;
  double side_period_s = 300.0;
  double session_len_s = 1800.0;
  double max_pump_on_s = 5.0;  // fail-safe bound on continuous pump activity
  double heat_setpoint_c = 33.0;
  double heat_tolerance_c = 1.0;
  double heat_cap_c = 35.0;
  double ambient_c = 28.5;
  double initial_temp_c = 33.0;  // pad pre-warmed before the session
  double tick_s = 0.05;
  double plant_tau_s = 0.2;    // first-order pneumatic time constant
  double thermal_tau_s = 30.0; // first-order thermal time constant
  double heater_target_c = 36.0;
  Side start_side = Side::left;
};

// Throws DataError when the configuration violates its invariants
// (0 < p_min < p_max, setpoint + tolerance <= cap, tick divides the half
// cycle and the side period, positive durations).
void validate(const ProtocolConfig& cfg);

enum class Phase { idle, inflating, deflating, switch_deflate };
std::string to_string(Phase phase);

// Pump indices: in/out pumps of the left group, then of the right group.
inline constexpr int kPumpInLeft = 0;
inline constexpr int kPumpOutLeft = 1;
inline constexpr int kPumpInRight = 2;
inline constexpr int kPumpOutRight = 3;
inline constexpr double kDeflatedPsi = 0.01;  // "full deflation" threshold

struct FaultRecord {
  double t = 0.0;
  int pump = -1;
  std::string what;
};

struct ControllerState {
  long tick_index = 0;
  double t = 0.0;
  bool running = false;
  Side active_side = Side::left;
  Phase phase = Phase::idle;
  std::array<bool, 4> pump_on{};
  std::array<double, 2> pressure_psi{};  // left, right group
  std::array<double, 4> pump_on_elapsed_s{};
  std::array<bool, 4> pump_latched_off{};  // fail-safe latch per on-episode
  double surface_temp_c = 33.0;
  bool heater_on = false;
  long cycle_tick = 0;  // ticks since the current window started actuating
  std::vector<FaultRecord> faults;
};

ControllerState initial_state(const ProtocolConfig& cfg, bool running = true);

// Advance one tick. Faults (fail-safe trips, thermal clamps) are recorded in
// the returned state, never thrown.
ControllerState step(const ControllerState& state, const ProtocolConfig& cfg);

struct TickRecord {
  double t = 0.0;
  Side side = Side::left;
  Phase phase = Phase::idle;
  std::array<double, 2> pressure_psi{};
  std::array<bool, 4> pump_on{};
  double surface_temp_c = 0.0;
  bool heater_on = false;
};

// Timestamped external commands (the IR remote abstraction).
struct Command {
  double t = 0.0;
  enum class Kind { start, stop, side_override, side_auto } kind = Kind::start;
  Side side = Side::left;  // for side_override
};
using CommandScript = std::vector<Command>;

struct SessionLog {
  ProtocolConfig cfg;
  std::vector<TickRecord> ticks;
  std::vector<FaultRecord> faults;
};

// Deterministic simulation of a whole session. With an empty script the
// controller starts at t = 0 and follows the side schedule.
SessionLog run_session(const ProtocolConfig& cfg, const CommandScript& script = {});

// Active side sampled at integer seconds; index s covers [s, s+1).
std::vector<Side> per_second_sides(const SessionLog& log);

struct SafetyViolation {
  double t = 0.0;
  std::string what;
};

// Re-checks every controller invariant over a logged session: pressure
// bounds, pump co-activation, the deflate-before-switch interlock, the
// pump-on fail-safe bound, and the thermal cap.
std::vector<SafetyViolation> check_safety(const SessionLog& log, const ProtocolConfig& cfg);

void write_session_log_csv(const SessionLog& log, const std::string& path);

// Parse a command-injection script: CSV lines "t,command[,side]" where
// command is start|stop|side_override|side_auto.
CommandScript load_command_script(const std::string& path);

}  // namespace peck
