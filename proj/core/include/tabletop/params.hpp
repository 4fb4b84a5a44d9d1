#pragma once

#include <cmath>
#include <cstdint>

#include <nlohmann/json.hpp>

#include "tabletop/types.hpp"
#include "tabletop/workspace.hpp"

namespace tabletop {

inline constexpr double kDefaultTickDuration = 0.05;

// Converts a span in seconds to a whole number of ticks, rounding to nearest.
inline Tick seconds_to_ticks(double seconds, double tick_duration) {
  return static_cast<Tick>(std::llround(seconds / tick_duration));
}

// Tunables of the allocation techniques. Every field is overridable from a
// plan or config file.
struct PolicyParams {
  double gaze_window_s = 5.0;
  double infusion_radius = 0.15;
  double infusion_amplitude = 1.0;
  double decay_half_life_s = 10.0;
  double user_avoid_threshold = 0.5;
  double gesture_min_displacement = 0.15;
  double gesture_window_s = 1.0;
  double gesture_cone_half_angle_deg = 45.0;
  double menu_dwell_s = 0.8;
  double fixed_user_band_max = 0.35;   // y below this is the user's territory
  double fixed_robot_band_min = 0.65;  // y above this is the robot's territory
  double heat_user_threshold = 0.3;
  double heat_robot_threshold = 0.3;
  double voice_utterance_s = 0.5;
  int grid_rows = 10;
  int grid_cols = 10;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

// Throws std::invalid_argument naming the first bad field.
void validate(const PolicyParams& p);

nlohmann::ordered_json to_json(const PolicyParams& p);
// Starts from `base` and overrides whatever fields j carries.
PolicyParams policy_params_from_json(const nlohmann::json& j, PolicyParams base = {});

struct MotionModel {
  double reach_speed = 0.25;  // m/s
  double pick_duration_s = 1.0;
  double place_duration_s = 1.0;
  double black_pick_success = 0.95;

  friend bool operator==(const MotionModel&, const MotionModel&) = default;
};

void validate(const MotionModel& m);
nlohmann::ordered_json to_json(const MotionModel& m);
MotionModel motion_model_from_json(const nlohmann::json& j, MotionModel base = {});

// The human moves at twice the robot's speed with half its pick/place time.
inline MotionModel default_human_motion() { return {0.5, 0.5, 0.5, 1.0}; }

struct SimConfig {
  double tick_duration = kDefaultTickDuration;
  PolicyParams params;
  MotionModel robot_motion;
  MotionModel human_motion = default_human_motion();
  double grasp_radius = kBlockRadius;

  RegionGrid grid() const { return RegionGrid(params.grid_rows, params.grid_cols); }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

void validate(const SimConfig& c);
nlohmann::ordered_json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base = {});

}  // namespace tabletop
