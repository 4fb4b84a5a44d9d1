#include "tabletop/params.hpp"

#include <stdexcept>
#include <string>

namespace tabletop {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

template <typename T>
void maybe_read(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

}  // namespace

void validate(const PolicyParams& p) {
  require_positive(p.gaze_window_s, "gaze_window_s");
  require_positive(p.infusion_radius, "infusion_radius");
  require_positive(p.infusion_amplitude, "infusion_amplitude");
  require_positive(p.decay_half_life_s, "decay_half_life_s");
  require_positive(p.user_avoid_threshold, "user_avoid_threshold");
  require_positive(p.gesture_min_displacement, "gesture_min_displacement");
  require_positive(p.gesture_window_s, "gesture_window_s");
  require_positive(p.gesture_cone_half_angle_deg, "gesture_cone_half_angle_deg");
  require_positive(p.menu_dwell_s, "menu_dwell_s");
  require_positive(p.heat_user_threshold, "heat_user_threshold");
  require_positive(p.heat_robot_threshold, "heat_robot_threshold");
  require_positive(p.voice_utterance_s, "voice_utterance_s");
  if (p.gesture_cone_half_angle_deg >= 180.0) throw std::invalid_argument("gesture_cone_half_angle_deg must be < 180");
  if (!(p.fixed_user_band_max > kTableMin && p.fixed_user_band_max <= p.fixed_robot_band_min &&
        p.fixed_robot_band_min < kTableMax)) {
    throw std::invalid_argument("fixed territory bands must partition the table: 0 < user_max <= robot_min < 1");
  }
  if (p.grid_rows <= 0 || p.grid_cols <= 0) throw std::invalid_argument("grid dimensions must be positive");
}

nlohmann::ordered_json to_json(const PolicyParams& p) {
  return {{"gaze_window_s", p.gaze_window_s},
          {"infusion_radius", p.infusion_radius},
          {"infusion_amplitude", p.infusion_amplitude},
          {"decay_half_life_s", p.decay_half_life_s},
          {"user_avoid_threshold", p.user_avoid_threshold},
          {"gesture_min_displacement", p.gesture_min_displacement},
          {"gesture_window_s", p.gesture_window_s},
          {"gesture_cone_half_angle_deg", p.gesture_cone_half_angle_deg},
          {"menu_dwell_s", p.menu_dwell_s},
          {"fixed_user_band_max", p.fixed_user_band_max},
          {"fixed_robot_band_min", p.fixed_robot_band_min},
          {"heat_user_threshold", p.heat_user_threshold},
          {"heat_robot_threshold", p.heat_robot_threshold},
          {"voice_utterance_s", p.voice_utterance_s},
          {"grid_rows", p.grid_rows},
          {"grid_cols", p.grid_cols}};
}

PolicyParams policy_params_from_json(const nlohmann::json& j, PolicyParams p) {
  maybe_read(j, "gaze_window_s", p.gaze_window_s);
  maybe_read(j, "infusion_radius", p.infusion_radius);
  maybe_read(j, "infusion_amplitude", p.infusion_amplitude);
  maybe_read(j, "decay_half_life_s", p.decay_half_life_s);
  maybe_read(j, "user_avoid_threshold", p.user_avoid_threshold);
  maybe_read(j, "gesture_min_displacement", p.gesture_min_displacement);
  maybe_read(j, "gesture_window_s", p.gesture_window_s);
  maybe_read(j, "gesture_cone_half_angle_deg", p.gesture_cone_half_angle_deg);
  maybe_read(j, "menu_dwell_s", p.menu_dwell_s);
  maybe_read(j, "fixed_user_band_max", p.fixed_user_band_max);
  maybe_read(j, "fixed_robot_band_min", p.fixed_robot_band_min);
  maybe_read(j, "heat_user_threshold", p.heat_user_threshold);
  maybe_read(j, "heat_robot_threshold", p.heat_robot_threshold);
  maybe_read(j, "voice_utterance_s", p.voice_utterance_s);
  maybe_read(j, "grid_rows", p.grid_rows);
  maybe_read(j, "grid_cols", p.grid_cols);
  validate(p);
  return p;
}

void validate(const MotionModel& m) {
  require_positive(m.reach_speed, "reach_speed");
  require_positive(m.pick_duration_s, "pick_duration_s");
  require_positive(m.place_duration_s, "place_duration_s");
  if (!(m.black_pick_success > 0.0 && m.black_pick_success <= 1.0)) {
    throw std::invalid_argument("black_pick_success must be in (0, 1]");
  }
}

nlohmann::ordered_json to_json(const MotionModel& m) {
  return {{"reach_speed", m.reach_speed},
          {"pick_duration_s", m.pick_duration_s},
          {"place_duration_s", m.place_duration_s},
          {"black_pick_success", m.black_pick_success}};
}

MotionModel motion_model_from_json(const nlohmann::json& j, MotionModel m) {
  maybe_read(j, "reach_speed", m.reach_speed);
  maybe_read(j, "pick_duration_s", m.pick_duration_s);
  maybe_read(j, "place_duration_s", m.place_duration_s);
  maybe_read(j, "black_pick_success", m.black_pick_success);
  validate(m);
  return m;
}

void validate(const SimConfig& c) {
  require_positive(c.tick_duration, "tick_duration");
  require_positive(c.grasp_radius, "grasp_radius");
  validate(c.params);
  validate(c.robot_motion);
  validate(c.human_motion);
}

nlohmann::ordered_json to_json(const SimConfig& c) {
  return {{"tick_duration", c.tick_duration},
          {"grasp_radius", c.grasp_radius},
          {"params", to_json(c.params)},
          {"robot_motion", to_json(c.robot_motion)},
          {"human_motion", to_json(c.human_motion)}};
}

SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig c) {
  maybe_read(j, "tick_duration", c.tick_duration);
  maybe_read(j, "grasp_radius", c.grasp_radius);
  if (auto it = j.find("params"); it != j.end()) c.params = policy_params_from_json(*it, c.params);
  if (auto it = j.find("robot_motion"); it != j.end()) c.robot_motion = motion_model_from_json(*it, c.robot_motion);
  if (auto it = j.find("human_motion"); it != j.end()) c.human_motion = motion_model_from_json(*it, c.human_motion);
  validate(c);
  return c;
}

}  // namespace tabletop
