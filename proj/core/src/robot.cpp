#include "tabletop/robot.hpp"

#include <cmath>

namespace tabletop {

Tick motion_duration(Position from, Position to, const MotionModel& model, double tick_duration) {
  const double d = distance(from, to);
  if (d == 0.0) return 0;
  // The epsilon keeps exact multiples such as 2 s / 0.05 s from rounding up.
  return static_cast<Tick>(std::ceil(d / model.reach_speed / tick_duration - 1e-9));
}

std::optional<BlockId> actionable_queue_front(const WorldState& world) {
  for (BlockId id : world.robot.queue) {
    if (!world.has_block(id)) continue;
    const Block& b = world.block(id);
    if (b.is_on_table() && b.assignment == Assignment::robot && !world.robot.never_retry.contains(id)) return id;
  }
  return std::nullopt;
}

namespace {

RobotIntent approach(const WorldState& world, BlockId id, const SimConfig& config, bool selected) {
  const Block& b = world.block(id);
  RobotIntent intent;
  intent.block = id;
  intent.selected = selected;
  if (distance(world.robot.gripper, b.position) <= config.grasp_radius) {
    intent.kind = RobotIntent::Kind::pick;
    intent.to = world.robot.gripper;
    intent.duration = seconds_to_ticks(config.robot_motion.pick_duration_s, config.tick_duration);
  } else {
    intent.kind = RobotIntent::Kind::reach;
    intent.to = b.position;
    intent.duration = motion_duration(world.robot.gripper, b.position, config.robot_motion, config.tick_duration);
  }
  return intent;
}

}  // namespace

RobotIntent robot_decide(const WorldState& world, const AllocationPolicy& policy, const SimConfig& config) {
  const RobotState& robot = world.robot;
  if (robot.held) {
    const auto s = nearest_legal_structure(world, Actor::robot, *robot.held, robot.gripper);
    if (!s) return {};
    const Position base = world.structure(*s).base;
    RobotIntent intent;
    intent.kind = RobotIntent::Kind::place;
    intent.block = robot.held;
    intent.structure = s;
    intent.to = base;
    intent.duration = motion_duration(robot.gripper, base, config.robot_motion, config.tick_duration) +
                      seconds_to_ticks(config.robot_motion.place_duration_s, config.tick_duration);
    return intent;
  }
  if (const auto front = actionable_queue_front(world)) return approach(world, *front, config, false);
  if (policy.traits().technique_class == TechniqueClass::implicit) {
    const PolicyContext ctx{config.params, config.tick_duration};
    if (const auto pick = policy.select(world, ctx)) return approach(world, *pick, config, true);
  }
  return {};
}

PickResult attempt_pick(const WorldState& world, BlockId block, DeterministicRng& rng, const SimConfig& config) {
  if (!world.has_block(block)) return PickResult::aborted;
  const Block& b = world.block(block);
  if (!b.is_on_table() || b.assignment == Assignment::user ||
      distance(world.robot.gripper, b.position) > config.grasp_radius) {
    return PickResult::aborted;
  }
  if (b.color == Color::yellow) return PickResult::fail_yellow;
  return rng.bernoulli(config.robot_motion.black_pick_success) ? PickResult::success : PickResult::fail_random;
}

}  // namespace tabletop
