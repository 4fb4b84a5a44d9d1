#pragma once

#include <optional>

#include "tabletop/events.hpp"
#include "tabletop/params.hpp"
#include "tabletop/policies.hpp"
#include "tabletop/rng.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// Ticks to travel between two points: ceil(distance / speed / tick), 0 when
// the points coincide.
Tick motion_duration(Position from, Position to, const MotionModel& model, double tick_duration);

struct RobotIntent {
  enum class Kind { idle, reach, pick, place };
  Kind kind = Kind::idle;
  std::optional<BlockId> block;
  std::optional<StructureId> structure;
  Position to;     // gripper position when the action ends
  Tick duration = 0;
  bool selected = false;  // block chosen by an implicit heuristic; not yet allocated
};

// The first queued block the robot may act on: on the table, not in the
// never-retry set, and still allocated to the robot.
std::optional<BlockId> actionable_queue_front(const WorldState& world);

// Next robot action given an action-free robot.
RobotIntent robot_decide(const WorldState& world, const AllocationPolicy& policy, const SimConfig& config);

// Outcome of closing the gripper on `block`. Draws from `rng` only for the
// black-block success roll.
PickResult attempt_pick(const WorldState& world, BlockId block, DeterministicRng& rng, const SimConfig& config);

}  // namespace tabletop
