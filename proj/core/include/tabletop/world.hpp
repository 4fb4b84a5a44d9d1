#pragma once

#include <deque>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/params.hpp"
#include "tabletop/score_field.hpp"
#include "tabletop/workspace.hpp"

namespace tabletop {

struct RobotState {
  Position base = kRobotBase;
  Position gripper = kRobotBase;
  std::optional<BlockId> held;
  std::deque<BlockId> queue;  // allocation order
  std::set<BlockId> never_retry;
  int errors = 0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct HumanState {
  Position hand = kUserAnchor;
  std::optional<BlockId> held;

  friend bool operator==(const HumanState&, const HumanState&) = default;
};

// Single source of simulation truth: everything the event log determines.
struct WorldState {
  TaskConfig config;
  std::vector<Block> blocks;
  std::vector<GoalStructure> structures;
  RobotState robot;
  HumanState human;
  ScoreField field;
  Tick tick = 0;

  static WorldState from_scenario(const Scenario& scenario, const SimConfig& config);

  bool has_block(BlockId id) const { return id >= 1 && id <= static_cast<int>(blocks.size()); }
  Block& block(BlockId id) { return blocks.at(static_cast<std::size_t>(id - 1)); }
  const Block& block(BlockId id) const { return blocks.at(static_cast<std::size_t>(id - 1)); }
  bool has_structure(StructureId id) const { return id >= 0 && id < static_cast<int>(structures.size()); }
  GoalStructure& structure(StructureId id) { return structures.at(static_cast<std::size_t>(id)); }
  const GoalStructure& structure(StructureId id) const { return structures.at(static_cast<std::size_t>(id)); }

  int filled_slots() const;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

bool placement_legal(const WorldState& world, Actor actor, BlockId block, StructureId structure);
bool task_complete(const WorldState& world);

// Legal structure for the block nearest to `from`, lowest id on ties.
std::optional<StructureId> nearest_legal_structure(const WorldState& world, Actor actor, BlockId block,
                                                   Position from);

nlohmann::ordered_json to_json(const WorldState& world);

}  // namespace tabletop
