#include "tabletop/world.hpp"

#include <algorithm>

namespace tabletop {

WorldState WorldState::from_scenario(const Scenario& scenario, const SimConfig& config) {
  WorldState w;
  w.config = scenario.config;
  w.blocks = scenario.blocks;
  w.structures = scenario.structures;
  w.field = ScoreField::make(config);
  return w;
}

int WorldState::filled_slots() const {
  int n = 0;
  for (const auto& s : structures) n += s.filled;
  return n;
}

bool placement_legal(const WorldState& world, Actor actor, BlockId block, StructureId structure) {
  if (!world.has_block(block) || !world.has_structure(structure)) return false;
  return placement_legal(actor, world.block(block), world.structure(structure));
}

bool task_complete(const WorldState& world) { return task_complete(world.structures); }

std::optional<StructureId> nearest_legal_structure(const WorldState& world, Actor actor, BlockId block,
                                                   Position from) {
  std::optional<StructureId> best;
  double best_d = 0.0;
  for (const auto& s : world.structures) {
    if (!placement_legal(actor, world.block(block), s)) continue;
    const double d = distance(from, s.base);
    if (!best || d < best_d) {
      best = s.id;
      best_d = d;
    }
  }
  return best;
}

nlohmann::ordered_json to_json(const WorldState& world) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : world.blocks) blocks.push_back(to_json(b));
  nlohmann::ordered_json structures = nlohmann::ordered_json::array();
  for (const auto& s : world.structures) structures.push_back(to_json(s));

  nlohmann::ordered_json robot;
  robot["gripper"] = to_json(world.robot.gripper);
  robot["held"] = world.robot.held ? nlohmann::ordered_json(*world.robot.held) : nlohmann::ordered_json(nullptr);
  robot["queue"] = std::vector<BlockId>(world.robot.queue.begin(), world.robot.queue.end());
  robot["never_retry"] = std::vector<BlockId>(world.robot.never_retry.begin(), world.robot.never_retry.end());
  robot["errors"] = world.robot.errors;

  nlohmann::ordered_json human;
  human["hand"] = to_json(world.human.hand);
  human["held"] = world.human.held ? nlohmann::ordered_json(*world.human.held) : nlohmann::ordered_json(nullptr);

  return {{"tick", world.tick}, {"blocks", blocks}, {"structures", structures}, {"robot", robot}, {"human", human}};
}

}  // namespace tabletop
