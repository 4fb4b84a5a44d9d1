#include "tabletop/policies.hpp"

#include <cmath>
#include <numbers>

namespace tabletop {

namespace {

std::optional<AllocationDecision> change_to(const Block& b, Assignment a) {
  if (b.assignment == a) return std::nullopt;
  return AllocationDecision{b.id, a};
}

// Argmin over eligible blocks; strict comparison in id order breaks ties toward the lowest id.
template <typename Score>
std::optional<BlockId> argmin_eligible(const WorldState& world, Score&& score) {
  std::optional<BlockId> best;
  double best_score = 0.0;
  for (const auto& b : world.blocks) {
    if (!eligible_for_robot(world, b)) continue;
    const double s = score(b);
    if (!best || s < best_score) {
      best = b.id;
      best_score = s;
    }
  }
  return best;
}

}  // namespace

Interpretation voice_allocate(const WorldState& world, int label) {
  for (const auto& b : world.blocks) {
    if (b.voice_label != label) continue;
    if (!b.is_on_table()) return {std::nullopt, "voice label " + std::to_string(label) + " is not on the table"};
    return {change_to(b, Assignment::robot), std::nullopt};
  }
  return {std::nullopt, "unknown voice label " + std::to_string(label)};
}

std::optional<AllocationDecision> menu_interact(const WorldState& world, BlockId block, Tick dwell_ticks,
                                                MenuChoice choice, Tick dwell_threshold_ticks) {
  if (!world.has_block(block)) return std::nullopt;
  const Block& b = world.block(block);
  if (!b.is_on_table() || dwell_ticks < dwell_threshold_ticks) return std::nullopt;
  switch (choice) {
    case MenuChoice::to_robot: return change_to(b, Assignment::robot);
    case MenuChoice::to_self: return change_to(b, Assignment::user);
    case MenuChoice::cancel: return change_to(b, Assignment::unassigned);
  }
  return std::nullopt;
}

std::string_view to_string(GestureResult g) {
  switch (g) {
    case GestureResult::none: return "none";
    case GestureResult::to_robot: return "to_robot";
    case GestureResult::to_user: return "to_user";
  }
  return "?";
}

GestureResult detect_relocation_gesture(std::span<const TimedPosition> trajectory, const PolicyParams& params,
                                        Position user_pos, Position robot_pos) {
  if (trajectory.size() < 2) return GestureResult::none;
  const TimedPosition& last = trajectory.back();
  std::size_t first = 0;
  while (first + 1 < trajectory.size() && last.t_s - trajectory[first].t_s > params.gesture_window_s) ++first;
  const Position start = trajectory[first].position;
  const double dx = last.position.x - start.x;
  const double dy = last.position.y - start.y;
  const double len = std::hypot(dx, dy);
  if (len < params.gesture_min_displacement) return GestureResult::none;

  auto within_cone = [&](Position anchor) {
    const double ax = anchor.x - start.x;
    const double ay = anchor.y - start.y;
    const double alen = std::hypot(ax, ay);
    if (alen == 0.0) return false;
    const double cos_angle = std::clamp((dx * ax + dy * ay) / (len * alen), -1.0, 1.0);
    const double angle_deg = std::acos(cos_angle) * 180.0 / std::numbers::pi;
    return angle_deg <= params.gesture_cone_half_angle_deg + 1e-9;
  };
  if (within_cone(robot_pos)) return GestureResult::to_robot;
  if (within_cone(user_pos)) return GestureResult::to_user;
  return GestureResult::none;
}

Territory fixed_territory_owner(Position p, const PolicyParams& params) {
  if (p.y < params.fixed_user_band_max) return Territory::user;
  if (p.y > params.fixed_robot_band_min) return Territory::robot;
  return Territory::group;
}

std::optional<AllocationDecision> fixed_territory_on_release(const WorldState& world, BlockId block,
                                                             Position position, const PolicyParams& params) {
  if (!world.has_block(block)) return std::nullopt;
  const Block& b = world.block(block);
  if (b.state == BlockState::placed) return std::nullopt;
  switch (fixed_territory_owner(position, params)) {
    case Territory::robot: return change_to(b, Assignment::robot);
    case Territory::user: return change_to(b, Assignment::user);
    case Territory::group: return change_to(b, Assignment::unassigned);
  }
  return std::nullopt;
}

bool eligible_for_robot(const WorldState& world, const Block& block) {
  return block.is_on_table() && block.assignment != Assignment::user && !world.robot.never_retry.contains(block.id);
}

std::optional<BlockId> proactive_select(const WorldState& world, Position gripper) {
  return argmin_eligible(world, [&](const Block& b) { return distance(b.position, gripper); });
}

std::optional<BlockId> distance_select(const WorldState& world, Position base) {
  return argmin_eligible(world, [&](const Block& b) { return distance(b.position, base); });
}

double gaze_object_average(const GazeField& gaze, Position p, double radius) {
  const auto regions = regions_near(p, radius, gaze.grid());
  double sum = 0.0;
  for (int r : regions) sum += gaze.mean(r);
  return sum / static_cast<double>(regions.size());
}

std::optional<BlockId> gaze_select(const WorldState& world, const GazeField& gaze, double radius) {
  return argmin_eligible(world, [&](const Block& b) { return gaze_object_average(gaze, b.position, radius); });
}

ProximityScores proximity_object_scores(const ProximityField& field, Position p, double radius) {
  const auto regions = regions_near(p, radius, field.grid());
  ProximityScores s;
  for (int r : regions) {
    s.robot += field.score(Actor::robot, r);
    s.user += field.score(Actor::user, r);
  }
  s.robot /= static_cast<double>(regions.size());
  s.user /= static_cast<double>(regions.size());
  return s;
}

std::optional<BlockId> proximity_select(const WorldState& world, const ProximityField& field,
                                        const PolicyParams& params) {
  std::optional<BlockId> best_robot;
  double best_robot_score = 0.0;
  std::optional<BlockId> best_low_user;
  double best_user_score = 0.0;
  for (const auto& b : world.blocks) {
    if (!eligible_for_robot(world, b)) continue;
    const auto s = proximity_object_scores(field, b.position, params.infusion_radius);
    if (s.user > params.user_avoid_threshold) continue;
    if (s.robot > 0.0 && (!best_robot || s.robot > best_robot_score)) {
      best_robot = b.id;
      best_robot_score = s.robot;
    }
    if (!best_low_user || s.user < best_user_score) {
      best_low_user = b.id;
      best_user_score = s.user;
    }
  }
  return best_robot ? best_robot : best_low_user;
}

std::optional<BlockId> AllocationPolicy::select(const WorldState&, const PolicyContext&) const { return std::nullopt; }

Interpretation AllocationPolicy::interpret(const WorldState&, const UserSignal&, const PolicyContext&) const {
  return {};
}

std::vector<Territory> AllocationPolicy::territories(const WorldState&, const PolicyContext&) const { return {}; }

namespace {

class VoicePolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::voice; }
  Interpretation interpret(const WorldState& world, const UserSignal& signal, const PolicyContext&) const override {
    if (const auto* v = std::get_if<VoiceSignal>(&signal)) return voice_allocate(world, v->label);
    return {};
  }
};

class MenuPolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::menu; }
  Interpretation interpret(const WorldState& world, const UserSignal& signal, const PolicyContext& ctx) const override {
    if (const auto* m = std::get_if<MenuSignal>(&signal)) {
      const Tick threshold = seconds_to_ticks(ctx.params.menu_dwell_s, ctx.tick_duration);
      return {menu_interact(world, m->block, m->dwell_ticks, m->choice, threshold), std::nullopt};
    }
    return {};
  }
};

class SubtlePolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::subtle; }
  Interpretation interpret(const WorldState& world, const UserSignal& signal, const PolicyContext& ctx) const override {
    const auto* g = std::get_if<GestureSignal>(&signal);
    if (!g || !world.has_block(g->block) || world.block(g->block).state == BlockState::placed) return {};
    switch (detect_relocation_gesture(g->trajectory, ctx.params)) {
      case GestureResult::to_robot: return {change_to(world.block(g->block), Assignment::robot), std::nullopt};
      case GestureResult::to_user: return {change_to(world.block(g->block), Assignment::user), std::nullopt};
      case GestureResult::none: break;
    }
    return {};
  }
};

class FixedPolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::fixed; }
  Interpretation interpret(const WorldState& world, const UserSignal& signal, const PolicyContext& ctx) const override {
    if (const auto* r = std::get_if<ReleaseSignal>(&signal)) {
      return {fixed_territory_on_release(world, r->block, r->position, ctx.params), std::nullopt};
    }
    return {};
  }
  std::vector<Territory> territories(const WorldState& world, const PolicyContext& ctx) const override {
    const RegionGrid& grid = world.field.gaze.grid();
    std::vector<Territory> out(static_cast<std::size_t>(grid.size()));
    for (int r = 0; r < grid.size(); ++r) out[static_cast<std::size_t>(r)] = fixed_territory_owner(grid.center(r), ctx.params);
    return out;
  }
};

class ProactivePolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::proactive; }
  std::optional<BlockId> select(const WorldState& world, const PolicyContext&) const override {
    return proactive_select(world, world.robot.gripper);
  }
};

class DistancePolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::distance; }
  std::optional<BlockId> select(const WorldState& world, const PolicyContext&) const override {
    return distance_select(world, world.robot.base);
  }
};

class GazePolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::gaze; }
  std::optional<BlockId> select(const WorldState& world, const PolicyContext& ctx) const override {
    return gaze_select(world, world.field.gaze, ctx.params.infusion_radius);
  }
  std::vector<Territory> territories(const WorldState& world, const PolicyContext& ctx) const override {
    return territory_classify(world.field.gaze, ctx.params.heat_user_threshold, ctx.params.heat_robot_threshold);
  }
};

class ProximityPolicy final : public AllocationPolicy {
 public:
  PolicyKind kind() const override { return PolicyKind::proximity; }
  std::optional<BlockId> select(const WorldState& world, const PolicyContext& ctx) const override {
    return proximity_select(world, world.field.proximity, ctx.params);
  }
  std::vector<Territory> territories(const WorldState& world, const PolicyContext& ctx) const override {
    return territory_classify(world.field.proximity, ctx.params.heat_user_threshold, ctx.params.heat_robot_threshold);
  }
};

}  // namespace

std::unique_ptr<AllocationPolicy> make_policy(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::voice: return std::make_unique<VoicePolicy>();
    case PolicyKind::menu: return std::make_unique<MenuPolicy>();
    case PolicyKind::subtle: return std::make_unique<SubtlePolicy>();
    case PolicyKind::fixed: return std::make_unique<FixedPolicy>();
    case PolicyKind::proactive: return std::make_unique<ProactivePolicy>();
    case PolicyKind::distance: return std::make_unique<DistancePolicy>();
    case PolicyKind::gaze: return std::make_unique<GazePolicy>();
    case PolicyKind::proximity: return std::make_unique<ProximityPolicy>();
  }
  throw std::logic_error("unknown policy kind");
}

}  // namespace tabletop
