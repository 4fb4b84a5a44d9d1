#include <doctest.h>

#include "support/oracles.hpp"
#include "tabletop/policies.hpp"

using namespace tabletop;

namespace {

WorldState world_with(std::vector<Position> positions) {
  WorldState w;
  w.field = ScoreField::make(SimConfig{});
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Block b;
    b.id = static_cast<int>(i) + 1;
    b.voice_label = b.id;
    b.color = Color::black;
    b.position = positions[i];
    w.blocks.push_back(b);
  }
  return w;
}

std::vector<TimedPosition> path(Position from, Position to, double seconds) {
  return {{0.0, from}, {seconds / 2, {(from.x + to.x) / 2, (from.y + to.y) / 2}}, {seconds, to}};
}

}  // namespace

TEST_CASE("implicit selectors match brute-force enumeration") {
  const auto s = testing::check_selection_oracles(1, 10000);
  INFO(s.first);
  CHECK(s.mismatches == 0);
  CHECK(s.cases == 10000);
  // The generator must produce informative worlds, not mostly empty ones.
  CHECK(s.nonempty > 8000);
}

TEST_CASE("voice allocation") {
  WorldState w = world_with({{0.2, 0.2}, {0.4, 0.4}, {0.6, 0.6}});
  const auto hit = voice_allocate(w, 3);
  REQUIRE(hit.decision);
  CHECK(*hit.decision == AllocationDecision{3, Assignment::robot});
  const auto miss = voice_allocate(w, 99);
  CHECK_FALSE(miss.decision);
  CHECK(miss.warning);

  // A never-retry block can still be named; the robot simply skips it later.
  w.robot.never_retry.insert(2);
  CHECK(voice_allocate(w, 2).decision);
  CHECK(distance_select(w, kRobotBase) == 3);
}

TEST_CASE("menu interaction requires the full dwell") {
  WorldState w = world_with({{0.2, 0.2}});
  CHECK(menu_interact(w, 1, 16, MenuChoice::to_robot, 16) == AllocationDecision{1, Assignment::robot});
  CHECK_FALSE(menu_interact(w, 1, 10, MenuChoice::to_robot, 16));
  w.block(1).assignment = Assignment::robot;
  CHECK(menu_interact(w, 1, 20, MenuChoice::cancel, 16) == AllocationDecision{1, Assignment::unassigned});
  CHECK(menu_interact(w, 1, 20, MenuChoice::to_self, 16) == AllocationDecision{1, Assignment::user});
  CHECK_FALSE(menu_interact(w, 7, 20, MenuChoice::to_robot, 16));
}

TEST_CASE("relocation gestures") {
  const PolicyParams p;
  CHECK(detect_relocation_gesture(path({0.5, 0.4}, {0.5, 0.6}, 0.6), p) == GestureResult::to_robot);
  CHECK(detect_relocation_gesture(path({0.5, 0.4}, {0.5, 0.25}, 0.6), p) == GestureResult::to_user);
  CHECK(detect_relocation_gesture(path({0.3, 0.4}, {0.5, 0.4}, 0.6), p) == GestureResult::none);
  // Too short, and too slow to fit the window.
  CHECK(detect_relocation_gesture(path({0.5, 0.4}, {0.5, 0.5}, 0.6), p) == GestureResult::none);
  const std::vector<TimedPosition> slow{{0.0, {0.5, 0.4}}, {1.5, {0.5, 0.5}}, {3.0, {0.5, 0.6}}};
  CHECK(detect_relocation_gesture(slow, p) == GestureResult::none);
  CHECK(detect_relocation_gesture(std::vector<TimedPosition>{{0.0, {0.5, 0.4}}}, p) == GestureResult::none);
}

TEST_CASE("fixed territories partition the table into three bands") {
  const PolicyParams p;
  CHECK(fixed_territory_owner({0.5, 0.9}, p) == Territory::robot);
  CHECK(fixed_territory_owner({0.5, 0.1}, p) == Territory::user);
  CHECK(fixed_territory_owner({0.5, 0.5}, p) == Territory::group);
  CHECK(fixed_territory_owner({0.5, 0.35}, p) == Territory::group);
  CHECK(fixed_territory_owner({0.5, 0.65}, p) == Territory::group);
  for (int i = 0; i <= 1000; ++i) {
    const double y = i / 1000.0;
    const Territory t = fixed_territory_owner({0.3, y}, p);
    const Territory expected = y < 0.35 ? Territory::user : y > 0.65 ? Territory::robot : Territory::group;
    CHECK(t == expected);
  }

  WorldState w = world_with({{0.3, 0.5}});
  CHECK(fixed_territory_on_release(w, 1, {0.4, 0.8}, p) == AllocationDecision{1, Assignment::robot});
  CHECK(fixed_territory_on_release(w, 1, {0.6, 0.2}, p) == AllocationDecision{1, Assignment::user});
  w.block(1).assignment = Assignment::robot;
  CHECK(fixed_territory_on_release(w, 1, {0.5, 0.5}, p) == AllocationDecision{1, Assignment::unassigned});
}

TEST_CASE("proactive and distance selection") {
  WorldState w = world_with({{0.5, 0.1}, {0.5, 0.85}, {0.9, 0.9}, {0.25, 0.5}, {0.75, 0.5}});
  CHECK(proactive_select(w, {0.5, 0.95}) == 2);
  // Blocks 4 and 5 are equidistant from a gripper on the midline.
  w.block(2).state = BlockState::placed;
  w.block(3).state = BlockState::placed;
  CHECK(proactive_select(w, {0.5, 0.5}) == 4);
  CHECK(distance_select(w, kRobotBase) == 4);
  // Dragging the far block next to the base makes it the pick.
  w.block(1).position = {0.5, 0.99};
  CHECK(distance_select(w, kRobotBase) == 1);
  for (auto& b : w.blocks) b.state = BlockState::placed;
  CHECK_FALSE(proactive_select(w, {0.5, 0.5}));
  CHECK_FALSE(distance_select(w, kRobotBase));
}

TEST_CASE("eligibility skips user blocks, held blocks and never-retry blocks") {
  WorldState w = world_with({{0.5, 0.9}, {0.5, 0.8}, {0.5, 0.7}, {0.5, 0.6}});
  w.block(1).assignment = Assignment::user;
  w.block(2).state = BlockState::held;
  w.robot.never_retry.insert(3);
  CHECK(distance_select(w, kRobotBase) == 4);
}

TEST_CASE("gaze selection avoids where the user looks") {
  WorldState w = world_with({{0.25, 0.5}, {0.75, 0.5}});
  CHECK(gaze_select(w, w.field.gaze, 0.15) == 1);
  for (int t = 0; t < 200; ++t) gaze_observe(w.field, Position{0.25, 0.5});
  CHECK(gaze_object_average(w.field.gaze, {0.25, 0.5}, 0.01) == 1.0);
  CHECK(gaze_select(w, w.field.gaze, 0.15) == 2);
}

TEST_CASE("gaze selection is invariant to a uniform scaling of the window") {
  // Doubling the window while doubling each exposure run halves every mean.
  WorldState a = world_with({{0.15, 0.15}, {0.55, 0.45}, {0.85, 0.75}, {0.35, 0.85}});
  WorldState b = a;
  SimConfig ca;
  ca.params.gaze_window_s = 2.0;
  SimConfig cb;
  cb.params.gaze_window_s = 4.0;
  a.field = ScoreField::make(ca);
  b.field = ScoreField::make(cb);
  const std::pair<Position, int> runs[] = {{{0.15, 0.15}, 12}, {{0.55, 0.45}, 7}, {{0.85, 0.75}, 3}, {{0.35, 0.85}, 9}};
  for (const auto& [p, n] : runs) {
    for (int t = 0; t < n; ++t) gaze_observe(a.field, p);
    for (int t = 0; t < n; ++t) gaze_observe(b.field, p);
  }
  for (int r = 0; r < 100; ++r) CHECK(b.field.gaze.mean(r) * 2.0 == a.field.gaze.mean(r));
  CHECK(gaze_select(a, a.field.gaze, 0.15) == gaze_select(b, b.field.gaze, 0.15));
  CHECK(gaze_select(a, a.field.gaze, 0.15) == 3);
}

TEST_CASE("proximity selection") {
  PolicyParams p;
  WorldState w = world_with({{0.25, 0.25}, {0.75, 0.75}, {0.75, 0.25}});
  // No scores anywhere: lowest user score, lowest id.
  CHECK(proximity_select(w, w.field.proximity, p) == 1);

  w.field.proximity.infuse(Actor::robot, {0.75, 0.75}, 0.15, 0);
  CHECK(proximity_select(w, w.field.proximity, p) == 2);

  WorldState u = world_with({{0.25, 0.25}, {0.75, 0.75}});
  u.field.proximity.infuse(Actor::user, {0.25, 0.25}, 0.15, 0);
  CHECK(proximity_select(u, u.field.proximity, p) == 2);
  u.field.proximity.infuse(Actor::user, {0.75, 0.75}, 0.15, 1);
  CHECK_FALSE(proximity_select(u, u.field.proximity, p));
}

TEST_CASE("policies expose their traits and territories") {
  for (const auto& t : kTechniques) {
    const auto policy = make_policy(t.kind);
    CHECK(policy->kind() == t.kind);
    CHECK(policy->traits().name == t.name);
    WorldState w = world_with({{0.5, 0.8}});
    const PolicyContext ctx{PolicyParams{}, kDefaultTickDuration};
    if (is_explicit(t.kind)) CHECK_FALSE(policy->select(w, ctx));
    if (!is_explicit(t.kind)) CHECK(policy->select(w, ctx) == 1);
    const auto territories = policy->territories(w, ctx);
    const bool has_map = t.kind == PolicyKind::fixed || t.kind == PolicyKind::gaze || t.kind == PolicyKind::proximity;
    CHECK(territories.size() == (has_map ? 100u : 0u));
  }
}
