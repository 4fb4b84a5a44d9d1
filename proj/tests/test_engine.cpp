#include <doctest.h>

#include <sstream>

#include "support/properties.hpp"
#include "tabletop/engine.hpp"

using namespace tabletop;
using namespace tabletop::testing;

namespace {

const std::vector<LoggedTrial>& corpus() {
  static const std::vector<LoggedTrial> trials = property_corpus(3);
  return trials;
}

Scenario scenario(TaskType type = TaskType::coupled, Placement placement = Placement::scattered, std::uint64_t seed = 1) {
  return generate_scenario({type, placement, seed, kDefaultBlockCount});
}

}  // namespace

TEST_CASE("trials are deterministic and replayable") {
  const auto r = check_determinism(8);
  INFO(r.detail);
  CHECK(r.pass);
  CHECK(r.checked == 64);
}

TEST_CASE("task rules hold on every technique, task, placement and model") {
  const auto r = check_task_rules(corpus());
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("concurrent activity is bounded by each actor's activity") {
  const auto r = check_concurrency_bound(corpus());
  INFO(r.detail);
  CHECK(r.pass);
}

TEST_CASE("every scripted trial completes within the tick limit") {
  for (const auto& t : corpus()) {
    INFO(log_file_name(t.cell));
    CHECK(t.result.completed);
    CHECK(t.result.final_world.filled_slots() == kDefaultBlockCount);
  }
}

TEST_CASE("one holder per block and monotone progress at every tick") {
  for (PolicyKind kind : {PolicyKind::voice, PolicyKind::subtle, PolicyKind::gaze, PolicyKind::proximity}) {
    ScriptedHuman human(HumanModel{HumanModelKind::guardian});
    Engine engine(scenario(TaskType::coupled, Placement::scattered, 4), SimConfig{}, kind, human, kDefaultTickLimit);
    int filled = 0;
    while (!engine.done()) {
      engine.step();
      const WorldState& w = engine.world();
      int robot_held = 0;
      int user_held = 0;
      for (const auto& b : w.blocks) {
        robot_held += b.held_by(Actor::robot);
        user_held += b.held_by(Actor::user);
      }
      REQUIRE(robot_held <= 1);
      REQUIRE(user_held <= 1);
      REQUIRE(robot_held == (w.robot.held ? 1 : 0));
      REQUIRE(w.filled_slots() >= filled);
      filled = w.filled_slots();
    }
    CHECK(engine.result().completed);
  }
}

TEST_CASE("the tick limit ends a trial as incomplete") {
  ScriptedHuman human(HumanModel{});
  auto [result, log] = run_trial(scenario(), SimConfig{}, PolicyKind::distance, human, 1);
  CHECK_FALSE(result.completed);
  CHECK(result.ticks == 1);
  const auto ends = log.all<EndEvent>();
  REQUIRE(ends.size() == 1);
  CHECK(ends[0] == EndEvent{1, false});
  CHECK(std::holds_alternative<EndEvent>(log.events.back()));
  CHECK_FALSE(fluency_report(log).completed);
}

TEST_CASE("the log header records the trial configuration") {
  ScriptedHuman human(HumanModel{HumanModelKind::eager_manager});
  auto [result, log] = run_trial(scenario(TaskType::decoupled, Placement::sorted, 9), SimConfig{}, PolicyKind::menu,
                                 human, kDefaultTickLimit);
  CHECK(log.header.engine_version == kEngineVersion);
  CHECK(log.header.technique == PolicyKind::menu);
  CHECK(log.header.human_model == "eager_manager");
  CHECK(log.header.scenario == scenario(TaskType::decoupled, Placement::sorted, 9));
  const std::string text = to_jsonl(log);
  std::istringstream lines(text);
  std::string first;
  std::getline(lines, first);
  CHECK(nlohmann::json::parse(first).at("engine_version") == std::string(kEngineVersion));
  std::size_t count = 0;
  for (std::string line; std::getline(lines, line);) {
    CHECK_NOTHROW(event_from_json(nlohmann::json::parse(line)));
    ++count;
  }
  CHECK(count == log.events.size());
}

TEST_CASE("replay rejects a tampered log") {
  ScriptedHuman human(HumanModel{});
  auto [result, log] = run_trial(scenario(), SimConfig{}, PolicyKind::voice, human, kDefaultTickLimit);
  EventLog bad = log;
  for (auto& e : bad.events) {
    if (auto* p = std::get_if<PlacementEvent>(&e); p && p->actor == Actor::robot) {
      p->structure = (p->structure + 1) % kStructureCount;
      break;
    }
  }
  CHECK_THROWS_AS(replay(bad.header.scenario, bad), ReplayError);
  CHECK_NOTHROW(replay(log.header.scenario, log));
}

TEST_CASE("live inputs are applied at their tick and re-simulate identically") {
  InputDrivenHuman human;
  const Scenario s = scenario();
  Engine engine(s, SimConfig{}, PolicyKind::voice, human, kDefaultTickLimit);
  BlockId black = 0;
  for (const auto& b : s.blocks) {
    if (b.color == Color::black) {
      black = b.id;
      break;
    }
  }
  REQUIRE(black != 0);
  for (int i = 0; i < 5; ++i) engine.step();
  UserInput voice;
  voice.kind = UserInput::Kind::voice;
  voice.seq = 1;
  voice.label = s.blocks[static_cast<std::size_t>(black - 1)].voice_label;
  human.push(engine.tick(), voice);
  UserInput gaze;
  gaze.kind = UserInput::Kind::gaze;
  gaze.seq = 2;
  gaze.gaze = Position{0.3, 0.3};
  human.push(engine.tick(), gaze);
  for (int i = 0; i < 40; ++i) engine.step();

  CHECK(engine.world().block(black).assignment == Assignment::robot);
  const auto inputs = engine.log().all<InputEvent>();
  REQUIRE(inputs.size() == 2);
  CHECK(inputs[0].tick == 5);
  const auto allocations = engine.log().all<AllocationEvent>();
  REQUIRE_FALSE(allocations.empty());
  CHECK(allocations[0].tick >= 5);
  CHECK(allocations[0].block == black);

  engine.abort();
  CHECK(engine.done());
  const EventLog& log = engine.log();
  CHECK(log.all<EndEvent>().size() == 1);
  CHECK_FALSE(log.all<EndEvent>()[0].completed);
  CHECK(resimulate_live(log) == log);
  CHECK(resimulate_live(parse_jsonl(to_jsonl(log))) == log);
}

TEST_CASE("explicit techniques only allocate in response to the user") {
  for (const auto& t : corpus()) {
    if (!is_explicit(t.cell.technique)) continue;
    for (const auto& a : t.log.all<AllocationEvent>()) {
      CHECK(a.reason != AllocationReason::selection);
    }
  }
}

TEST_CASE("implicit techniques incur robot errors only on yellow picks") {
  int errors = 0;
  for (const auto& t : corpus()) {
    for (const auto& p : t.log.all<PickEvent>()) {
      if (p.result != PickResult::fail_yellow) continue;
      ++errors;
      CHECK(p.actor == Actor::robot);
      CHECK(t.log.header.scenario.blocks.at(static_cast<std::size_t>(p.block - 1)).color == Color::yellow);
    }
  }
  CHECK(errors > 0);
}
