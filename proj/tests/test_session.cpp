#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabletop/session.hpp"

using namespace tabletop;
namespace fs = std::filesystem;

namespace {

SessionSettings settings(PolicyKind technique) {
  SessionSettings s;
  s.technique = technique;
  s.task_type = TaskType::coupled;
  s.placement = Placement::scattered;
  s.seed = 3;
  return s;
}

std::vector<Message> send(LiveSession& session, const nlohmann::json& j) { return session.handle(j.dump()); }

// Ticks until a state_diff reports `block` with `assignment`; returns the number of ticks taken.
std::optional<int> ticks_until_assigned(LiveSession& session, BlockId block, const std::string& assignment, int limit) {
  for (int n = 1; n <= limit; ++n) {
    for (const auto& m : session.tick()) {
      if (m["kind"] != "state_diff") continue;
      const auto& a = m["assignments"];
      if (a.contains(std::to_string(block)) && a[std::to_string(block)] == assignment) return n;
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("hello describes the engine and its techniques") {
  LiveSession session(settings(PolicyKind::voice));
  const auto out = send(session, {{"kind", "hello"}});
  REQUIRE(out.size() == 1);
  const auto& m = out[0];
  CHECK(m["kind"] == "hello");
  CHECK(m["engine_version"] == std::string(kEngineVersion));
  CHECK(m["techniques"].size() == 8);
  CHECK(m["techniques"][6]["name"] == "gaze");
  CHECK(m["techniques"][6]["class"] == "implicit");
  CHECK(m["tick_duration"] == 0.05);
  CHECK(m["defaults"]["seed"] == 3);
}

TEST_CASE("bad messages produce errors without changing state") {
  LiveSession session(settings(PolicyKind::voice));
  CHECK(session.handle("{not json")[0]["kind"] == "error");
  CHECK(send(session, {{"kind", "teleport"}})[0]["kind"] == "error");
  CHECK(send(session, {{"no_kind", 1}})[0]["kind"] == "error");
  const auto early = send(session, {{"kind", "input"}, {"input", {{"type", "voice"}, {"label", 1}, {"seq", 4}}}});
  CHECK(early[0]["kind"] == "error");
  CHECK(early[0]["seq"] == 4);
  CHECK_FALSE(session.running());
  CHECK(send(session, {{"kind", "start_trial"}, {"technique", "warp"}})[0]["kind"] == "error");
}

TEST_CASE("start_trial echoes the scenario and sends a full state") {
  LiveSession session(settings(PolicyKind::voice));
  const auto out = send(session, {{"kind", "start_trial"}, {"seed", 8}, {"placement", "sorted"}});
  REQUIRE(out.size() == 2);
  CHECK(out[0]["kind"] == "start_trial");
  CHECK(out[0]["seed"] == 8);
  CHECK(out[0]["placement"] == "sorted");
  CHECK(out[0]["scenario"]["blocks"].size() == 16);
  const auto& diff = out[1];
  CHECK(diff["kind"] == "state_diff");
  CHECK(diff["full"] == true);
  CHECK(diff["tick"] == 0);
  CHECK(diff["blocks"].size() == 16);
  CHECK(diff["structures"].size() == 4);
  CHECK(diff["metrics"]["user_idle_pct"] == 0.0);
  CHECK(diff["metrics"]["robot_errors"] == 0);
  CHECK(diff["metrics"]["blocks_remaining"] == 16);
  CHECK(session.running());
  CHECK(send(session, {{"kind", "start_trial"}})[0]["kind"] == "error");
}

TEST_CASE("an unknown block is an error that leaves the world untouched") {
  LiveSession session(settings(PolicyKind::menu));
  send(session, {{"kind", "start_trial"}});
  const WorldState before = session.engine()->world();
  const auto out = send(session, {{"kind", "input"},
                                  {"input", {{"type", "menu"}, {"block", 99}, {"dwell_s", 1.0}, {"choice", "to_robot"}, {"seq", 7}}}});
  REQUIRE(out.size() == 1);
  CHECK(out[0]["kind"] == "error");
  CHECK(out[0]["seq"] == 7);
  CHECK(out[0]["message"] == "unknown block 99");
  CHECK(session.engine()->world() == before);
  const auto diff = session.tick();
  CHECK(diff[0]["acked"].empty());
}

TEST_CASE("a fixed-territory drag is assigned within three ticks") {
  LiveSession session(settings(PolicyKind::fixed));
  const auto start = send(session, {{"kind", "start_trial"}});
  // A block outside the robot band, dragged into it.
  BlockId block = 0;
  Position from;
  for (const auto& b : start[1]["blocks"]) {
    if (b["position"]["y"].get<double>() < 0.6) {
      block = b["id"].get<int>();
      from = {b["position"]["x"].get<double>(), b["position"]["y"].get<double>()};
      break;
    }
  }
  REQUIRE(block != 0);
  const nlohmann::json path = nlohmann::json::array(
      {{{"t", 0.0}, {"x", from.x}, {"y", from.y}}, {{"t", 0.4}, {"x", 0.5}, {"y", 0.8}}});
  const Tick applied_at = session.engine()->tick();
  CHECK(send(session, {{"kind", "input"}, {"input", {{"type", "drag"}, {"block", block}, {"path", path}, {"seq", 1}}}}).empty());
  const auto n = ticks_until_assigned(session, block, "robot", 3);
  REQUIRE(n);
  CHECK(*n <= 3);
  const auto inputs = session.engine()->log().all<InputEvent>();
  REQUIRE(inputs.size() == 1);
  CHECK(inputs[0].tick == applied_at);
}

TEST_CASE("accepted inputs are acknowledged in the next state_diff") {
  LiveSession session(settings(PolicyKind::voice));
  send(session, {{"kind", "start_trial"}});
  send(session, {{"kind", "input"}, {"input", {{"type", "voice"}, {"label", 2}, {"seq", 11}}}});
  send(session, {{"kind", "input"}, {"input", {{"type", "gaze"}, {"point", {{"x", 0.2}, {"y", 0.2}}}, {"seq", 12}}}});
  const auto out = session.tick();
  REQUIRE_FALSE(out.empty());
  CHECK(out[0]["acked"] == nlohmann::json::array({11, 12}));
  CHECK(out[0]["tick"] == 1);
  CHECK(out[0]["full"] == false);
  const auto next = session.tick();
  CHECK(next[0]["acked"].empty());
}

TEST_CASE("state diffs only carry what changed") {
  LiveSession session(settings(PolicyKind::distance));
  send(session, {{"kind", "start_trial"}});
  std::size_t events = 0;
  bool saw_partial = false;
  for (int i = 0; i < 200; ++i) {
    for (const auto& m : session.tick()) {
      if (m["kind"] != "state_diff") continue;
      events += m["events"].size();
      if (m["blocks"].size() < 16) saw_partial = true;
      CHECK(m["territories"].empty());
    }
  }
  CHECK(saw_partial);
  CHECK(events == session.engine()->log().events.size());
}

TEST_CASE("gaze and proximity sessions carry heatmaps and territories") {
  for (PolicyKind k : {PolicyKind::gaze, PolicyKind::proximity}) {
    LiveSession session(settings(k));
    const auto start = send(session, {{"kind", "start_trial"}});
    const auto& diff = start[1];
    CHECK(diff["territories"].size() == 100);
    if (k == PolicyKind::gaze) CHECK(diff["heatmap"]["gaze"].size() == 100);
    if (k == PolicyKind::proximity) CHECK(diff["heatmap"]["robot"].size() == 100);
  }
}

TEST_CASE("a finished trial reports its metrics and writes a log that re-simulates") {
  const fs::path dir = fs::temp_directory_path() / "tabletop_test_session";
  fs::remove_all(dir);
  SessionSettings s = settings(PolicyKind::voice);
  s.log_dir = dir;
  s.tick_limit = 60;
  s.ticks_per_diff = 10;
  LiveSession session(s);
  send(session, {{"kind", "start_trial"}});
  send(session, {{"kind", "input"}, {"input", {{"type", "voice"}, {"label", 5}, {"seq", 1}}}});
  std::vector<Message> all;
  for (int i = 0; i < 70; ++i) {
    for (auto& m : session.tick()) all.push_back(m);
  }
  int diffs = 0;
  int done = 0;
  for (const auto& m : all) {
    diffs += m["kind"] == "state_diff";
    done += m["kind"] == "trial_done";
  }
  CHECK(diffs == 6);
  REQUIRE(done == 1);
  const auto& final = all.back();
  CHECK(final["kind"] == "trial_done");
  CHECK(final["completed"] == false);
  CHECK(final["tick"] == 60);
  CHECK(final["report"]["completion_time_s"] == doctest::Approx(3.0));
  REQUIRE(session.last_log_path());
  CHECK(final["log"] == session.last_log_path()->string());
  std::ifstream in(*session.last_log_path());
  std::ostringstream text;
  text << in.rdbuf();
  const EventLog log = parse_jsonl(text.str());
  CHECK(log == session.engine()->log());
  CHECK(resimulate_live(log) == log);
  fs::remove_all(dir);
}

TEST_CASE("disconnecting aborts the trial and flushes its log") {
  const fs::path dir = fs::temp_directory_path() / "tabletop_test_disconnect";
  fs::remove_all(dir);
  SessionSettings s = settings(PolicyKind::subtle);
  s.log_dir = dir;
  LiveSession session(s);
  send(session, {{"kind", "start_trial"}});
  for (int i = 0; i < 25; ++i) session.tick();
  session.disconnect();
  CHECK_FALSE(session.running());
  REQUIRE(session.last_log_path());
  CHECK(fs::exists(*session.last_log_path()));
  CHECK(session.last_log_path()->filename().string().rfind("live_subtle_coupled_scattered_3_", 0) == 0);
  const auto ends = session.engine()->log().all<EndEvent>();
  REQUIRE(ends.size() == 1);
  CHECK(ends[0].tick == 25);
  CHECK_FALSE(ends[0].completed);
  fs::remove_all(dir);
}
