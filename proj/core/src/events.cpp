#include "tabletop/events.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace tabletop {

namespace {

constexpr std::array<std::string_view, 7> kActionKindNames{"idle",     "reach",           "pick",      "place",
                                                           "maneuver", "allocate_gesture", "menu_dwell"};
constexpr std::array<std::string_view, 13> kEffectNames{
    "none",           "arrived",        "picked",      "placed",      "released", "allocated", "gesture_missed",
    "dwell_released", "fail_yellow",    "fail_random", "aborted",     "rejected", "truncated"};

template <std::size_t N>
std::size_t index_of(const std::array<std::string_view, N>& names, std::string_view s, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return i;
  }
  throw ParseError(std::string("unknown ") + what + ": '" + std::string(s) + "'");
}

nlohmann::ordered_json optional_int(const std::optional<int>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<int> read_optional_int(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<int>();
}

void remove_from_queue(RobotState& robot, BlockId id) {
  robot.queue.erase(std::remove(robot.queue.begin(), robot.queue.end(), id), robot.queue.end());
}

std::optional<BlockId>& held_slot(WorldState& w, Actor a) { return a == Actor::user ? w.human.held : w.robot.held; }

Position& hand_of(WorldState& w, Actor a) { return a == Actor::user ? w.human.hand : w.robot.gripper; }

Block& require_block(WorldState& w, BlockId id, Tick tick) {
  if (!w.has_block(id)) throw ReplayError(tick, "unknown block " + std::to_string(id));
  return w.block(id);
}

struct Applier {
  WorldState& w;

  void operator()(const ActionRecord& r) const {
    if (r.end_tick < r.start_tick) throw ReplayError(r.end_tick, "action ends before it starts");
    if (r.kind != ActionKind::idle && !r.block && !r.structure) {
      throw ReplayError(r.end_tick, "non-idle action without a target");
    }
    if (r.to) hand_of(w, r.actor) = *r.to;
  }

  void operator()(const AllocationEvent& e) const {
    Block& b = require_block(w, e.block, e.tick);
    if (b.state == BlockState::placed) {
      throw ReplayError(e.tick, "allocation of placed block " + std::to_string(e.block));
    }
    b.assignment = e.assignment;
    if (e.assignment == Assignment::robot) {
      if (std::find(w.robot.queue.begin(), w.robot.queue.end(), e.block) == w.robot.queue.end() &&
          w.robot.held != e.block) {
        w.robot.queue.push_back(e.block);
      }
    } else {
      remove_from_queue(w.robot, e.block);
    }
  }

  void operator()(const PickEvent& e) const {
    Block& b = require_block(w, e.block, e.tick);
    switch (e.result) {
      case PickResult::success: {
        if (!b.is_on_table()) throw ReplayError(e.tick, "pick of block " + std::to_string(e.block) + " not on table");
        auto& slot = held_slot(w, e.actor);
        if (slot) throw ReplayError(e.tick, std::string(to_string(e.actor)) + " already holds a block");
        if (e.actor == Actor::robot && b.color != Color::black) {
          throw ReplayError(e.tick, "robot cannot hold a yellow block");
        }
        b.state = BlockState::held;
        b.holder = e.actor;
        slot = e.block;
        if (e.actor == Actor::robot) remove_from_queue(w.robot, e.block);
        break;
      }
      case PickResult::fail_yellow:
        if (e.actor != Actor::robot || b.color != Color::yellow) {
          throw ReplayError(e.tick, "fail_yellow on a non-yellow block or by the user");
        }
        if (!b.is_on_table()) throw ReplayError(e.tick, "failed pick of block not on table");
        if (!w.robot.never_retry.insert(e.block).second) {
          throw ReplayError(e.tick, "robot re-attempted never-retry block " + std::to_string(e.block));
        }
        ++w.robot.errors;
        break;
      case PickResult::fail_random:
        if (!b.is_on_table() || b.color != Color::black) throw ReplayError(e.tick, "fail_random on invalid block");
        break;
      case PickResult::aborted:
        break;
    }
  }

  void operator()(const PlacementEvent& e) const {
    Block& b = require_block(w, e.block, e.tick);
    if (!w.has_structure(e.structure)) throw ReplayError(e.tick, "unknown structure " + std::to_string(e.structure));
    if (b.state == BlockState::placed) {
      throw ReplayError(e.tick, "placement of already-placed block " + std::to_string(e.block));
    }
    if (!b.held_by(e.actor)) throw ReplayError(e.tick, "placement of a block the actor does not hold");
    GoalStructure& s = w.structure(e.structure);
    if (!placement_legal(e.actor, b, s) || e.slot != s.filled) {
      throw ReplayError(e.tick, "illegal placement of block " + std::to_string(e.block));
    }
    b.state = BlockState::placed;
    b.placed_in = s.id;
    b.position = s.base;
    ++s.filled;
    held_slot(w, e.actor).reset();
    remove_from_queue(w.robot, e.block);
    hand_of(w, e.actor) = s.base;
  }

  void operator()(const ReleaseEvent& e) const {
    Block& b = require_block(w, e.block, e.tick);
    if (b.state == BlockState::placed) throw ReplayError(e.tick, "release of placed block");
    if (b.state == BlockState::held && b.holder != e.actor) {
      throw ReplayError(e.tick, "release of a block held by the other actor");
    }
    if (!on_table(e.position)) throw ReplayError(e.tick, "release off the table");
    if (b.state == BlockState::held) held_slot(w, e.actor).reset();
    b.state = BlockState::on_table;
    b.position = e.position;
  }

  void operator()(const RejectionEvent&) const {}
  void operator()(const WarningEvent&) const {}
  void operator()(const InputEvent&) const {}

  void operator()(const CheckpointEvent& e) const { w.field = e.field; }

  void operator()(const EndEvent& e) const { w.tick = e.tick; }
};

}  // namespace

std::string_view to_string(ActionKind k) { return kActionKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(ActionEffect e) { return kEffectNames[static_cast<std::size_t>(e)]; }
ActionKind parse_action_kind(std::string_view s) {
  return static_cast<ActionKind>(index_of(kActionKindNames, s, "action kind"));
}
ActionEffect parse_action_effect(std::string_view s) {
  return static_cast<ActionEffect>(index_of(kEffectNames, s, "action effect"));
}

std::string_view to_string(AllocationReason r) {
  switch (r) {
    case AllocationReason::user_input: return "user_input";
    case AllocationReason::selection: return "selection";
    case AllocationReason::fail_yellow: return "fail_yellow";
    case AllocationReason::pick_abort: return "pick_abort";
  }
  return "?";
}

namespace {
AllocationReason parse_allocation_reason(std::string_view s) {
  if (s == "user_input") return AllocationReason::user_input;
  if (s == "selection") return AllocationReason::selection;
  if (s == "fail_yellow") return AllocationReason::fail_yellow;
  if (s == "pick_abort") return AllocationReason::pick_abort;
  throw ParseError("unknown allocation reason: '" + std::string(s) + "'");
}

PickResult parse_pick_result(std::string_view s) {
  if (s == "success") return PickResult::success;
  if (s == "fail_yellow") return PickResult::fail_yellow;
  if (s == "fail_random") return PickResult::fail_random;
  if (s == "aborted") return PickResult::aborted;
  throw ParseError("unknown pick result: '" + std::string(s) + "'");
}
}  // namespace

std::string_view to_string(PickResult r) {
  switch (r) {
    case PickResult::success: return "success";
    case PickResult::fail_yellow: return "fail_yellow";
    case PickResult::fail_random: return "fail_random";
    case PickResult::aborted: return "aborted";
  }
  return "?";
}

Tick event_tick(const Event& e) {
  return std::visit(
      [](const auto& v) -> Tick {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ActionRecord>) {
          return v.end_tick;
        } else {
          return v.tick;
        }
      },
      e);
}

nlohmann::ordered_json to_json(const Event& e) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        nlohmann::ordered_json j;
        if constexpr (std::is_same_v<T, ActionRecord>) {
          j["type"] = "action";
          j["tick"] = v.end_tick;
          j["actor"] = to_string(v.actor);
          j["kind"] = to_string(v.kind);
          j["block"] = optional_int(v.block);
          j["structure"] = optional_int(v.structure);
          j["start"] = v.start_tick;
          j["end"] = v.end_tick;
          j["chain"] = v.chain;
          j["effect"] = to_string(v.effect);
          j["to"] = v.to ? to_json(*v.to) : nlohmann::ordered_json(nullptr);
        } else if constexpr (std::is_same_v<T, AllocationEvent>) {
          j["type"] = "allocation";
          j["tick"] = v.tick;
          j["block"] = v.block;
          j["assignment"] = to_string(v.assignment);
          j["cause"] = to_string(v.cause);
          j["reason"] = to_string(v.reason);
        } else if constexpr (std::is_same_v<T, PickEvent>) {
          j["type"] = "pick";
          j["tick"] = v.tick;
          j["actor"] = to_string(v.actor);
          j["block"] = v.block;
          j["result"] = to_string(v.result);
          j["position"] = to_json(v.position);
        } else if constexpr (std::is_same_v<T, PlacementEvent>) {
          j["type"] = "placement";
          j["tick"] = v.tick;
          j["actor"] = to_string(v.actor);
          j["block"] = v.block;
          j["structure"] = v.structure;
          j["slot"] = v.slot;
        } else if constexpr (std::is_same_v<T, ReleaseEvent>) {
          j["type"] = "release";
          j["tick"] = v.tick;
          j["actor"] = to_string(v.actor);
          j["block"] = v.block;
          j["position"] = to_json(v.position);
        } else if constexpr (std::is_same_v<T, RejectionEvent>) {
          j["type"] = "rejection";
          j["tick"] = v.tick;
          j["actor"] = to_string(v.actor);
          j["reason"] = v.reason;
        } else if constexpr (std::is_same_v<T, WarningEvent>) {
          j["type"] = "warning";
          j["tick"] = v.tick;
          j["message"] = v.message;
        } else if constexpr (std::is_same_v<T, InputEvent>) {
          j["type"] = "input";
          j["tick"] = v.tick;
          j["input"] = to_json(v.input);
        } else if constexpr (std::is_same_v<T, CheckpointEvent>) {
          j["type"] = "checkpoint";
          j["tick"] = v.tick;
          j["field"] = v.field.to_json();
        } else if constexpr (std::is_same_v<T, EndEvent>) {
          j["type"] = "end";
          j["tick"] = v.tick;
          j["completed"] = v.completed;
        }
        return j;
      },
      e);
}

Event event_from_json(const nlohmann::json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    const Tick tick = j.at("tick").get<Tick>();
    if (type == "action") {
      ActionRecord r;
      r.actor = parse_actor(j.at("actor").get<std::string>());
      r.kind = parse_action_kind(j.at("kind").get<std::string>());
      r.block = read_optional_int(j, "block");
      r.structure = read_optional_int(j, "structure");
      r.start_tick = j.at("start").get<Tick>();
      r.end_tick = j.at("end").get<Tick>();
      r.chain = j.at("chain").get<int>();
      r.effect = parse_action_effect(j.at("effect").get<std::string>());
      if (const auto& to = j.at("to"); !to.is_null()) r.to = position_from_json(to);
      return r;
    }
    if (type == "allocation") {
      return AllocationEvent{tick, j.at("block").get<int>(), parse_assignment(j.at("assignment").get<std::string>()),
                             parse_policy_kind(j.at("cause").get<std::string>()),
                             parse_allocation_reason(j.at("reason").get<std::string>())};
    }
    if (type == "pick") {
      return PickEvent{tick, parse_actor(j.at("actor").get<std::string>()), j.at("block").get<int>(),
                       parse_pick_result(j.at("result").get<std::string>()), position_from_json(j.at("position"))};
    }
    if (type == "placement") {
      return PlacementEvent{tick, parse_actor(j.at("actor").get<std::string>()), j.at("block").get<int>(),
                            j.at("structure").get<int>(), j.at("slot").get<int>()};
    }
    if (type == "release") {
      return ReleaseEvent{tick, parse_actor(j.at("actor").get<std::string>()), j.at("block").get<int>(),
                          position_from_json(j.at("position"))};
    }
    if (type == "rejection") {
      return RejectionEvent{tick, parse_actor(j.at("actor").get<std::string>()), j.at("reason").get<std::string>()};
    }
    if (type == "warning") return WarningEvent{tick, j.at("message").get<std::string>()};
    if (type == "input") return InputEvent{tick, user_input_from_json(j.at("input"))};
    if (type == "checkpoint") return CheckpointEvent{tick, ScoreField::from_json(j.at("field"))};
    if (type == "end") return EndEvent{tick, j.at("completed").get<bool>()};
    throw ParseError("unknown event type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed event: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const LogHeader& h) {
  return {{"type", "header"},
          {"engine_version", h.engine_version},
          {"seed", h.seed},
          {"technique", to_string(h.technique)},
          {"human_model", h.human_model},
          {"tick_limit", h.tick_limit},
          {"config", to_json(h.config)},
          {"scenario", to_json(h.scenario)}};
}

LogHeader log_header_from_json(const nlohmann::json& j) {
  try {
    if (j.at("type").get<std::string>() != "header") throw ParseError("first log line must be the header");
    LogHeader h;
    h.engine_version = j.at("engine_version").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.technique = parse_policy_kind(j.at("technique").get<std::string>());
    h.human_model = j.at("human_model").get<std::string>();
    h.tick_limit = j.at("tick_limit").get<Tick>();
    h.config = sim_config_from_json(j.at("config"));
    h.scenario = scenario_from_json(j.at("scenario"));
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed log header: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const EventLog& log) {
  out << to_json(log.header).dump() << '\n';
  for (const auto& e : log.events) out << to_json(e).dump() << '\n';
}

std::string to_jsonl(const EventLog& log) {
  std::ostringstream out;
  write_jsonl(out, log);
  return out.str();
}

EventLog read_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("log line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      log.header = log_header_from_json(j);
      have_header = true;
    } else {
      log.events.push_back(event_from_json(j));
    }
  }
  if (!have_header) throw ParseError("event log is empty");
  return log;
}

EventLog parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl(in);
}

void apply_event(WorldState& world, const Event& event) { std::visit(Applier{world}, event); }

}  // namespace tabletop
