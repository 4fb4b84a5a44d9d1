#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/inputs.hpp"
#include "tabletop/params.hpp"
#include "tabletop/technique.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

inline constexpr std::string_view kEngineVersion = "1.0.0";

enum class ActionKind { idle, reach, pick, place, maneuver, allocate_gesture, menu_dwell };

// How an action ended. Chains of reach/pick/... records are classified for
// metrics by the effect of their final record.
enum class ActionEffect {
  none,
  arrived,
  picked,
  placed,
  released,
  allocated,
  gesture_missed,
  dwell_released,
  fail_yellow,
  fail_random,
  aborted,
  rejected,
  truncated,
};

std::string_view to_string(ActionKind k);
std::string_view to_string(ActionEffect e);
ActionKind parse_action_kind(std::string_view s);
ActionEffect parse_action_effect(std::string_view s);

// One agent action spanning ticks [start_tick, end_tick). Emitted when it ends.
struct ActionRecord {
  Actor actor = Actor::user;
  ActionKind kind = ActionKind::idle;
  std::optional<BlockId> block;
  std::optional<StructureId> structure;
  Tick start_tick = 0;
  Tick end_tick = 0;
  int chain = 0;  // 0 for idle; otherwise groups the records of one manipulation
  ActionEffect effect = ActionEffect::none;
  std::optional<Position> to;  // hand/gripper position after the action

  Tick duration() const { return end_tick - start_tick; }
  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

enum class AllocationReason { user_input, selection, fail_yellow, pick_abort };

std::string_view to_string(AllocationReason r);

struct AllocationEvent {
  Tick tick = 0;
  BlockId block = 0;
  Assignment assignment = Assignment::unassigned;
  PolicyKind cause = PolicyKind::voice;
  AllocationReason reason = AllocationReason::user_input;

  friend bool operator==(const AllocationEvent&, const AllocationEvent&) = default;
};

enum class PickResult { success, fail_yellow, fail_random, aborted };

std::string_view to_string(PickResult r);

struct PickEvent {
  Tick tick = 0;
  Actor actor = Actor::robot;
  BlockId block = 0;
  PickResult result = PickResult::success;
  Position position;  // block position at the attempt

  friend bool operator==(const PickEvent&, const PickEvent&) = default;
};

struct PlacementEvent {
  Tick tick = 0;
  Actor actor = Actor::robot;
  BlockId block = 0;
  StructureId structure = 0;
  int slot = 0;

  friend bool operator==(const PlacementEvent&, const PlacementEvent&) = default;
};

// A block set down (or slid) to a new table position.
struct ReleaseEvent {
  Tick tick = 0;
  Actor actor = Actor::user;
  BlockId block = 0;
  Position position;

  friend bool operator==(const ReleaseEvent&, const ReleaseEvent&) = default;
};

struct RejectionEvent {
  Tick tick = 0;
  Actor actor = Actor::user;
  std::string reason;

  friend bool operator==(const RejectionEvent&, const RejectionEvent&) = default;
};

struct WarningEvent {
  Tick tick = 0;
  std::string message;

  friend bool operator==(const WarningEvent&, const WarningEvent&) = default;
};

// A live input as applied at a tick boundary.
struct InputEvent {
  Tick tick = 0;
  UserInput input;

  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

struct CheckpointEvent {
  Tick tick = 0;
  ScoreField field;

  friend bool operator==(const CheckpointEvent&, const CheckpointEvent&) = default;
};

struct EndEvent {
  Tick tick = 0;
  bool completed = false;

  friend bool operator==(const EndEvent&, const EndEvent&) = default;
};

using Event = std::variant<ActionRecord, AllocationEvent, PickEvent, PlacementEvent, ReleaseEvent, RejectionEvent,
                           WarningEvent, InputEvent, CheckpointEvent, EndEvent>;

Tick event_tick(const Event& e);

struct LogHeader {
  std::string engine_version{kEngineVersion};
  std::uint64_t seed = 0;
  PolicyKind technique = PolicyKind::voice;
  std::string human_model;
  Tick tick_limit = 0;
  Scenario scenario;
  SimConfig config;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct EventLog {
  LogHeader header;
  std::vector<Event> events;

  template <typename T>
  std::vector<T> all() const {
    std::vector<T> out;
    for (const auto& e : events) {
      if (const auto* v = std::get_if<T>(&e)) out.push_back(*v);
    }
    return out;
  }

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

nlohmann::ordered_json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const LogHeader& h);
LogHeader log_header_from_json(const nlohmann::json& j);

// JSON-lines: header first, then one event per line, keys in fixed order.
void write_jsonl(std::ostream& out, const EventLog& log);
std::string to_jsonl(const EventLog& log);
EventLog read_jsonl(std::istream& in);
EventLog parse_jsonl(const std::string& text);

// Inconsistency between an event and the state it is applied to.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(Tick tick, const std::string& what)
      : std::runtime_error("replay diverged at tick " + std::to_string(tick) + ": " + what), tick_(tick) {}
  Tick tick() const { return tick_; }

 private:
  Tick tick_;
};

// Applies one event's world effect. The live engine mutates the world only
// through this function, so replaying a log retraces the live run exactly.
// Throws ReplayError when the event does not fit the current state.
void apply_event(WorldState& world, const Event& event);

}  // namespace tabletop
