#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "tabletop/events.hpp"
#include "tabletop/human.hpp"
#include "tabletop/policies.hpp"
#include "tabletop/rng.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

struct TrialResult {
  bool completed = false;
  Tick ticks = 0;
  double duration_s = 0.0;
  WorldState final_world;
};

// Fixed-tick simulation of one trial. Within a tick: live inputs are applied,
// actions ending at the tick boundary take effect (human first), the human
// decides, the score fields update, and finally the robot decides. The world
// changes only through apply_event, and every event is appended to the log.
class Engine {
 public:
  Engine(const Scenario& scenario, const SimConfig& config, PolicyKind technique, HumanActionSource& human,
         Tick tick_limit);

  bool done() const { return finished_; }
  Tick tick() const { return world_.tick; }
  const WorldState& world() const { return world_; }
  const EventLog& log() const { return log_; }
  const AllocationPolicy& policy() const { return *policy_; }
  const SimConfig& config() const { return config_; }

  // Advances one tick and returns the index of the first event it emitted.
  // Stops the trial once the task completes or the tick limit is reached.
  std::size_t step();

  // Ends the trial now; in-flight actions are logged as truncated.
  void abort();

  TrialResult result() const;

 private:
  struct Activity {
    ActionKind kind = ActionKind::idle;
    HumanAction::Kind human_kind = HumanAction::Kind::idle;
    std::optional<BlockId> block;
    std::optional<StructureId> structure;
    Tick start = 0;
    Tick end = 0;
    int chain = 0;
    Position from;
    Position to;
    Position focus;
    MenuChoice choice = MenuChoice::to_robot;
    Tick dwell_ticks = 0;
    int label = 0;
  };
  struct Lane {
    Actor actor;
    std::optional<Activity> current;
    std::optional<Tick> idle_since;
    int chain = 0;
    bool chain_open = false;
  };

  void emit(Event e);
  void record(Lane& lane, const Activity& a, Tick end, ActionEffect effect, std::optional<Position> to);
  void start(Lane& lane, Activity a);
  void go_idle(Lane& lane);
  void close_idle(Lane& lane, Tick until);
  int next_chain() { return ++chain_counter_; }

  void apply_allocation(const std::optional<AllocationDecision>& d, AllocationReason reason);
  void apply_interpretation(const Interpretation& in);
  void unassign_after_robot_failure(BlockId block, AllocationReason reason);

  void apply_live_input(const UserInput& input);
  void retro_record(ActionKind kind, std::optional<BlockId> block, std::optional<StructureId> structure,
                    Tick span, ActionEffect effect, std::optional<Position> to);

  void complete_human(const Activity& a);
  void complete_robot(const Activity& a);
  void decide_human();
  void decide_robot();
  void update_fields();
  void finish(Tick at, bool completed);

  HumanContext human_context() const;
  MotionModel human_motion() const;
  PolicyContext policy_context() const { return {config_.params, config_.tick_duration}; }

  SimConfig config_;
  PolicyKind technique_;
  std::unique_ptr<AllocationPolicy> policy_;
  HumanActionSource& human_;
  Tick tick_limit_;
  DeterministicRng rng_;
  WorldState world_;
  EventLog log_;
  Lane user_{Actor::user, std::nullopt, std::nullopt, 0, false};
  Lane robot_{Actor::robot, std::nullopt, std::nullopt, 0, false};
  std::vector<Pickup> pickups_;
  int chain_counter_ = 0;
  bool finished_ = false;
  bool completed_ = false;
};

// Runs a trial to completion or the tick limit.
std::pair<TrialResult, EventLog> run_trial(const Scenario& scenario, const SimConfig& config, PolicyKind technique,
                                           HumanActionSource& human, Tick tick_limit);

// Rebuilds the final world from a log. The score field comes from the last
// checkpoint. Throws ReplayError at the first inconsistent event.
WorldState replay(const Scenario& scenario, const EventLog& log);

// Re-simulates a logged live session headlessly by feeding its recorded
// inputs back at their ticks.
EventLog resimulate_live(const EventLog& log);

}  // namespace tabletop
