#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/inputs.hpp"
#include "tabletop/policies.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

enum class HumanModelKind { focused_builder, eager_manager, guardian };
enum class GazeMode { follow_manipulation, fixed_point, sweep };

std::string_view to_string(HumanModelKind k);
std::string_view to_string(GazeMode g);
HumanModelKind parse_human_model_kind(std::string_view s);
GazeMode parse_gaze_mode(std::string_view s);

struct HumanModel {
  HumanModelKind kind = HumanModelKind::focused_builder;
  double speed_multiplier = 1.0;
  // Black blocks a focused builder or guardian hands over each time the robot runs dry.
  int allocation_batch = 1;
  GazeMode gaze_mode = GazeMode::follow_manipulation;
  Position gaze_fixed_point{0.5, 0.2};
  double sweep_period_s = 4.0;
  // Guardian stash rows sit between the user edge and this y.
  double stash_max_y = 0.25;
  // Subtle pushes travel this far toward the robot.
  double push_distance = 0.2;

  friend bool operator==(const HumanModel&, const HumanModel&) = default;
};

void validate(const HumanModel& m);
nlohmann::ordered_json to_json(const HumanModel& m);
HumanModel human_model_from_json(const nlohmann::json& j, HumanModel base = {});

// What the human wants to do next. The engine turns it into a timed action.
struct HumanAction {
  enum class Kind { idle, reach, pick, place, maneuver, push, menu_dwell, voice };
  Kind kind = Kind::idle;
  BlockId block = 0;
  StructureId structure = -1;
  Position destination;  // reach target, maneuver drop point, or push end
  int label = 0;
  MenuChoice choice = MenuChoice::to_robot;
  Tick dwell_ticks = 0;
  bool new_chain = false;  // first action of a new manipulation
};

std::string_view to_string(HumanAction::Kind k);

struct HumanContext {
  const WorldState& world;
  const AllocationPolicy& policy;
  const SimConfig& config;
  bool robot_busy = false;                // robot has an action in flight
  std::optional<BlockId> robot_target;   // block the in-flight robot action is aimed at
  std::optional<Position> focus;         // target of the human's in-flight action
};

// Robot has nothing to do: no action in flight, empty hand, nothing actionable queued.
bool robot_idle(const HumanContext& ctx);

class HumanActionSource {
 public:
  virtual ~HumanActionSource() = default;

  virtual std::string name() const = 0;
  virtual double speed_multiplier() const { return 1.0; }

  // Called whenever the human is action-free.
  virtual HumanAction next_action(const HumanContext& ctx) = 0;

  // Live inputs to apply at the start of `tick`, in arrival order.
  virtual std::vector<UserInput> take_inputs(Tick tick);

  // Where the human looks during `tick`; nullopt when off the table.
  virtual std::optional<Position> gaze_point(const HumanContext& ctx) = 0;
};

// Deterministic archetype teammate. Holds a small plan (which block, what for)
// across decisions; every decision re-validates it against the world.
class ScriptedHuman final : public HumanActionSource {
 public:
  explicit ScriptedHuman(HumanModel model) : model_(model) {}

  std::string name() const override { return std::string(to_string(model_.kind)); }
  double speed_multiplier() const override { return model_.speed_multiplier; }
  HumanAction next_action(const HumanContext& ctx) override;
  std::optional<Position> gaze_point(const HumanContext& ctx) override;

  const HumanModel& model() const { return model_; }

 private:
  enum class Goal { build, allocate, relocate };
  struct Plan {
    Goal goal = Goal::build;
    BlockId block = 0;
    Position destination;      // drop point for relocations, fixed moves, and subtle staging
    Position push_end;         // subtle push end point
    bool needs_stage = false;  // subtle: carry the block clear of the edge before pushing
    bool started = false;
  };

  std::optional<Plan> choose_plan(const HumanContext& ctx);
  std::optional<Plan> allocation_plan(const HumanContext& ctx);
  std::optional<Plan> relocation_plan(const HumanContext& ctx);
  std::optional<Plan> build_plan(const HumanContext& ctx);
  std::optional<StructureId> build_target(const WorldState& w);
  HumanAction advance(const HumanContext& ctx);
  HumanAction issue(HumanAction action);

  HumanModel model_;
  std::optional<Plan> plan_;
  std::set<BlockId> relocated_;
  int batch_left_ = 0;
  std::optional<Position> last_focus_;
  std::optional<StructureId> own_structure_;  // structure a focused user is committed to
};

// Live participant: inputs arrive stamped with the tick they apply at. The
// human never starts timed actions on its own.
class InputDrivenHuman final : public HumanActionSource {
 public:
  std::string name() const override { return "live"; }

  void push(Tick apply_tick, UserInput input);
  bool pending() const { return !queue_.empty(); }

  HumanAction next_action(const HumanContext&) override { return {}; }
  std::vector<UserInput> take_inputs(Tick tick) override;
  std::optional<Position> gaze_point(const HumanContext&) override { return gaze_; }

 private:
  std::map<Tick, std::vector<UserInput>> queue_;
  std::optional<Position> gaze_;
};

// Free table spot for a block: clear of other on-table blocks and the goal
// bases, chosen from a candidate lattice as the one nearest `near`.
std::optional<Position> find_free_spot(const WorldState& world, BlockId moving, Position near, double min_y,
                                       double max_y);

}  // namespace tabletop
