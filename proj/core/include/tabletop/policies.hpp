#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tabletop/inputs.hpp"
#include "tabletop/params.hpp"
#include "tabletop/score_field.hpp"
#include "tabletop/technique.hpp"
#include "tabletop/world.hpp"

namespace tabletop {

// A requested change of a block's assignment, before it is logged.
struct AllocationDecision {
  BlockId block = 0;
  Assignment assignment = Assignment::unassigned;

  friend bool operator==(const AllocationDecision&, const AllocationDecision&) = default;
};

struct Interpretation {
  std::optional<AllocationDecision> decision;
  std::optional<std::string> warning;
};

// ---- explicit techniques -------------------------------------------------

// Assigns the on-table block carrying `label` to the robot. Unknown labels,
// and labels of blocks that are held or placed, are a no-op with a warning.
Interpretation voice_allocate(const WorldState& world, int label);

// Fires the chosen allocation once the dwell reached the menu threshold.
std::optional<AllocationDecision> menu_interact(const WorldState& world, BlockId block, Tick dwell_ticks,
                                                MenuChoice choice, Tick dwell_threshold_ticks);

enum class GestureResult { none, to_robot, to_user };

std::string_view to_string(GestureResult g);

// Classifies the net displacement over the trailing gesture window. The
// displacement must reach the minimum length and fall inside the cone around
// the direction from the start point toward the robot (or user) anchor.
GestureResult detect_relocation_gesture(std::span<const TimedPosition> trajectory, const PolicyParams& params,
                                        Position user_pos = kUserAnchor, Position robot_pos = kRobotBase);

Territory fixed_territory_owner(Position p, const PolicyParams& params);

// Allocation implied by releasing `block` at `position` under fixed territories.
std::optional<AllocationDecision> fixed_territory_on_release(const WorldState& world, BlockId block,
                                                             Position position, const PolicyParams& params);

// ---- implicit techniques -------------------------------------------------

// On the table, not reserved by the user, and not known to be unpickable.
bool eligible_for_robot(const WorldState& world, const Block& block);

std::optional<BlockId> proactive_select(const WorldState& world, Position gripper);
std::optional<BlockId> distance_select(const WorldState& world, Position base);

// Mean of the windowed gaze means over the regions near `p`.
double gaze_object_average(const GazeField& gaze, Position p, double radius);
std::optional<BlockId> gaze_select(const WorldState& world, const GazeField& gaze, double radius);

struct ProximityScores {
  double robot = 0.0;
  double user = 0.0;
};
ProximityScores proximity_object_scores(const ProximityField& field, Position p, double radius);
std::optional<BlockId> proximity_select(const WorldState& world, const ProximityField& field,
                                        const PolicyParams& params);

// ---- strategy interface --------------------------------------------------

// Completed user inputs the engine hands to the active technique.
struct VoiceSignal {
  int label = 0;
};
struct MenuSignal {
  BlockId block = 0;
  Tick dwell_ticks = 0;
  MenuChoice choice = MenuChoice::to_robot;
};
struct GestureSignal {
  BlockId block = 0;
  std::vector<TimedPosition> trajectory;
};
struct ReleaseSignal {
  BlockId block = 0;
  Position position;
};
using UserSignal = std::variant<VoiceSignal, MenuSignal, GestureSignal, ReleaseSignal>;

struct PolicyContext {
  const PolicyParams& params;
  double tick_duration = kDefaultTickDuration;
};

class AllocationPolicy {
 public:
  virtual ~AllocationPolicy() = default;

  virtual PolicyKind kind() const = 0;
  const TechniqueTraits& traits() const { return tabletop::traits(kind()); }

  // Implicit techniques pick the robot's next block; explicit ones never do.
  virtual std::optional<BlockId> select(const WorldState& world, const PolicyContext& ctx) const;

  // Explicit techniques translate user signals into allocations. Signals that
  // do not belong to the technique are ignored.
  virtual Interpretation interpret(const WorldState& world, const UserSignal& signal,
                                   const PolicyContext& ctx) const;

  // Per-region classification for heatmap overlays; empty when the technique
  // has no territories.
  virtual std::vector<Territory> territories(const WorldState& world, const PolicyContext& ctx) const;
};

std::unique_ptr<AllocationPolicy> make_policy(PolicyKind kind);

}  // namespace tabletop
