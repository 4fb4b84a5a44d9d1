#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/params.hpp"
#include "tabletop/types.hpp"
#include "tabletop/workspace.hpp"

namespace tabletop {

enum class Territory { group, user, robot };

std::string_view to_string(Territory t);

// Windowed gaze exposure per region. Each tick exactly one region (or none,
// when the gaze is off the table) receives exposure 1; the mean of a region is
// its exposure count over the last window_ticks ticks divided by window_ticks.
// Ticks before the first observation count as zero exposure.
class GazeField {
 public:
  GazeField() = default;
  GazeField(const RegionGrid& grid, int window_ticks);

  void observe(std::optional<Position> gaze_point);

  double mean(int region) const;
  std::vector<double> means() const;
  int window_ticks() const { return static_cast<int>(ring_.size()); }
  const RegionGrid& grid() const { return grid_; }

  // Raw ring contents, oldest first; -1 marks a tick with no on-table gaze.
  std::vector<int> history() const;

  nlohmann::ordered_json to_json() const;
  static GazeField from_json(const nlohmann::json& j);

  // Fields are equal when they hold the same window, wherever the ring starts.
  friend bool operator==(const GazeField& a, const GazeField& b) {
    return a.grid_ == b.grid_ && a.history() == b.history();
  }

 private:
  RegionGrid grid_;
  std::vector<int> ring_;
  std::size_t cursor_ = 0;
  std::vector<int> counts_;
};

// Two decaying channels per region. A pick from the table infuses the regions
// near the pick location: the picking actor's channel is set to the amplitude
// there and the other channel is cleared. Both channels decay exponentially.
class ProximityField {
 public:
  ProximityField() = default;
  ProximityField(const RegionGrid& grid, double amplitude, double half_life_s);

  void infuse(Actor actor, Position pickup, double radius, Tick tick);
  void decay(double dt_s);

  double score(Actor actor, int region) const;
  const std::vector<double>& channel(Actor actor) const { return actor == Actor::user ? user_ : robot_; }
  Tick last_update(int region) const { return last_update_[static_cast<std::size_t>(region)]; }
  double amplitude() const { return amplitude_; }
  const RegionGrid& grid() const { return grid_; }

  nlohmann::ordered_json to_json() const;
  static ProximityField from_json(const nlohmann::json& j);

  friend bool operator==(const ProximityField&, const ProximityField&) = default;

 private:
  RegionGrid grid_;
  double amplitude_ = 1.0;
  double half_life_s_ = 10.0;
  std::vector<double> user_;
  std::vector<double> robot_;
  std::vector<Tick> last_update_;
};

struct ScoreField {
  GazeField gaze;
  ProximityField proximity;

  static ScoreField make(const SimConfig& config);

  nlohmann::ordered_json to_json() const;
  static ScoreField from_json(const nlohmann::json& j);

  friend bool operator==(const ScoreField&, const ScoreField&) = default;
};

// Per-tick field maintenance used by the engine.
void gaze_observe(ScoreField& field, std::optional<Position> gaze_point);

struct Pickup {
  Actor actor;
  Position position;
};

// Decays both proximity channels by dt, then applies the pickup infusion if any.
void proximity_update(ScoreField& field, const std::optional<Pickup>& pickup, double dt_s, double infusion_radius,
                      Tick tick);

// Heatmap classification: mean > user threshold is the user's, mean < robot
// threshold is the robot's, anything else belongs to the group.
std::vector<Territory> territory_classify(const GazeField& gaze, double user_threshold, double robot_threshold);

// The channel that dominates and exceeds its threshold wins; otherwise group.
std::vector<Territory> territory_classify(const ProximityField& proximity, double user_threshold,
                                          double robot_threshold);

}  // namespace tabletop
