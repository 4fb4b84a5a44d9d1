#include "tabletop/score_field.hpp"

#include <cmath>
#include <stdexcept>

namespace tabletop {

std::string_view to_string(Territory t) {
  switch (t) {
    case Territory::user: return "user";
    case Territory::robot: return "robot";
    case Territory::group: return "group";
  }
  return "group";
}

GazeField::GazeField(const RegionGrid& grid, int window_ticks)
    : grid_(grid), ring_(static_cast<std::size_t>(window_ticks), -1), counts_(static_cast<std::size_t>(grid.size()), 0) {
  if (window_ticks <= 0) throw std::invalid_argument("gaze window must span at least one tick");
}

void GazeField::observe(std::optional<Position> gaze_point) {
  int region = -1;
  if (gaze_point && is_finite(*gaze_point) && on_table(*gaze_point)) region = region_of(*gaze_point, grid_);

  const int evicted = ring_[cursor_];
  if (evicted >= 0) --counts_[static_cast<std::size_t>(evicted)];
  ring_[cursor_] = region;
  if (region >= 0) ++counts_[static_cast<std::size_t>(region)];
  cursor_ = (cursor_ + 1) % ring_.size();
}

double GazeField::mean(int region) const {
  return static_cast<double>(counts_[static_cast<std::size_t>(region)]) / static_cast<double>(ring_.size());
}

std::vector<double> GazeField::means() const {
  std::vector<double> out(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) out[i] = mean(static_cast<int>(i));
  return out;
}

std::vector<int> GazeField::history() const {
  std::vector<int> out;
  out.reserve(ring_.size());
  for (std::size_t i = 0; i < ring_.size(); ++i) out.push_back(ring_[(cursor_ + i) % ring_.size()]);
  return out;
}

nlohmann::ordered_json GazeField::to_json() const {
  return {{"rows", grid_.rows()}, {"cols", grid_.cols()}, {"history", history()}};
}

GazeField GazeField::from_json(const nlohmann::json& j) {
  const auto history = j.at("history").get<std::vector<int>>();
  GazeField g(RegionGrid(j.at("rows").get<int>(), j.at("cols").get<int>()), static_cast<int>(history.size()));
  for (int region : history) {
    if (region < -1 || region >= g.grid_.size()) throw ParseError("gaze history region out of range");
    const int evicted = g.ring_[g.cursor_];
    if (evicted >= 0) --g.counts_[static_cast<std::size_t>(evicted)];
    g.ring_[g.cursor_] = region;
    if (region >= 0) ++g.counts_[static_cast<std::size_t>(region)];
    g.cursor_ = (g.cursor_ + 1) % g.ring_.size();
  }
  return g;
}

ProximityField::ProximityField(const RegionGrid& grid, double amplitude, double half_life_s)
    : grid_(grid),
      amplitude_(amplitude),
      half_life_s_(half_life_s),
      user_(static_cast<std::size_t>(grid.size()), 0.0),
      robot_(static_cast<std::size_t>(grid.size()), 0.0),
      last_update_(static_cast<std::size_t>(grid.size()), -1) {}

void ProximityField::infuse(Actor actor, Position pickup, double radius, Tick tick) {
  auto& mine = actor == Actor::user ? user_ : robot_;
  auto& theirs = actor == Actor::user ? robot_ : user_;
  for (int region : regions_near(pickup, radius, grid_)) {
    const auto i = static_cast<std::size_t>(region);
    mine[i] = amplitude_;
    theirs[i] = 0.0;
    last_update_[i] = tick;
  }
}

void ProximityField::decay(double dt_s) {
  const double factor = std::exp2(-dt_s / half_life_s_);
  for (auto& v : user_) v *= factor;
  for (auto& v : robot_) v *= factor;
}

double ProximityField::score(Actor actor, int region) const {
  return channel(actor)[static_cast<std::size_t>(region)];
}

nlohmann::ordered_json ProximityField::to_json() const {
  return {{"rows", grid_.rows()},       {"cols", grid_.cols()}, {"amplitude", amplitude_},
          {"half_life_s", half_life_s_}, {"user", user_},        {"robot", robot_},
          {"last_update", last_update_}};
}

ProximityField ProximityField::from_json(const nlohmann::json& j) {
  ProximityField f(RegionGrid(j.at("rows").get<int>(), j.at("cols").get<int>()), j.at("amplitude").get<double>(),
                   j.at("half_life_s").get<double>());
  f.user_ = j.at("user").get<std::vector<double>>();
  f.robot_ = j.at("robot").get<std::vector<double>>();
  f.last_update_ = j.at("last_update").get<std::vector<Tick>>();
  const auto n = static_cast<std::size_t>(f.grid_.size());
  if (f.user_.size() != n || f.robot_.size() != n || f.last_update_.size() != n) {
    throw ParseError("proximity field arrays do not match grid size");
  }
  return f;
}

ScoreField ScoreField::make(const SimConfig& config) {
  const RegionGrid grid = config.grid();
  const auto window = static_cast<int>(seconds_to_ticks(config.params.gaze_window_s, config.tick_duration));
  return {GazeField(grid, window < 1 ? 1 : window),
          ProximityField(grid, config.params.infusion_amplitude, config.params.decay_half_life_s)};
}

nlohmann::ordered_json ScoreField::to_json() const {
  return {{"gaze", gaze.to_json()}, {"proximity", proximity.to_json()}};
}

ScoreField ScoreField::from_json(const nlohmann::json& j) {
  return {GazeField::from_json(j.at("gaze")), ProximityField::from_json(j.at("proximity"))};
}

void gaze_observe(ScoreField& field, std::optional<Position> gaze_point) { field.gaze.observe(gaze_point); }

void proximity_update(ScoreField& field, const std::optional<Pickup>& pickup, double dt_s, double infusion_radius,
                      Tick tick) {
  field.proximity.decay(dt_s);
  if (pickup) field.proximity.infuse(pickup->actor, pickup->position, infusion_radius, tick);
}

std::vector<Territory> territory_classify(const GazeField& gaze, double user_threshold, double robot_threshold) {
  std::vector<Territory> out(static_cast<std::size_t>(gaze.grid().size()), Territory::group);
  for (int r = 0; r < gaze.grid().size(); ++r) {
    const double m = gaze.mean(r);
    if (m > user_threshold) {
      out[static_cast<std::size_t>(r)] = Territory::user;
    } else if (m < robot_threshold) {
      out[static_cast<std::size_t>(r)] = Territory::robot;
    }
  }
  return out;
}

std::vector<Territory> territory_classify(const ProximityField& proximity, double user_threshold,
                                          double robot_threshold) {
  std::vector<Territory> out(static_cast<std::size_t>(proximity.grid().size()), Territory::group);
  for (int r = 0; r < proximity.grid().size(); ++r) {
    const double u = proximity.score(Actor::user, r);
    const double b = proximity.score(Actor::robot, r);
    if (u > b && u > user_threshold) {
      out[static_cast<std::size_t>(r)] = Territory::user;
    } else if (b > u && b > robot_threshold) {
      out[static_cast<std::size_t>(r)] = Territory::robot;
    }
  }
  return out;
}

}  // namespace tabletop
