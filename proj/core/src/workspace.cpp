#include "tabletop/workspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "tabletop/rng.hpp"

namespace tabletop {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw ParseError("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

constexpr std::array<std::pair<std::string_view, Color>, 2> kColors{{{"yellow", Color::yellow},
                                                                     {"black", Color::black}}};
constexpr std::array<std::pair<std::string_view, Actor>, 2> kActors{{{"user", Actor::user},
                                                                     {"robot", Actor::robot}}};
constexpr std::array<std::pair<std::string_view, Assignment>, 3> kAssignments{
    {{"unassigned", Assignment::unassigned}, {"robot", Assignment::robot}, {"user", Assignment::user}}};
constexpr std::array<std::pair<std::string_view, TaskType>, 2> kTaskTypes{
    {{"coupled", TaskType::coupled}, {"decoupled", TaskType::decoupled}}};
constexpr std::array<std::pair<std::string_view, Placement>, 2> kPlacements{
    {{"scattered", Placement::scattered}, {"sorted", Placement::sorted}}};
constexpr std::array<std::pair<std::string_view, BlockState>, 3> kBlockStates{
    {{"on_table", BlockState::on_table}, {"held", BlockState::held}, {"placed", BlockState::placed}}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum v, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, value] : table) {
    if (value == v) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(Color c) { return name_of(c, kColors); }
std::string_view to_string(Actor a) { return name_of(a, kActors); }
std::string_view to_string(Assignment a) { return name_of(a, kAssignments); }
std::string_view to_string(TaskType t) { return name_of(t, kTaskTypes); }
std::string_view to_string(Placement p) { return name_of(p, kPlacements); }
std::string_view to_string(BlockState s) { return name_of(s, kBlockStates); }

Color parse_color(std::string_view s) { return parse_enum(s, kColors, "color"); }
Actor parse_actor(std::string_view s) { return parse_enum(s, kActors, "actor"); }
Assignment parse_assignment(std::string_view s) { return parse_enum(s, kAssignments, "assignment"); }
TaskType parse_task_type(std::string_view s) { return parse_enum(s, kTaskTypes, "task type"); }
Placement parse_placement(std::string_view s) { return parse_enum(s, kPlacements, "placement"); }
BlockState parse_block_state(std::string_view s) { return parse_enum(s, kBlockStates, "block state"); }

RegionGrid::RegionGrid(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("region grid dimensions must be positive");
}

Position RegionGrid::center(int index) const {
  return {(col_of(index) + 0.5) * tile_width(), (row_of(index) + 0.5) * tile_height()};
}

int region_of(Position p, const RegionGrid& grid) {
  const Position c = clamp_to_table(p);
  const int col = std::min(static_cast<int>(std::floor(c.x / grid.tile_width())), grid.cols() - 1);
  const int row = std::min(static_cast<int>(std::floor(c.y / grid.tile_height())), grid.rows() - 1);
  return grid.index(row, col);
}

std::vector<int> regions_near(Position p, double radius, const RegionGrid& grid) {
  const int own = region_of(p, grid);
  std::vector<int> out;
  // Only tiles inside the bounding box of the query circle can qualify.
  const int col_lo = std::max(0, static_cast<int>(std::floor((p.x - radius) / grid.tile_width())) - 1);
  const int col_hi = std::min(grid.cols() - 1, static_cast<int>(std::floor((p.x + radius) / grid.tile_width())) + 1);
  const int row_lo = std::max(0, static_cast<int>(std::floor((p.y - radius) / grid.tile_height())) - 1);
  const int row_hi = std::min(grid.rows() - 1, static_cast<int>(std::floor((p.y + radius) / grid.tile_height())) + 1);
  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      const int idx = grid.index(row, col);
      if (idx == own || distance(grid.center(idx), p) <= radius) out.push_back(idx);
    }
  }
  if (std::find(out.begin(), out.end(), own) == out.end()) {
    out.push_back(own);
    std::sort(out.begin(), out.end());
  }
  return out;
}

bool placement_legal(Actor actor, const Block& block, const GoalStructure& structure) {
  if (block.color != placeable_color(actor)) return false;
  const auto next = structure.next_color();
  return next.has_value() && *next == block.color;
}

std::vector<GoalStructure> make_structures(TaskType type) {
  std::vector<GoalStructure> out;
  for (int i = 0; i < kStructureCount; ++i) {
    GoalStructure s;
    s.id = i;
    s.base = {0.2 + 0.2 * i, 0.5};
    if (type == TaskType::coupled) {
      s.slots = {Color::yellow, Color::black, Color::yellow, Color::black};
    } else {
      const Color c = i < kStructureCount / 2 ? Color::yellow : Color::black;
      s.slots.assign(kSlotsPerStructure, c);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Scenario generate_scenario(const TaskConfig& config, const SpawnOptions& options) {
  Scenario scenario;
  scenario.config = config;
  scenario.structures = make_structures(config.task_type);

  int yellow_demand = 0;
  int black_demand = 0;
  for (const auto& s : scenario.structures) {
    for (Color c : s.slots) (c == Color::yellow ? yellow_demand : black_demand)++;
  }
  if (config.block_count != yellow_demand + black_demand) {
    throw ScenarioError("block_count " + std::to_string(config.block_count) + " does not match goal demand " +
                        std::to_string(yellow_demand + black_demand));
  }

  DeterministicRng rng(config.seed);

  // Colors are shuffled over ids so that id order carries no color information.
  std::vector<Color> colors;
  colors.insert(colors.end(), static_cast<std::size_t>(yellow_demand), Color::yellow);
  colors.insert(colors.end(), static_cast<std::size_t>(black_demand), Color::black);
  for (std::size_t i = colors.size(); i > 1; --i) {
    std::swap(colors[i - 1], colors[rng.below(i)]);
  }

  const double lo = kTableMin + kBlockRadius;
  const double hi = kTableMax - kBlockRadius;
  const double mid = 0.5 * (kTableMin + kTableMax);

  for (int i = 0; i < config.block_count; ++i) {
    Block b;
    b.id = i + 1;
    b.voice_label = b.id;
    b.color = colors[static_cast<std::size_t>(i)];

    double y_lo = lo;
    double y_hi = hi;
    if (config.placement == Placement::sorted) {
      if (b.color == Color::yellow) {
        y_hi = mid - kBlockRadius;
      } else {
        y_lo = mid + kBlockRadius;
      }
    }

    bool placed = false;
    for (int attempt = 0; attempt < options.attempts_per_block && !placed; ++attempt) {
      const Position p{rng.uniform(lo, hi), rng.uniform(y_lo, y_hi)};
      const bool clear_of_blocks = std::all_of(scenario.blocks.begin(), scenario.blocks.end(), [&](const Block& o) {
        return distance(o.position, p) >= options.min_separation;
      });
      const bool clear_of_goals =
          std::all_of(scenario.structures.begin(), scenario.structures.end(),
                      [&](const GoalStructure& s) { return distance(s.base, p) >= options.structure_clearance; });
      if (clear_of_blocks && clear_of_goals) {
        b.position = p;
        placed = true;
      }
    }
    if (!placed) {
      throw ScenarioError("could not place block " + std::to_string(b.id) + " without overlap after " +
                          std::to_string(options.attempts_per_block) + " attempts");
    }
    scenario.blocks.push_back(b);
  }
  return scenario;
}

bool task_complete(const std::vector<GoalStructure>& structures) {
  return std::all_of(structures.begin(), structures.end(), [](const GoalStructure& s) { return s.complete(); });
}

nlohmann::ordered_json to_json(const Position& p) { return {{"x", p.x}, {"y", p.y}}; }

Position position_from_json(const nlohmann::json& j) {
  Position p{j.at("x").get<double>(), j.at("y").get<double>()};
  if (!is_finite(p)) throw ParseError("position must be finite");
  return p;
}

nlohmann::ordered_json to_json(const Block& b) {
  nlohmann::ordered_json j;
  j["id"] = b.id;
  j["color"] = to_string(b.color);
  j["position"] = to_json(b.position);
  j["state"] = to_string(b.state);
  if (b.state == BlockState::held) j["holder"] = to_string(b.holder);
  if (b.state == BlockState::placed) j["structure"] = b.placed_in;
  j["assignment"] = to_string(b.assignment);
  j["voice_label"] = b.voice_label;
  return j;
}

Block block_from_json(const nlohmann::json& j) {
  Block b;
  b.id = j.at("id").get<int>();
  b.color = parse_color(j.at("color").get<std::string>());
  b.position = position_from_json(j.at("position"));
  b.state = parse_block_state(j.value("state", std::string("on_table")));
  if (b.state == BlockState::held) b.holder = parse_actor(j.at("holder").get<std::string>());
  if (b.state == BlockState::placed) b.placed_in = j.at("structure").get<int>();
  b.assignment = parse_assignment(j.value("assignment", std::string("unassigned")));
  b.voice_label = j.value("voice_label", b.id);
  return b;
}

nlohmann::ordered_json to_json(const GoalStructure& s) {
  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (Color c : s.slots) slots.push_back(to_string(c));
  return {{"id", s.id}, {"base", to_json(s.base)}, {"slots", slots}, {"filled", s.filled}};
}

GoalStructure structure_from_json(const nlohmann::json& j) {
  GoalStructure s;
  s.id = j.at("id").get<int>();
  s.base = position_from_json(j.at("base"));
  for (const auto& c : j.at("slots")) s.slots.push_back(parse_color(c.get<std::string>()));
  s.filled = j.value("filled", 0);
  if (s.filled < 0 || s.filled > static_cast<int>(s.slots.size())) throw ParseError("structure fill out of range");
  return s;
}

nlohmann::ordered_json to_json(const TaskConfig& c) {
  return {{"task_type", to_string(c.task_type)},
          {"placement", to_string(c.placement)},
          {"seed", c.seed},
          {"block_count", c.block_count}};
}

TaskConfig task_config_from_json(const nlohmann::json& j) {
  TaskConfig c;
  c.task_type = parse_task_type(j.at("task_type").get<std::string>());
  c.placement = parse_placement(j.at("placement").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.block_count = j.value("block_count", kDefaultBlockCount);
  return c;
}

nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : s.blocks) blocks.push_back(to_json(b));
  nlohmann::ordered_json structures = nlohmann::ordered_json::array();
  for (const auto& g : s.structures) structures.push_back(to_json(g));
  return {{"config", to_json(s.config)}, {"seed", s.config.seed}, {"blocks", blocks}, {"structures", structures}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.config = task_config_from_json(j.at("config"));
  for (const auto& b : j.at("blocks")) s.blocks.push_back(block_from_json(b));
  for (const auto& g : j.at("structures")) s.structures.push_back(structure_from_json(g));
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    if (s.blocks[i].id != static_cast<int>(i) + 1) throw ParseError("scenario block ids must be 1..N in order");
  }
  return s;
}

}  // namespace tabletop
