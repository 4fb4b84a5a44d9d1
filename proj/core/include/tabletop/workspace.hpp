#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/types.hpp"

namespace tabletop {

enum class BlockState { on_table, held, placed };

std::string_view to_string(BlockState s);
BlockState parse_block_state(std::string_view s);

struct Block {
  BlockId id = 0;
  Color color = Color::yellow;
  Position position;
  BlockState state = BlockState::on_table;
  Actor holder = Actor::user;  // meaningful only while held
  StructureId placed_in = -1;  // meaningful only once placed
  Assignment assignment = Assignment::unassigned;
  int voice_label = 0;

  bool is_on_table() const { return state == BlockState::on_table; }
  bool held_by(Actor a) const { return state == BlockState::held && holder == a; }

  friend bool operator==(const Block&, const Block&) = default;
};

struct GoalStructure {
  StructureId id = 0;
  Position base;
  std::vector<Color> slots;  // bottom to top
  int filled = 0;

  bool complete() const { return filled >= static_cast<int>(slots.size()); }
  std::optional<Color> next_color() const {
    if (complete()) return std::nullopt;
    return slots[static_cast<std::size_t>(filled)];
  }

  friend bool operator==(const GoalStructure&, const GoalStructure&) = default;
};

inline constexpr int kSlotsPerStructure = 4;
inline constexpr int kStructureCount = 4;
inline constexpr int kDefaultBlockCount = kSlotsPerStructure * kStructureCount;

struct TaskConfig {
  TaskType task_type = TaskType::coupled;
  Placement placement = Placement::scattered;
  std::uint64_t seed = 0;
  int block_count = kDefaultBlockCount;

  friend bool operator==(const TaskConfig&, const TaskConfig&) = default;
};

// Spawn geometry. Blocks are discs of kBlockRadius on the table.
inline constexpr double kBlockRadius = 0.04;
inline constexpr double kMinSpawnSeparation = 0.09;
inline constexpr double kStructureClearance = 0.08;
inline constexpr int kSpawnAttemptsPerBlock = 10000;

// Rectangular discretization of the table. Region indices are row-major,
// row = floor(y / tile_height), col = floor(x / tile_width).
class RegionGrid {
 public:
  RegionGrid() = default;
  RegionGrid(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  double tile_width() const { return (kTableMax - kTableMin) / cols_; }
  double tile_height() const { return (kTableMax - kTableMin) / rows_; }

  int index(int row, int col) const { return row * cols_ + col; }
  int row_of(int index) const { return index / cols_; }
  int col_of(int index) const { return index % cols_; }
  Position center(int index) const;

  friend bool operator==(const RegionGrid&, const RegionGrid&) = default;

 private:
  int rows_ = 10;
  int cols_ = 10;
};

// Region containing p. Points outside the table are clamped first, so the
// upper boundary maps to the last tile.
int region_of(Position p, const RegionGrid& grid);

// Regions whose center lies within radius of p, always including region_of(p).
// Returned in ascending index order.
std::vector<int> regions_near(Position p, double radius, const RegionGrid& grid);

// Actor may place block on structure: colour matches the actor's capability
// and the structure's next unfilled slot.
bool placement_legal(Actor actor, const Block& block, const GoalStructure& structure);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  TaskConfig config;
  std::vector<Block> blocks;  // ids 1..N, index = id - 1
  std::vector<GoalStructure> structures;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Goal bases sit on the table midline.
std::vector<GoalStructure> make_structures(TaskType type);

struct SpawnOptions {
  double min_separation = kMinSpawnSeparation;
  double structure_clearance = kStructureClearance;
  int attempts_per_block = kSpawnAttemptsPerBlock;
};

// Throws ScenarioError when the block count does not match the goal demand
// or when a block cannot be placed clear of the others within the attempt budget.
Scenario generate_scenario(const TaskConfig& config, const SpawnOptions& options = {});

bool task_complete(const std::vector<GoalStructure>& structures);

nlohmann::ordered_json to_json(const Position& p);
Position position_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Block& b);
Block block_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const GoalStructure& s);
GoalStructure structure_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const TaskConfig& c);
TaskConfig task_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace tabletop
