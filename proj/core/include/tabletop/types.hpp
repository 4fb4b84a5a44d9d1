#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabletop {

// Table plane in meters. The user sits at y = 0, the robot at y = 1.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline constexpr double kTableMin = 0.0;
inline constexpr double kTableMax = 1.0;

// Fixed anchor points just off the table edges.
inline constexpr Position kRobotBase{0.5, 1.05};
inline constexpr Position kUserAnchor{0.5, -0.05};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline bool is_finite(Position p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Position clamp_to_table(Position p) {
  auto clamp = [](double v) { return v < kTableMin ? kTableMin : (v > kTableMax ? kTableMax : v); };
  return {clamp(p.x), clamp(p.y)};
}

inline bool on_table(Position p) {
  return p.x >= kTableMin && p.x <= kTableMax && p.y >= kTableMin && p.y <= kTableMax;
}

using BlockId = int;
using StructureId = int;
using Tick = std::int64_t;

enum class Color { yellow, black };
enum class Actor { user, robot };
enum class Assignment { unassigned, robot, user };
enum class TaskType { coupled, decoupled };
enum class Placement { scattered, sorted };

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view to_string(Color c);
std::string_view to_string(Actor a);
std::string_view to_string(Assignment a);
std::string_view to_string(TaskType t);
std::string_view to_string(Placement p);

Color parse_color(std::string_view s);
Actor parse_actor(std::string_view s);
Assignment parse_assignment(std::string_view s);
TaskType parse_task_type(std::string_view s);
Placement parse_placement(std::string_view s);

// The only color the given actor can place at a goal.
inline Color placeable_color(Actor a) { return a == Actor::user ? Color::yellow : Color::black; }

}  // namespace tabletop
