#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/types.hpp"

namespace tabletop {

enum class MenuChoice { to_robot, to_self, cancel };

std::string_view to_string(MenuChoice c);
MenuChoice parse_menu_choice(std::string_view s);

struct TimedPosition {
  double t_s = 0.0;
  Position position;

  friend bool operator==(const TimedPosition&, const TimedPosition&) = default;
};

// One discrete input from a live participant. Drags carry the sampled block
// path with client timestamps; the final sample is the release point.
struct UserInput {
  enum class Kind { voice, menu, drag, place, gaze };

  Kind kind = Kind::gaze;
  int seq = 0;
  BlockId block = 0;
  int label = 0;
  StructureId structure = -1;
  double dwell_s = 0.0;
  MenuChoice choice = MenuChoice::to_robot;
  std::vector<TimedPosition> path;
  std::optional<Position> gaze;

  friend bool operator==(const UserInput&, const UserInput&) = default;
};

std::string_view to_string(UserInput::Kind k);

nlohmann::ordered_json to_json(const UserInput& input);
// Throws ParseError on missing or malformed fields.
UserInput user_input_from_json(const nlohmann::json& j);

}  // namespace tabletop
