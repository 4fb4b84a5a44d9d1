#include "tabletop/inputs.hpp"

#include <string>

#include "tabletop/workspace.hpp"

namespace tabletop {

std::string_view to_string(MenuChoice c) {
  switch (c) {
    case MenuChoice::to_robot: return "to_robot";
    case MenuChoice::to_self: return "to_self";
    case MenuChoice::cancel: return "cancel";
  }
  return "?";
}

MenuChoice parse_menu_choice(std::string_view s) {
  if (s == "to_robot") return MenuChoice::to_robot;
  if (s == "to_self") return MenuChoice::to_self;
  if (s == "cancel") return MenuChoice::cancel;
  throw ParseError("unknown menu choice: '" + std::string(s) + "'");
}

std::string_view to_string(UserInput::Kind k) {
  switch (k) {
    case UserInput::Kind::voice: return "voice";
    case UserInput::Kind::menu: return "menu";
    case UserInput::Kind::drag: return "drag";
    case UserInput::Kind::place: return "place";
    case UserInput::Kind::gaze: return "gaze";
  }
  return "?";
}

nlohmann::ordered_json to_json(const UserInput& in) {
  nlohmann::ordered_json j;
  j["type"] = to_string(in.kind);
  j["seq"] = in.seq;
  switch (in.kind) {
    case UserInput::Kind::voice:
      j["label"] = in.label;
      break;
    case UserInput::Kind::menu:
      j["block"] = in.block;
      j["dwell_s"] = in.dwell_s;
      j["choice"] = to_string(in.choice);
      break;
    case UserInput::Kind::drag: {
      j["block"] = in.block;
      nlohmann::ordered_json path = nlohmann::ordered_json::array();
      for (const auto& s : in.path) path.push_back({{"t", s.t_s}, {"x", s.position.x}, {"y", s.position.y}});
      j["path"] = path;
      break;
    }
    case UserInput::Kind::place:
      j["block"] = in.block;
      j["structure"] = in.structure;
      break;
    case UserInput::Kind::gaze:
      j["point"] = in.gaze ? to_json(*in.gaze) : nlohmann::ordered_json(nullptr);
      break;
  }
  return j;
}

UserInput user_input_from_json(const nlohmann::json& j) {
  try {
    UserInput in;
    const auto type = j.at("type").get<std::string>();
    in.seq = j.value("seq", 0);
    if (type == "voice") {
      in.kind = UserInput::Kind::voice;
      in.label = j.at("label").get<int>();
    } else if (type == "menu") {
      in.kind = UserInput::Kind::menu;
      in.block = j.at("block").get<int>();
      in.dwell_s = j.at("dwell_s").get<double>();
      in.choice = parse_menu_choice(j.at("choice").get<std::string>());
      if (!(in.dwell_s >= 0.0)) throw ParseError("dwell_s must be non-negative");
    } else if (type == "drag") {
      in.kind = UserInput::Kind::drag;
      in.block = j.at("block").get<int>();
      double last_t = -1e300;
      for (const auto& s : j.at("path")) {
        TimedPosition tp{s.at("t").get<double>(), {s.at("x").get<double>(), s.at("y").get<double>()}};
        if (!is_finite(tp.position) || !std::isfinite(tp.t_s)) throw ParseError("drag sample must be finite");
        if (tp.t_s < last_t) throw ParseError("drag samples must be time-ordered");
        last_t = tp.t_s;
        in.path.push_back(tp);
      }
      if (in.path.empty()) throw ParseError("drag needs at least one sample");
    } else if (type == "place") {
      in.kind = UserInput::Kind::place;
      in.block = j.at("block").get<int>();
      in.structure = j.at("structure").get<int>();
    } else if (type == "gaze") {
      in.kind = UserInput::Kind::gaze;
      const auto& p = j.at("point");
      if (!p.is_null()) in.gaze = position_from_json(p);
    } else {
      throw ParseError("unknown input type '" + type + "'");
    }
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed input: ") + e.what());
  }
}

}  // namespace tabletop
