#include "tabletop/technique.hpp"

#include <string>

#include "tabletop/types.hpp"

namespace tabletop {

const TechniqueTraits& traits(PolicyKind kind) {
  for (const auto& t : kTechniques) {
    if (t.kind == kind) return t;
  }
  throw std::logic_error("unknown policy kind");
}

std::string_view to_string(PolicyKind kind) { return traits(kind).name; }

std::string_view to_string(TechniqueClass c) { return c == TechniqueClass::explicit_ ? "explicit" : "implicit"; }

std::string_view to_string(Perspective p) {
  switch (p) {
    case Perspective::object: return "object";
    case Perspective::robot: return "robot";
    case Perspective::workspace: return "workspace";
  }
  return "?";
}

std::string_view to_string(WorkspaceKind w) {
  switch (w) {
    case WorkspaceKind::none: return "none";
    case WorkspaceKind::static_: return "static";
    case WorkspaceKind::dynamic: return "dynamic";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view s) {
  for (const auto& t : kTechniques) {
    if (t.name == s) return t.kind;
  }
  throw ParseError("unknown technique: '" + std::string(s) + "'");
}

}  // namespace tabletop
