#pragma once

#include <array>
#include <string_view>

namespace tabletop {

enum class PolicyKind { voice, menu, subtle, fixed, proactive, distance, gaze, proximity };

enum class TechniqueClass { explicit_, implicit };
enum class Perspective { object, robot, workspace };
enum class WorkspaceKind { none, static_, dynamic };

struct TechniqueTraits {
  PolicyKind kind;
  std::string_view name;
  TechniqueClass technique_class;
  Perspective perspective;
  WorkspaceKind workspace;
};

// The design-space dimensions of each technique.
inline constexpr std::array<TechniqueTraits, 8> kTechniques{{
    {PolicyKind::voice, "voice", TechniqueClass::explicit_, Perspective::object, WorkspaceKind::none},
    {PolicyKind::menu, "menu", TechniqueClass::explicit_, Perspective::object, WorkspaceKind::none},
    {PolicyKind::subtle, "subtle", TechniqueClass::explicit_, Perspective::robot, WorkspaceKind::none},
    {PolicyKind::fixed, "fixed", TechniqueClass::explicit_, Perspective::workspace, WorkspaceKind::static_},
    {PolicyKind::proactive, "proactive", TechniqueClass::implicit, Perspective::robot, WorkspaceKind::none},
    {PolicyKind::distance, "distance", TechniqueClass::implicit, Perspective::robot, WorkspaceKind::none},
    {PolicyKind::gaze, "gaze", TechniqueClass::implicit, Perspective::workspace, WorkspaceKind::dynamic},
    {PolicyKind::proximity, "proximity", TechniqueClass::implicit, Perspective::workspace, WorkspaceKind::dynamic},
}};

const TechniqueTraits& traits(PolicyKind kind);
inline bool is_explicit(PolicyKind kind) { return traits(kind).technique_class == TechniqueClass::explicit_; }
inline bool is_implicit(PolicyKind kind) { return !is_explicit(kind); }

std::string_view to_string(PolicyKind kind);
std::string_view to_string(TechniqueClass c);
std::string_view to_string(Perspective p);
std::string_view to_string(WorkspaceKind w);
PolicyKind parse_policy_kind(std::string_view s);

}  // namespace tabletop
