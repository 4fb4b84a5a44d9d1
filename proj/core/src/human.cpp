#include "tabletop/human.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tabletop/robot.hpp"

namespace tabletop {

namespace {

template <typename T>
void maybe_read(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) field = it->get<T>();
}

constexpr double kEdgeMargin = 0.02;

bool within_margin(Position p) {
  return p.x >= kEdgeMargin && p.x <= 1.0 - kEdgeMargin && p.y >= kEdgeMargin && p.y <= 1.0 - kEdgeMargin;
}

Position toward(Position from, Position to, double length) {
  const double d = distance(from, to);
  if (d == 0.0) return from;
  return {from.x + (to.x - from.x) / d * length, from.y + (to.y - from.y) / d * length};
}

bool needs_yellow(const GoalStructure& s) {
  for (std::size_t i = static_cast<std::size_t>(s.filled); i < s.slots.size(); ++i) {
    if (s.slots[i] == Color::yellow) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(HumanModelKind k) {
  switch (k) {
    case HumanModelKind::focused_builder: return "focused_builder";
    case HumanModelKind::eager_manager: return "eager_manager";
    case HumanModelKind::guardian: return "guardian";
  }
  return "?";
}

std::string_view to_string(GazeMode g) {
  switch (g) {
    case GazeMode::follow_manipulation: return "follow_manipulation";
    case GazeMode::fixed_point: return "fixed_point";
    case GazeMode::sweep: return "sweep";
  }
  return "?";
}

HumanModelKind parse_human_model_kind(std::string_view s) {
  if (s == "focused_builder") return HumanModelKind::focused_builder;
  if (s == "eager_manager") return HumanModelKind::eager_manager;
  if (s == "guardian") return HumanModelKind::guardian;
  throw ParseError("unknown human model: '" + std::string(s) + "'");
}

GazeMode parse_gaze_mode(std::string_view s) {
  if (s == "follow_manipulation") return GazeMode::follow_manipulation;
  if (s == "fixed_point") return GazeMode::fixed_point;
  if (s == "sweep") return GazeMode::sweep;
  throw ParseError("unknown gaze mode: '" + std::string(s) + "'");
}

std::string_view to_string(HumanAction::Kind k) {
  switch (k) {
    case HumanAction::Kind::idle: return "idle";
    case HumanAction::Kind::reach: return "reach";
    case HumanAction::Kind::pick: return "pick";
    case HumanAction::Kind::place: return "place";
    case HumanAction::Kind::maneuver: return "maneuver";
    case HumanAction::Kind::push: return "push";
    case HumanAction::Kind::menu_dwell: return "menu_dwell";
    case HumanAction::Kind::voice: return "voice";
  }
  return "?";
}

void validate(const HumanModel& m) {
  if (!(m.speed_multiplier > 0.0)) throw std::invalid_argument("speed_multiplier must be positive");
  if (m.allocation_batch < 1) throw std::invalid_argument("allocation_batch must be at least 1");
  if (!(m.sweep_period_s > 0.0)) throw std::invalid_argument("sweep_period_s must be positive");
  if (!(m.push_distance > 0.0)) throw std::invalid_argument("push_distance must be positive");
  if (!(m.stash_max_y > 0.0 && m.stash_max_y < 1.0)) throw std::invalid_argument("stash_max_y must be in (0,1)");
  if (!is_finite(m.gaze_fixed_point)) throw std::invalid_argument("gaze_fixed_point must be finite");
}

nlohmann::ordered_json to_json(const HumanModel& m) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(m.kind);
  j["speed_multiplier"] = m.speed_multiplier;
  j["allocation_batch"] = m.allocation_batch;
  j["gaze_mode"] = to_string(m.gaze_mode);
  j["gaze_fixed_point"] = to_json(m.gaze_fixed_point);
  j["sweep_period_s"] = m.sweep_period_s;
  j["stash_max_y"] = m.stash_max_y;
  j["push_distance"] = m.push_distance;
  return j;
}

HumanModel human_model_from_json(const nlohmann::json& j, HumanModel m) {
  if (j.is_string()) {
    m.kind = parse_human_model_kind(j.get<std::string>());
    return m;
  }
  if (auto it = j.find("kind"); it != j.end()) m.kind = parse_human_model_kind(it->get<std::string>());
  if (auto it = j.find("gaze_mode"); it != j.end()) m.gaze_mode = parse_gaze_mode(it->get<std::string>());
  if (auto it = j.find("gaze_fixed_point"); it != j.end()) m.gaze_fixed_point = position_from_json(*it);
  maybe_read(j, "speed_multiplier", m.speed_multiplier);
  maybe_read(j, "allocation_batch", m.allocation_batch);
  maybe_read(j, "sweep_period_s", m.sweep_period_s);
  maybe_read(j, "stash_max_y", m.stash_max_y);
  maybe_read(j, "push_distance", m.push_distance);
  validate(m);
  return m;
}

bool robot_idle(const HumanContext& ctx) {
  return !ctx.robot_busy && !ctx.world.robot.held && !actionable_queue_front(ctx.world);
}

std::vector<UserInput> HumanActionSource::take_inputs(Tick) { return {}; }

std::optional<Position> find_free_spot(const WorldState& world, BlockId moving, Position near, double min_y,
                                       double max_y) {
  constexpr double kStep = 0.05;
  std::optional<Position> best;
  double best_d = 0.0;
  for (int iy = 0; iy <= 20; ++iy) {
    const double y = kStep * iy;
    if (y < min_y || y > max_y || y < 0.05 || y > 0.95) continue;
    for (int ix = 1; ix <= 19; ++ix) {
      const Position p{kStep * ix, y};
      bool clear = true;
      for (const auto& b : world.blocks) {
        if (b.id == moving || !b.is_on_table()) continue;
        if (distance(b.position, p) < kMinSpawnSeparation) {
          clear = false;
          break;
        }
      }
      for (const auto& s : world.structures) {
        if (clear && distance(s.base, p) < kStructureClearance) clear = false;
      }
      if (!clear) continue;
      const double d = distance(p, near);
      if (!best || d < best_d) {
        best = p;
        best_d = d;
      }
    }
  }
  return best;
}

HumanAction ScriptedHuman::issue(HumanAction action) {
  if (plan_ && !plan_->started) {
    action.new_chain = true;
    plan_->started = true;
  }
  return action;
}

// The eager manager fills whichever yellow slot is open. The other models
// stay with one structure until it is complete, so in the coupled task they
// wait for the robot's blacks on it before starting the next.
std::optional<StructureId> ScriptedHuman::build_target(const WorldState& w) {
  if (model_.kind == HumanModelKind::eager_manager) {
    std::optional<StructureId> best;
    double best_d = 0.0;
    for (const auto& s : w.structures) {
      if (s.next_color() != Color::yellow) continue;
      const double d = distance(w.human.hand, s.base);
      if (!best || d < best_d) {
        best = s.id;
        best_d = d;
      }
    }
    return best;
  }
  if (!own_structure_ || w.structure(*own_structure_).complete()) {
    own_structure_.reset();
    double best_d = 0.0;
    for (const auto& s : w.structures) {
      if (!needs_yellow(s)) continue;
      const double d = distance(w.human.hand, s.base);
      if (!own_structure_ || d < best_d) {
        own_structure_ = s.id;
        best_d = d;
      }
    }
  }
  if (own_structure_ && w.structure(*own_structure_).next_color() == Color::yellow) return own_structure_;
  return std::nullopt;
}

std::optional<ScriptedHuman::Plan> ScriptedHuman::build_plan(const HumanContext& ctx) {
  const WorldState& w = ctx.world;
  if (!build_target(w)) return std::nullopt;
  std::optional<Plan> best;
  double best_d = 0.0;
  for (const auto& b : w.blocks) {
    if (b.color != Color::yellow || !b.is_on_table()) continue;
    const double d = distance(w.human.hand, b.position);
    if (!best || d < best_d) {
      best = Plan{Goal::build, b.id, {}, {}, false, false};
      best_d = d;
    }
  }
  return best;
}

std::optional<ScriptedHuman::Plan> ScriptedHuman::allocation_plan(const HumanContext& ctx) {
  const WorldState& w = ctx.world;
  const PolicyKind tech = ctx.policy.kind();
  std::optional<BlockId> pick;
  double best_d = 0.0;
  for (const auto& b : w.blocks) {
    if (b.color != Color::black || !b.is_on_table() || b.assignment != Assignment::unassigned) continue;
    // Voice needs no reach, so the lowest label is spoken; physical techniques take the nearest block.
    const double d = tech == PolicyKind::voice ? static_cast<double>(b.voice_label) : distance(w.human.hand, b.position);
    if (!pick || d < best_d) {
      pick = b.id;
      best_d = d;
    }
  }
  if (!pick) return std::nullopt;

  Plan plan{Goal::allocate, *pick, {}, {}, false, false};
  const Block& b = w.block(*pick);
  const PolicyParams& params = ctx.config.params;
  if (tech == PolicyKind::fixed) {
    if (fixed_territory_owner(b.position, params) == Territory::robot) {
      plan.destination = b.position;
    } else {
      const Position near{b.position.x, params.fixed_robot_band_min + 0.1};
      plan.destination = find_free_spot(w, b.id, near, params.fixed_robot_band_min + 0.05, 0.95)
                             .value_or(Position{b.position.x, params.fixed_robot_band_min + 0.15});
    }
  } else if (tech == PolicyKind::subtle) {
    const Position direct = toward(b.position, w.robot.base, model_.push_distance);
    if (within_margin(direct)) {
      plan.push_end = direct;
    } else {
      plan.needs_stage = true;
      Position stage{0.5, 0.62};
      for (int k = 1; k <= 12; ++k) {
        const Position back = toward(b.position, w.robot.base, -0.05 * k);
        const Position s{std::clamp(back.x, 0.05, 0.95), std::clamp(back.y, 0.05, 0.95)};
        if (within_margin(toward(s, w.robot.base, model_.push_distance))) {
          stage = s;
          break;
        }
      }
      plan.destination = stage;
      plan.push_end = toward(stage, w.robot.base, model_.push_distance);
    }
  }
  return plan;
}

std::optional<ScriptedHuman::Plan> ScriptedHuman::relocation_plan(const HumanContext& ctx) {
  const WorldState& w = ctx.world;
  auto threatened = [&](std::optional<BlockId> id) {
    return id && w.has_block(*id) && w.block(*id).color == Color::yellow && w.block(*id).is_on_table() &&
           !relocated_.contains(*id);
  };
  std::optional<BlockId> target;
  if (threatened(ctx.robot_target)) {
    target = ctx.robot_target;
  } else {
    const PolicyContext pctx{ctx.config.params, ctx.config.tick_duration};
    const auto predicted = ctx.policy.select(w, pctx);
    if (threatened(predicted)) target = predicted;
  }
  if (!target) return std::nullopt;
  relocated_.insert(*target);
  const Block& b = w.block(*target);
  const auto spot = find_free_spot(w, b.id, {b.position.x, 0.05}, 0.05, model_.stash_max_y);
  if (!spot) return std::nullopt;
  return Plan{Goal::relocate, b.id, *spot, {}, false, false};
}

std::optional<ScriptedHuman::Plan> ScriptedHuman::choose_plan(const HumanContext& ctx) {
  const PolicyKind tech = ctx.policy.kind();
  if (is_explicit(tech)) {
    if (model_.kind == HumanModelKind::eager_manager) {
      if (auto p = allocation_plan(ctx)) return p;
    } else {
      if (batch_left_ == 0 && robot_idle(ctx)) batch_left_ = model_.allocation_batch;
      if (batch_left_ > 0) {
        if (auto p = allocation_plan(ctx)) {
          --batch_left_;
          return p;
        }
        batch_left_ = 0;
      }
    }
  } else if (model_.kind == HumanModelKind::guardian) {
    if (auto p = relocation_plan(ctx)) return p;
  }
  return build_plan(ctx);
}

HumanAction ScriptedHuman::advance(const HumanContext& ctx) {
  const WorldState& w = ctx.world;
  const PolicyKind tech = ctx.policy.kind();

  if (w.human.held) {
    const BlockId held = *w.human.held;
    HumanAction a;
    a.block = held;
    if (plan_ && plan_->block == held && plan_->goal != Goal::build) {
      a.kind = HumanAction::Kind::maneuver;
      a.destination = plan_->destination;
      if (plan_->goal == Goal::allocate && tech == PolicyKind::subtle) {
        plan_->needs_stage = false;
      } else {
        plan_.reset();
      }
      return a;
    }
    plan_.reset();
    auto s = build_target(w);
    if (!s || !placement_legal(w, Actor::user, held, *s)) s = nearest_legal_structure(w, Actor::user, held, w.human.hand);
    if (s) {
      a.kind = HumanAction::Kind::place;
      a.structure = *s;
      a.destination = w.structure(*s).base;
      return a;
    }
    // Nothing to do with it: set it back down where the hand is.
    a.kind = HumanAction::Kind::maneuver;
    a.destination = w.human.hand;
    return a;
  }

  if (plan_) {
    const Block& b = w.block(plan_->block);
    const bool valid = b.is_on_table() && (plan_->goal != Goal::build || build_target(w)) &&
                       (plan_->goal != Goal::allocate || b.assignment == Assignment::unassigned || plan_->started);
    if (!valid) plan_.reset();
  }
  if (!plan_) plan_ = choose_plan(ctx);
  if (!plan_) return {};

  const Block& b = w.block(plan_->block);
  HumanAction a;
  a.block = b.id;
  if (plan_->goal == Goal::allocate && tech == PolicyKind::voice) {
    a.kind = HumanAction::Kind::voice;
    a.label = b.voice_label;
    a = issue(a);
    plan_.reset();
    return a;
  }
  if (distance(w.human.hand, b.position) > ctx.config.grasp_radius) {
    a.kind = HumanAction::Kind::reach;
    a.destination = b.position;
    return issue(a);
  }
  if (plan_->goal == Goal::allocate && tech == PolicyKind::menu) {
    a.kind = HumanAction::Kind::menu_dwell;
    a.choice = MenuChoice::to_robot;
    a.dwell_ticks = seconds_to_ticks(ctx.config.params.menu_dwell_s, ctx.config.tick_duration);
    a = issue(a);
    plan_.reset();
    return a;
  }
  if (plan_->goal == Goal::allocate && tech == PolicyKind::subtle && !plan_->needs_stage) {
    a.kind = HumanAction::Kind::push;
    a.destination = plan_->push_end;
    a = issue(a);
    plan_.reset();
    return a;
  }
  a.kind = HumanAction::Kind::pick;
  return issue(a);
}

HumanAction ScriptedHuman::next_action(const HumanContext& ctx) { return advance(ctx); }

std::optional<Position> ScriptedHuman::gaze_point(const HumanContext& ctx) {
  switch (model_.gaze_mode) {
    case GazeMode::follow_manipulation:
      if (ctx.focus) last_focus_ = ctx.focus;
      if (last_focus_ && on_table(*last_focus_)) return last_focus_;
      return std::nullopt;
    case GazeMode::fixed_point:
      return model_.gaze_fixed_point;
    case GazeMode::sweep: {
      const double t = static_cast<double>(ctx.world.tick) * ctx.config.tick_duration;
      return Position{0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * t / model_.sweep_period_s), 0.3};
    }
  }
  return std::nullopt;
}

void InputDrivenHuman::push(Tick apply_tick, UserInput input) { queue_[apply_tick].push_back(std::move(input)); }

std::vector<UserInput> InputDrivenHuman::take_inputs(Tick tick) {
  std::vector<UserInput> out;
  while (!queue_.empty() && queue_.begin()->first <= tick) {
    for (auto& in : queue_.begin()->second) {
      if (in.kind == UserInput::Kind::gaze) gaze_ = in.gaze;
      out.push_back(std::move(in));
    }
    queue_.erase(queue_.begin());
  }
  return out;
}

}  // namespace tabletop
