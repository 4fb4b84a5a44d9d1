#include "tabletop/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "tabletop/robot.hpp"

namespace tabletop {

namespace {

constexpr std::uint64_t kEngineStream = 0x9E3779B97F4A7C15ULL;

Tick at_least_one(Tick t) { return std::max<Tick>(t, 1); }

// Effects after which a robot manipulation is over.
bool ends_chain(ActionEffect e) { return e != ActionEffect::arrived && e != ActionEffect::picked; }

std::optional<BlockId> block_with_label(const WorldState& w, int label) {
  for (const auto& b : w.blocks) {
    if (b.voice_label == label) return b.id;
  }
  return std::nullopt;
}

}  // namespace

Engine::Engine(const Scenario& scenario, const SimConfig& config, PolicyKind technique, HumanActionSource& human,
               Tick tick_limit)
    : config_(config),
      technique_(technique),
      policy_(make_policy(technique)),
      human_(human),
      tick_limit_(tick_limit),
      rng_(scenario.config.seed ^ kEngineStream),
      world_(WorldState::from_scenario(scenario, config)) {
  validate(config_);
  if (tick_limit_ <= 0) throw std::invalid_argument("tick_limit must be positive");
  log_.header.seed = scenario.config.seed;
  log_.header.technique = technique;
  log_.header.human_model = human.name();
  log_.header.tick_limit = tick_limit;
  log_.header.scenario = scenario;
  log_.header.config = config;
}

void Engine::emit(Event e) {
  apply_event(world_, e);
  log_.events.push_back(std::move(e));
}

void Engine::record(Lane& lane, const Activity& a, Tick end, ActionEffect effect, std::optional<Position> to) {
  emit(ActionRecord{lane.actor, a.kind, a.block, a.structure, a.start, end, a.chain, effect, to});
  if (lane.actor == Actor::robot && ends_chain(effect)) lane.chain_open = false;
}

void Engine::close_idle(Lane& lane, Tick until) {
  if (lane.idle_since && until > *lane.idle_since) {
    emit(ActionRecord{lane.actor, ActionKind::idle, std::nullopt, std::nullopt, *lane.idle_since, until, 0,
                      ActionEffect::none, std::nullopt});
  }
  lane.idle_since.reset();
}

void Engine::go_idle(Lane& lane) {
  if (!lane.idle_since) lane.idle_since = world_.tick;
}

void Engine::start(Lane& lane, Activity a) {
  close_idle(lane, world_.tick);
  a.start = world_.tick;
  lane.current = a;
}

void Engine::apply_allocation(const std::optional<AllocationDecision>& d, AllocationReason reason) {
  if (d) emit(AllocationEvent{world_.tick, d->block, d->assignment, technique_, reason});
}

void Engine::apply_interpretation(const Interpretation& in) {
  if (in.warning) emit(WarningEvent{world_.tick, *in.warning});
  apply_allocation(in.decision, AllocationReason::user_input);
}

void Engine::unassign_after_robot_failure(BlockId block, AllocationReason reason) {
  const Block& b = world_.block(block);
  if (b.state == BlockState::placed || b.assignment != Assignment::robot) return;
  if (reason == AllocationReason::pick_abort && !is_implicit(technique_)) return;
  emit(AllocationEvent{world_.tick, block, Assignment::unassigned, technique_, reason});
}

MotionModel Engine::human_motion() const {
  MotionModel m = config_.human_motion;
  const double k = human_.speed_multiplier();
  m.reach_speed *= k;
  m.pick_duration_s /= k;
  m.place_duration_s /= k;
  return m;
}

HumanContext Engine::human_context() const {
  HumanContext ctx{world_, *policy_, config_, false, std::nullopt, std::nullopt};
  ctx.robot_busy = robot_.current.has_value();
  if (robot_.current && (robot_.current->kind == ActionKind::reach || robot_.current->kind == ActionKind::pick)) {
    ctx.robot_target = robot_.current->block;
  }
  if (user_.current) ctx.focus = user_.current->focus;
  return ctx;
}

// ---- live inputs ----------------------------------------------------------

void Engine::retro_record(ActionKind kind, std::optional<BlockId> block, std::optional<StructureId> structure,
                          Tick span, ActionEffect effect, std::optional<Position> to) {
  const Tick now = world_.tick;
  const Tick floor = user_.idle_since.value_or(now);
  const Tick begin = std::max(now - span, floor);
  close_idle(user_, begin);
  user_.chain = next_chain();
  emit(ActionRecord{Actor::user, kind, block, structure, begin, now, user_.chain, effect, to});
  user_.idle_since = now;
}

void Engine::apply_live_input(const UserInput& input) {
  const Tick now = world_.tick;
  auto reject = [&](const std::string& why) {
    emit(RejectionEvent{now, Actor::user, "input " + std::to_string(input.seq) + ": " + why});
  };
  if (user_.current) {
    reject("human is busy");
    return;
  }
  const PolicyContext pctx = policy_context();
  const MotionModel motion = human_motion();
  switch (input.kind) {
    case UserInput::Kind::gaze:
      return;
    case UserInput::Kind::voice: {
      const auto interp = policy_->interpret(world_, VoiceSignal{input.label}, pctx);
      if (const auto block = block_with_label(world_, input.label)) {
        retro_record(ActionKind::allocate_gesture, block, std::nullopt,
                     seconds_to_ticks(config_.params.voice_utterance_s, config_.tick_duration),
                     interp.decision ? ActionEffect::allocated : ActionEffect::gesture_missed, std::nullopt);
      }
      apply_interpretation(interp);
      return;
    }
    case UserInput::Kind::menu: {
      if (!world_.has_block(input.block) || !world_.block(input.block).is_on_table()) {
        reject("block " + std::to_string(input.block) + " is not on the table");
        return;
      }
      const Tick dwell = seconds_to_ticks(input.dwell_s, config_.tick_duration);
      const auto interp = policy_->interpret(world_, MenuSignal{input.block, dwell, input.choice}, pctx);
      retro_record(ActionKind::menu_dwell, input.block, std::nullopt, dwell,
                   interp.decision ? ActionEffect::allocated : ActionEffect::dwell_released, std::nullopt);
      apply_interpretation(interp);
      return;
    }
    case UserInput::Kind::drag: {
      if (!world_.has_block(input.block) || !world_.block(input.block).is_on_table()) {
        reject("block " + std::to_string(input.block) + " is not on the table");
        return;
      }
      const Position from = world_.block(input.block).position;
      const Position to = clamp_to_table(input.path.back().position);
      const Tick span = seconds_to_ticks(input.path.back().t_s - input.path.front().t_s, config_.tick_duration);
      const bool slide = technique_ == PolicyKind::subtle;
      Interpretation interp;
      if (slide) {
        interp = policy_->interpret(world_, GestureSignal{input.block, input.path}, pctx);
      } else {
        interp = policy_->interpret(world_, ReleaseSignal{input.block, to}, pctx);
      }
      const ActionEffect effect = interp.decision ? ActionEffect::allocated
                                  : slide         ? ActionEffect::gesture_missed
                                                  : ActionEffect::released;
      retro_record(slide ? ActionKind::allocate_gesture : ActionKind::maneuver, input.block, std::nullopt, span,
                   effect, to);
      if (!slide) {
        emit(PickEvent{now, Actor::user, input.block, PickResult::success, from});
        pickups_.push_back({Actor::user, from});
      }
      emit(ReleaseEvent{now, Actor::user, input.block, to});
      apply_interpretation(interp);
      return;
    }
    case UserInput::Kind::place: {
      if (!world_.has_block(input.block) || !world_.block(input.block).is_on_table()) {
        reject("block " + std::to_string(input.block) + " is not on the table");
        return;
      }
      if (!placement_legal(world_, Actor::user, input.block, input.structure)) {
        reject("illegal placement of block " + std::to_string(input.block));
        return;
      }
      const Position from = world_.block(input.block).position;
      const GoalStructure& s = world_.structure(input.structure);
      const Tick span = seconds_to_ticks(motion.pick_duration_s + motion.place_duration_s, config_.tick_duration);
      retro_record(ActionKind::place, input.block, input.structure, span, ActionEffect::placed, s.base);
      emit(PickEvent{now, Actor::user, input.block, PickResult::success, from});
      pickups_.push_back({Actor::user, from});
      emit(PlacementEvent{now, Actor::user, input.block, s.id, s.filled});
      return;
    }
  }
}

// ---- completions ------------------------------------------------------------

void Engine::complete_human(const Activity& a) {
  user_.current.reset();
  const PolicyContext pctx = policy_context();
  const Tick now = world_.tick;
  switch (a.human_kind) {
    case HumanAction::Kind::idle:
      return;
    case HumanAction::Kind::reach:
      record(user_, a, now, ActionEffect::arrived, a.to);
      return;
    case HumanAction::Kind::pick: {
      const Block& b = world_.block(*a.block);
      if (b.is_on_table() && !world_.human.held && distance(world_.human.hand, b.position) <= config_.grasp_radius) {
        const Position at = b.position;
        record(user_, a, now, ActionEffect::picked, std::nullopt);
        emit(PickEvent{now, Actor::user, b.id, PickResult::success, at});
        pickups_.push_back({Actor::user, at});
      } else {
        record(user_, a, now, ActionEffect::aborted, std::nullopt);
      }
      return;
    }
    case HumanAction::Kind::place:
      if (world_.human.held == a.block && placement_legal(world_, Actor::user, *a.block, *a.structure)) {
        const GoalStructure& s = world_.structure(*a.structure);
        record(user_, a, now, ActionEffect::placed, s.base);
        emit(PlacementEvent{now, Actor::user, *a.block, s.id, s.filled});
      } else {
        record(user_, a, now, ActionEffect::aborted, a.to);
      }
      return;
    case HumanAction::Kind::maneuver: {
      if (world_.human.held != a.block) {
        record(user_, a, now, ActionEffect::aborted, a.to);
        return;
      }
      const auto interp = policy_->interpret(world_, ReleaseSignal{*a.block, a.to}, pctx);
      record(user_, a, now, interp.decision ? ActionEffect::allocated : ActionEffect::released, a.to);
      emit(ReleaseEvent{now, Actor::user, *a.block, a.to});
      apply_interpretation(interp);
      return;
    }
    case HumanAction::Kind::push: {
      if (!world_.block(*a.block).is_on_table()) {
        record(user_, a, now, ActionEffect::aborted, a.to);
        return;
      }
      GestureSignal g{*a.block, {}};
      const Tick n = a.end - a.start;
      for (Tick k = 0; k <= n; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(n);
        g.trajectory.push_back({static_cast<double>(k) * config_.tick_duration,
                                {a.from.x + (a.to.x - a.from.x) * f, a.from.y + (a.to.y - a.from.y) * f}});
      }
      const auto interp = policy_->interpret(world_, g, pctx);
      record(user_, a, now, interp.decision ? ActionEffect::allocated : ActionEffect::gesture_missed, a.to);
      emit(ReleaseEvent{now, Actor::user, *a.block, a.to});
      apply_interpretation(interp);
      return;
    }
    case HumanAction::Kind::menu_dwell: {
      const auto interp = policy_->interpret(world_, MenuSignal{*a.block, a.dwell_ticks, a.choice}, pctx);
      record(user_, a, now, interp.decision ? ActionEffect::allocated : ActionEffect::dwell_released, std::nullopt);
      apply_interpretation(interp);
      return;
    }
    case HumanAction::Kind::voice: {
      const auto interp = policy_->interpret(world_, VoiceSignal{a.label}, pctx);
      record(user_, a, now, interp.decision ? ActionEffect::allocated : ActionEffect::gesture_missed, std::nullopt);
      apply_interpretation(interp);
      return;
    }
  }
}

void Engine::complete_robot(const Activity& a) {
  robot_.current.reset();
  const Tick now = world_.tick;
  const BlockId id = *a.block;
  switch (a.kind) {
    case ActionKind::reach: {
      const Block& b = world_.block(id);
      const bool still_ours = b.is_on_table() && b.assignment == Assignment::robot &&
                              !world_.robot.never_retry.contains(id) &&
                              distance(a.to, b.position) <= config_.grasp_radius;
      if (still_ours) {
        record(robot_, a, now, ActionEffect::arrived, a.to);
      } else {
        const Position at = b.position;
        record(robot_, a, now, ActionEffect::aborted, a.to);
        emit(PickEvent{now, Actor::robot, id, PickResult::aborted, at});
        unassign_after_robot_failure(id, AllocationReason::pick_abort);
      }
      return;
    }
    case ActionKind::pick: {
      const Position at = world_.block(id).position;
      const PickResult r = attempt_pick(world_, id, rng_, config_);
      switch (r) {
        case PickResult::success:
          record(robot_, a, now, ActionEffect::picked, std::nullopt);
          emit(PickEvent{now, Actor::robot, id, r, at});
          pickups_.push_back({Actor::robot, at});
          break;
        case PickResult::fail_yellow:
          record(robot_, a, now, ActionEffect::fail_yellow, std::nullopt);
          emit(PickEvent{now, Actor::robot, id, r, at});
          unassign_after_robot_failure(id, AllocationReason::fail_yellow);
          break;
        case PickResult::fail_random:
          record(robot_, a, now, ActionEffect::fail_random, std::nullopt);
          emit(PickEvent{now, Actor::robot, id, r, at});
          break;
        case PickResult::aborted:
          record(robot_, a, now, ActionEffect::aborted, std::nullopt);
          emit(PickEvent{now, Actor::robot, id, r, at});
          unassign_after_robot_failure(id, AllocationReason::pick_abort);
          break;
      }
      return;
    }
    case ActionKind::place:
      if (world_.robot.held == id && placement_legal(world_, Actor::robot, id, *a.structure)) {
        const GoalStructure& s = world_.structure(*a.structure);
        record(robot_, a, now, ActionEffect::placed, s.base);
        emit(PlacementEvent{now, Actor::robot, id, s.id, s.filled});
      } else {
        record(robot_, a, now, ActionEffect::aborted, a.to);
      }
      return;
    default:
      throw std::logic_error("robot cannot perform " + std::string(to_string(a.kind)));
  }
}

// ---- decisions ----------------------------------------------------------------

void Engine::decide_human() {
  if (user_.current) return;
  const HumanAction h = human_.next_action(human_context());
  if (h.kind == HumanAction::Kind::idle) {
    go_idle(user_);
    return;
  }
  const WorldState& w = world_;
  const MotionModel motion = human_motion();
  const double dt = config_.tick_duration;
  const Position hand = w.human.hand;
  const bool known = w.has_block(h.block);
  const bool loose = known && w.block(h.block).is_on_table();
  const bool in_reach = loose && distance(hand, w.block(h.block).position) <= config_.grasp_radius;
  const bool holding = known && w.human.held == h.block;

  Activity a;
  a.human_kind = h.kind;
  a.block = h.block;
  a.from = hand;
  a.to = hand;
  std::string problem;
  switch (h.kind) {
    case HumanAction::Kind::idle:
      break;
    case HumanAction::Kind::reach:
      if (!loose || !on_table(h.destination)) problem = "reach toward a block not on the table";
      a.kind = ActionKind::reach;
      a.to = a.focus = h.destination;
      a.end = motion_duration(hand, h.destination, motion, dt);
      break;
    case HumanAction::Kind::pick:
      if (!in_reach || w.human.held) problem = "pick of a block out of reach";
      a.kind = ActionKind::pick;
      if (loose) a.focus = w.block(h.block).position;
      a.end = seconds_to_ticks(motion.pick_duration_s, dt);
      break;
    case HumanAction::Kind::place:
      if (!holding || !placement_legal(w, Actor::user, h.block, h.structure)) {
        problem = "illegal placement";
        break;
      }
      a.kind = ActionKind::place;
      a.structure = h.structure;
      a.to = a.focus = w.structure(h.structure).base;
      a.end = motion_duration(hand, a.to, motion, dt) + seconds_to_ticks(motion.place_duration_s, dt);
      break;
    case HumanAction::Kind::maneuver:
      if (!holding || !on_table(h.destination)) problem = "maneuver without holding the block";
      a.kind = ActionKind::maneuver;
      a.to = a.focus = h.destination;
      a.end = motion_duration(hand, h.destination, motion, dt);
      break;
    case HumanAction::Kind::push:
      if (!in_reach || w.human.held || !on_table(h.destination)) problem = "push of a block out of reach";
      a.kind = ActionKind::allocate_gesture;
      if (loose) a.from = w.block(h.block).position;
      a.to = a.focus = h.destination;
      a.end = motion_duration(a.from, h.destination, motion, dt);
      break;
    case HumanAction::Kind::menu_dwell:
      if (!in_reach) problem = "menu on a block out of reach";
      a.kind = ActionKind::menu_dwell;
      if (loose) a.focus = w.block(h.block).position;
      a.choice = h.choice;
      a.dwell_ticks = h.dwell_ticks;
      a.end = h.dwell_ticks;
      break;
    case HumanAction::Kind::voice: {
      const auto labelled = block_with_label(w, h.label);
      if (!labelled) {
        problem = "unknown voice label";
        break;
      }
      a.kind = ActionKind::allocate_gesture;
      a.block = labelled;
      a.label = h.label;
      a.focus = w.block(*labelled).position;
      a.end = seconds_to_ticks(config_.params.voice_utterance_s, dt);
      break;
    }
  }
  if (!problem.empty()) {
    emit(RejectionEvent{world_.tick, Actor::user, problem});
    go_idle(user_);
    return;
  }
  a.end = world_.tick + at_least_one(a.end);
  if (h.new_chain || user_.chain == 0) user_.chain = next_chain();
  a.chain = user_.chain;
  start(user_, a);
}

void Engine::decide_robot() {
  if (robot_.current) return;
  const RobotIntent intent = robot_decide(world_, *policy_, config_);
  if (intent.kind == RobotIntent::Kind::idle) {
    go_idle(robot_);
    return;
  }
  if (intent.selected) {
    emit(AllocationEvent{world_.tick, *intent.block, Assignment::robot, technique_, AllocationReason::selection});
  }
  Activity a;
  a.block = intent.block;
  a.structure = intent.structure;
  a.from = world_.robot.gripper;
  a.to = intent.to;
  a.focus = intent.to;
  switch (intent.kind) {
    case RobotIntent::Kind::reach: a.kind = ActionKind::reach; break;
    case RobotIntent::Kind::pick: a.kind = ActionKind::pick; break;
    case RobotIntent::Kind::place: a.kind = ActionKind::place; break;
    case RobotIntent::Kind::idle: break;
  }
  a.end = world_.tick + at_least_one(intent.duration);
  if (!robot_.chain_open) {
    robot_.chain = next_chain();
    robot_.chain_open = true;
  }
  a.chain = robot_.chain;
  start(robot_, a);
}

void Engine::update_fields() {
  gaze_observe(world_.field, human_.gaze_point(human_context()));
  world_.field.proximity.decay(config_.tick_duration);
  for (const auto& p : pickups_) {
    world_.field.proximity.infuse(p.actor, p.position, config_.params.infusion_radius, world_.tick);
  }
  pickups_.clear();
}

// ---- loop ------------------------------------------------------------------------

void Engine::finish(Tick at, bool completed) {
  for (Lane* lane : {&user_, &robot_}) {
    if (lane->current) {
      record(*lane, *lane->current, at, ActionEffect::truncated, std::nullopt);
      lane->current.reset();
    } else {
      close_idle(*lane, at);
    }
  }
  emit(CheckpointEvent{at, world_.field});
  emit(EndEvent{at, completed});
  finished_ = true;
  completed_ = completed;
}

std::size_t Engine::step() {
  if (finished_) throw std::logic_error("step after the trial finished");
  const std::size_t first = log_.events.size();
  const Tick t = world_.tick;

  for (const auto& input : human_.take_inputs(t)) {
    emit(InputEvent{t, input});
    apply_live_input(input);
  }
  auto complete_due = [&](Tick boundary) {
    if (user_.current && user_.current->end == boundary) complete_human(*user_.current);
    if (robot_.current && robot_.current->end == boundary) complete_robot(*robot_.current);
  };
  complete_due(t);
  if (task_complete(world_)) {
    finish(t, true);
    return first;
  }

  decide_human();
  update_fields();
  decide_robot();
  world_.tick = t + 1;

  if (world_.tick >= tick_limit_) {
    complete_due(world_.tick);
    finish(world_.tick, task_complete(world_));
  }
  return first;
}

void Engine::abort() {
  if (!finished_) finish(world_.tick, false);
}

TrialResult Engine::result() const {
  return {completed_, world_.tick, static_cast<double>(world_.tick) * config_.tick_duration, world_};
}

std::pair<TrialResult, EventLog> run_trial(const Scenario& scenario, const SimConfig& config, PolicyKind technique,
                                           HumanActionSource& human, Tick tick_limit) {
  Engine engine(scenario, config, technique, human, tick_limit);
  while (!engine.done()) engine.step();
  return {engine.result(), engine.log()};
}

WorldState replay(const Scenario& scenario, const EventLog& log) {
  if (!log.header.engine_version.empty() && log.header.engine_version != kEngineVersion) {
    throw ReplayError(0, "log from engine version " + log.header.engine_version);
  }
  WorldState world = WorldState::from_scenario(scenario, log.header.config);
  for (const auto& e : log.events) apply_event(world, e);
  return world;
}

EventLog resimulate_live(const EventLog& log) {
  InputDrivenHuman human;
  std::optional<Tick> end;
  for (const auto& e : log.events) {
    if (const auto* in = std::get_if<InputEvent>(&e)) human.push(in->tick, in->input);
    if (const auto* fin = std::get_if<EndEvent>(&e)) end = fin->tick;
  }
  Engine engine(log.header.scenario, log.header.config, log.header.technique, human, log.header.tick_limit);
  while (!engine.done() && (!end || engine.tick() < *end)) engine.step();
  engine.abort();
  return engine.log();
}

}  // namespace tabletop
