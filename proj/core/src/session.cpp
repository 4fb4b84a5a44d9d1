#include "tabletop/session.hpp"

#include <algorithm>
#include <atomic>

namespace tabletop {

namespace {

nlohmann::ordered_json settings_json(const SessionSettings& s) {
  return {{"technique", to_string(s.technique)},
          {"task_type", to_string(s.task_type)},
          {"placement", to_string(s.placement)},
          {"seed", s.seed},
          {"tick_limit", s.tick_limit}};
}

// Distinguishes logs of sessions that share a configuration.
std::uint64_t next_log_id() {
  static std::atomic<std::uint64_t> id{0};
  return ++id;
}

double busy_pct(const std::vector<char>& mask) {
  if (mask.empty()) return 0.0;
  return 100.0 * static_cast<double>(std::count(mask.begin(), mask.end(), 1)) / static_cast<double>(mask.size());
}

}  // namespace

LiveSession::LiveSession(SessionSettings settings) : settings_(std::move(settings)) {
  if (settings_.ticks_per_diff < 1) throw std::invalid_argument("ticks_per_diff must be at least 1");
  validate(settings_.config);
}

Message LiveSession::error(const std::string& message, std::optional<int> seq) {
  Message m{{"kind", "error"}, {"message", message}};
  if (seq) m["seq"] = *seq;
  return m;
}

std::vector<Message> LiveSession::handle(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return {error(std::string("malformed message: ") + e.what())};
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return {error("message must be an object with a string kind")};
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "hello") return on_hello();
  if (kind == "start_trial") return on_start(j);
  if (kind == "input") return on_input(j);
  return {error("unknown message kind '" + kind + "'")};
}

std::vector<Message> LiveSession::on_hello() {
  Message m{{"kind", "hello"}, {"engine_version", kEngineVersion}};
  nlohmann::ordered_json techniques = nlohmann::ordered_json::array();
  for (const auto& t : kTechniques) {
    techniques.push_back({{"name", t.name},
                          {"class", to_string(t.technique_class)},
                          {"perspective", to_string(t.perspective)},
                          {"workspace", to_string(t.workspace)}});
  }
  m["techniques"] = techniques;
  m["task_types"] = {"coupled", "decoupled"};
  m["placements"] = {"scattered", "sorted"};
  m["tick_duration"] = settings_.config.tick_duration;
  m["defaults"] = settings_json(settings_);
  return {m};
}

std::vector<Message> LiveSession::on_start(const nlohmann::json& j) {
  if (running()) return {error("a trial is already running")};
  SessionSettings s = settings_;
  try {
    if (j.contains("technique")) s.technique = parse_policy_kind(j["technique"].get<std::string>());
    if (j.contains("task_type")) s.task_type = parse_task_type(j["task_type"].get<std::string>());
    if (j.contains("placement")) s.placement = parse_placement(j["placement"].get<std::string>());
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tick_limit")) s.tick_limit = j["tick_limit"].get<Tick>();
    if (s.tick_limit < 1) throw std::invalid_argument("tick_limit must be positive");
  } catch (const std::exception& e) {
    return {error(std::string("bad start_trial: ") + e.what())};
  }

  const Scenario scenario = generate_scenario({s.task_type, s.placement, s.seed, kDefaultBlockCount});
  human_ = std::make_unique<InputDrivenHuman>();
  engine_ = std::make_unique<Engine>(scenario, s.config, s.technique, *human_, s.tick_limit);
  pending_seqs_.clear();
  acked_.clear();
  diff_from_ = 0;
  sent_blocks_.clear();
  sent_structures_.clear();
  user_busy_.clear();
  robot_busy_.clear();
  done_sent_ = false;
  last_log_path_.reset();

  Message started{{"kind", "start_trial"}};
  started.update(settings_json(s));
  started["scenario"] = to_json(scenario);
  return {started, state_diff(0, true)};
}

std::vector<Message> LiveSession::on_input(const nlohmann::json& j) {
  const std::optional<int> seq =
      j.contains("input") && j["input"].is_object() && j["input"].contains("seq") && j["input"]["seq"].is_number_integer()
          ? std::optional<int>(j["input"]["seq"].get<int>())
          : std::nullopt;
  if (!running()) return {error("no trial is running", seq)};
  if (!j.contains("input")) return {error("input message has no input payload", seq)};
  UserInput in;
  try {
    in = user_input_from_json(j["input"]);
  } catch (const std::exception& e) {
    return {error(e.what(), seq)};
  }
  const WorldState& w = engine_->world();
  const bool names_block =
      in.kind == UserInput::Kind::menu || in.kind == UserInput::Kind::drag || in.kind == UserInput::Kind::place;
  if (names_block && !w.has_block(in.block)) return {error("unknown block " + std::to_string(in.block), in.seq)};
  if (in.kind == UserInput::Kind::place && !w.has_structure(in.structure)) {
    return {error("unknown structure " + std::to_string(in.structure), in.seq)};
  }
  human_->push(engine_->tick(), in);
  pending_seqs_.push_back(in.seq);
  return {};
}

std::vector<Message> LiveSession::tick() {
  std::vector<Message> out;
  if (!engine_) return out;
  if (engine_->done()) {
    if (!done_sent_) out.push_back(trial_done());
    return out;
  }
  engine_->step();
  acked_.insert(acked_.end(), pending_seqs_.begin(), pending_seqs_.end());
  pending_seqs_.clear();

  const Tick now = engine_->tick();
  if (engine_->done() || now % settings_.ticks_per_diff == 0) out.push_back(state_diff(diff_from_, false));
  if (engine_->done()) out.push_back(trial_done());
  return out;
}

Message LiveSession::state_diff(std::size_t first_event, bool full) {
  const WorldState& w = engine_->world();
  const auto& events = engine_->log().events;
  const Tick now = engine_->tick();

  user_busy_.resize(static_cast<std::size_t>(now), 0);
  robot_busy_.resize(static_cast<std::size_t>(now), 0);
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (std::size_t i = first_event; i < events.size(); ++i) {
    ev.push_back(to_json(events[i]));
    if (const auto* r = std::get_if<ActionRecord>(&events[i]); r && r->kind != ActionKind::idle) {
      auto& mask = r->actor == Actor::user ? user_busy_ : robot_busy_;
      for (Tick t = r->start_tick; t < r->end_tick && t < now; ++t) mask[static_cast<std::size_t>(t)] = 1;
    }
  }
  diff_from_ = events.size();

  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  nlohmann::ordered_json assignments = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < w.blocks.size(); ++i) {
    if (full || i >= sent_blocks_.size() || !(sent_blocks_[i] == w.blocks[i])) {
      blocks.push_back(to_json(w.blocks[i]));
      if (full || i >= sent_blocks_.size() || sent_blocks_[i].assignment != w.blocks[i].assignment) {
        assignments[std::to_string(w.blocks[i].id)] = to_string(w.blocks[i].assignment);
      }
    }
  }
  sent_blocks_ = w.blocks;
  nlohmann::ordered_json structures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < w.structures.size(); ++i) {
    if (full || i >= sent_structures_.size() || !(sent_structures_[i] == w.structures[i])) {
      structures.push_back(to_json(w.structures[i]));
    }
  }
  sent_structures_ = w.structures;

  const PolicyContext pctx{engine_->config().params, engine_->config().tick_duration};
  nlohmann::ordered_json territories = nlohmann::ordered_json::array();
  for (Territory t : engine_->policy().territories(w, pctx)) territories.push_back(to_string(t));
  nlohmann::ordered_json heat = nlohmann::ordered_json::object();
  if (engine_->policy().kind() == PolicyKind::gaze) heat["gaze"] = w.field.gaze.means();
  if (engine_->policy().kind() == PolicyKind::proximity) {
    heat["user"] = w.field.proximity.channel(Actor::user);
    heat["robot"] = w.field.proximity.channel(Actor::robot);
  }

  Tick both = 0;
  for (std::size_t t = 0; t < user_busy_.size(); ++t) both += user_busy_[t] && robot_busy_[t];
  const int placed = w.filled_slots();
  const int total_slots = static_cast<int>(w.blocks.size());
  nlohmann::ordered_json metrics{
      {"elapsed_s", static_cast<double>(now) * engine_->config().tick_duration},
      {"user_idle_pct", now == 0 ? 0.0 : 100.0 - busy_pct(user_busy_)},
      {"robot_idle_pct", now == 0 ? 0.0 : 100.0 - busy_pct(robot_busy_)},
      {"concurrent_activity_pct", now == 0 ? 0.0 : 100.0 * static_cast<double>(both) / static_cast<double>(now)},
      {"robot_errors", w.robot.errors},
      {"blocks_remaining", total_slots - placed}};

  Message m{{"kind", "state_diff"}, {"tick", now}, {"full", full}, {"acked", acked_}};
  acked_.clear();
  m["blocks"] = blocks;
  m["assignments"] = assignments;
  m["structures"] = structures;
  m["robot"] = {{"gripper", to_json(w.robot.gripper)},
                {"held", w.robot.held ? nlohmann::ordered_json(*w.robot.held) : nlohmann::ordered_json(nullptr)},
                {"queue", std::vector<BlockId>(w.robot.queue.begin(), w.robot.queue.end())}};
  m["hand"] = to_json(w.human.hand);
  m["territories"] = territories;
  m["heatmap"] = heat;
  m["metrics"] = metrics;
  m["events"] = ev;
  m["done"] = engine_->done();
  return m;
}

Message LiveSession::trial_done() {
  done_sent_ = true;
  flush_log();
  const EventLog& log = engine_->log();
  Message m{{"kind", "trial_done"}, {"tick", engine_->tick()}, {"completed", engine_->result().completed}};
  try {
    m["report"] = to_json(fluency_report(log));
  } catch (const std::exception& e) {
    m["report"] = nullptr;
    m["note"] = e.what();
  }
  if (last_log_path_) m["log"] = last_log_path_->string();
  return m;
}

void LiveSession::flush_log() {
  if (!settings_.log_dir || !engine_) return;
  const auto& h = engine_->log().header;
  std::filesystem::create_directories(*settings_.log_dir);
  const auto path = *settings_.log_dir / ("live_" + std::string(to_string(h.technique)) + "_" +
                                          std::string(to_string(h.scenario.config.task_type)) + "_" +
                                          std::string(to_string(h.scenario.config.placement)) + "_" +
                                          std::to_string(h.seed) + "_" + std::to_string(next_log_id()) + ".jsonl");
  write_file_atomic(path, to_jsonl(engine_->log()));
  last_log_path_ = path;
}

void LiveSession::disconnect() {
  if (!engine_) return;
  if (!engine_->done()) engine_->abort();
  if (!done_sent_) {
    done_sent_ = true;
    flush_log();
  }
}

}  // namespace tabletop
