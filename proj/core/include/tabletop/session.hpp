#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/engine.hpp"
#include "tabletop/harness.hpp"

namespace tabletop {

struct SessionSettings {
  PolicyKind technique = PolicyKind::voice;
  TaskType task_type = TaskType::coupled;
  Placement placement = Placement::scattered;
  std::uint64_t seed = 1;
  Tick tick_limit = kDefaultTickLimit;
  SimConfig config;
  int ticks_per_diff = 1;  // state_diff cadence; the final tick is always sent
  std::optional<std::filesystem::path> log_dir;  // where finished or aborted trial logs are written
};

using Message = nlohmann::ordered_json;

// One client's view of the engine, independent of the transport. Client
// messages go through handle(); the owner calls tick() at its pacing rate.
// Accepted inputs are applied at the next tick boundary and acknowledged by
// seq in the state_diff for that tick.
class LiveSession {
 public:
  explicit LiveSession(SessionSettings settings);

  std::vector<Message> handle(const std::string& text);
  std::vector<Message> tick();

  // Aborts a running trial and writes its partial log.
  void disconnect();

  bool running() const { return engine_ && !engine_->done(); }
  const Engine* engine() const { return engine_.get(); }
  std::optional<std::filesystem::path> last_log_path() const { return last_log_path_; }

  static Message error(const std::string& message, std::optional<int> seq = std::nullopt);

 private:
  std::vector<Message> on_hello();
  std::vector<Message> on_start(const nlohmann::json& j);
  std::vector<Message> on_input(const nlohmann::json& j);

  Message state_diff(std::size_t first_event, bool full);
  Message trial_done();
  void flush_log();

  SessionSettings settings_;
  std::unique_ptr<InputDrivenHuman> human_;
  std::unique_ptr<Engine> engine_;
  std::vector<int> pending_seqs_;
  std::vector<int> acked_;
  std::size_t diff_from_ = 0;  // first event not yet reported
  std::vector<Block> sent_blocks_;
  std::vector<GoalStructure> sent_structures_;
  std::vector<char> user_busy_;
  std::vector<char> robot_busy_;
  bool done_sent_ = false;
  std::optional<std::filesystem::path> last_log_path_;
};

}  // namespace tabletop
