#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/events.hpp"
#include "tabletop/human.hpp"
#include "tabletop/metrics.hpp"
#include "tabletop/params.hpp"
#include "tabletop/technique.hpp"

namespace tabletop {

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr Tick kDefaultTickLimit = 24000;  // 20 simulated minutes at 20 Hz

struct ExperimentPlan {
  std::vector<PolicyKind> techniques;
  std::vector<TaskType> task_types;
  std::vector<Placement> placements;
  std::vector<HumanModel> models;
  std::vector<std::uint64_t> seeds;
  Tick tick_limit = kDefaultTickLimit;
  SimConfig config;
  std::vector<std::string> results{"results.csv", "results.json"};  // file names inside the output directory
  unsigned workers = 0;  // 0 picks the hardware concurrency

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

// Throws PlanError for an empty axis, duplicate seeds or models, a
// non-positive tick limit, or a results file with an unknown extension.
void validate(const ExperimentPlan& plan);

// Seeds may be a list or {"first": a, "count": n}; techniques may be "all".
ExperimentPlan experiment_plan_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const ExperimentPlan& plan);

// The full 8 x 2 x 2 grid for the given models and seeds 1..seed_count.
ExperimentPlan trend_plan(std::vector<HumanModel> models, int seed_count = 20);

struct TrialCell {
  PolicyKind technique = PolicyKind::voice;
  TaskType task_type = TaskType::coupled;
  Placement placement = Placement::scattered;
  HumanModel model;
  std::uint64_t seed = 0;
};

// Cells in technique, task, placement, model, seed order.
std::vector<TrialCell> expand(const ExperimentPlan& plan);
std::string log_file_name(const TrialCell& cell);

struct CellOutcome {
  TrialRow row;
  std::optional<EventLog> log;  // absent for failed cells
};

// Runs one cell. Engine errors are caught and reported as a failed row.
CellOutcome run_cell(const TrialCell& cell, const ExperimentPlan& plan);

struct BatchSummary {
  std::vector<TrialRow> rows;  // in expand() order
  std::size_t ran = 0;
  std::size_t resumed = 0;
  std::size_t failed = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Writes <out>/logs/<cell>.jsonl for each cell and the plan's results files.
// Cells whose log already exists are not rerun; their metrics are recomputed
// from the log. Files are written to a temporary name and renamed into place.
BatchSummary run_batch(const ExperimentPlan& plan, const std::filesystem::path& out_dir,
                       const ProgressFn& progress = {});

// Same grid without touching the filesystem.
BatchSummary run_batch_in_memory(const ExperimentPlan& plan);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

enum class TrendStatus { pass, fail, not_evaluable };

std::string_view to_string(TrendStatus s);

struct TrendCheck {
  std::string id;
  std::string description;
  TrendStatus status = TrendStatus::not_evaluable;
  std::vector<std::pair<std::string, double>> observed;  // labelled means behind the verdict
  std::string note;
};

struct TrendReport {
  std::vector<TrendCheck> checks;

  const TrendCheck* find(std::string_view id) const;
  bool all_pass() const;
};

// Directional assertions on seed-averaged means. Completion, error and
// overhead checks use focused_builder rows; the guarding check compares
// guardian with focused_builder on matched implicit cells. A check whose
// cells are missing is not evaluable.
TrendReport check_trends(const std::vector<TrialRow>& rows);

std::string format_trend_report(const TrendReport& report);
nlohmann::ordered_json to_json(const TrendReport& report);

}  // namespace tabletop
