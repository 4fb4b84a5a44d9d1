#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabletop/events.hpp"

namespace tabletop {

class MalformedLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Segment { idle, goal_manipulation, maneuver, allocation, reach_overhead };

std::string_view to_string(Segment s);

// Tick counts per category for one actor. Categories always sum to the trial length.
struct ActorSegments {
  Tick idle = 0;
  Tick goal_manipulation = 0;
  Tick maneuver = 0;
  Tick allocation = 0;
  Tick reach_overhead = 0;

  Tick total() const { return idle + goal_manipulation + maneuver + allocation + reach_overhead; }
  Tick active() const { return total() - idle; }
  Tick& operator[](Segment s);

  friend bool operator==(const ActorSegments&, const ActorSegments&) = default;
};

struct TimeSegments {
  Tick ticks = 0;
  double tick_duration = 0.0;
  ActorSegments user;
  ActorSegments robot;
  Tick concurrent_ticks = 0;  // ticks where both actors are non-idle

  double seconds(Tick t) const { return static_cast<double>(t) * tick_duration; }

  friend bool operator==(const TimeSegments&, const TimeSegments&) = default;
};

// Segment of each non-idle record. Gesture, dwell and voice spans are
// allocation time; other records take the class of their manipulation chain,
// which is decided by how its last record ended.
std::vector<Segment> classify_records(const std::vector<ActionRecord>& records);

// Throws MalformedLogError when records of one actor overlap, leave the trial
// window, or the log has no end event.
TimeSegments segment_timeline(const EventLog& log);

struct TouchCounts {
  int allocation = 0;
  int manipulate = 0;
  int maneuver = 0;

  friend bool operator==(const TouchCounts&, const TouchCounts&) = default;
};

struct FluencyReport {
  bool completed = false;
  double completion_time_s = 0.0;
  double user_idle_pct = 0.0;
  double robot_idle_pct = 0.0;
  double concurrent_activity_pct = 0.0;
  double user_overhead_pct = 0.0;  // maneuver plus allocation share of the trial
  int robot_errors = 0;
  TouchCounts touches;
  double user_idle_s = 0.0;
  double user_goal_s = 0.0;
  double user_maneuver_s = 0.0;
  double user_allocation_s = 0.0;
  double robot_idle_s = 0.0;
  double robot_goal_s = 0.0;
  double robot_reach_overhead_s = 0.0;

  friend bool operator==(const FluencyReport&, const FluencyReport&) = default;
};

// Throws std::invalid_argument for a zero-length trial.
FluencyReport fluency_report(const TimeSegments& segments, const EventLog& log);
FluencyReport fluency_report(const EventLog& log);

TouchCounts count_touches(const EventLog& log);

nlohmann::ordered_json to_json(const FluencyReport& report);

// One results row: trial configuration plus its report.
struct TrialRow {
  std::string technique;
  std::string task_type;
  std::string placement;
  std::string model;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "failed" rows carry no meaningful metrics
  FluencyReport report;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

enum class ResultFormat { csv, json };

const std::vector<std::string>& result_columns();

// Throws std::invalid_argument for an empty row list.
std::string export_results(const std::vector<TrialRow>& rows, ResultFormat format);
std::vector<TrialRow> import_results(const std::string& text, ResultFormat format);
// Chosen by extension; throws std::invalid_argument for anything but .csv or .json.
ResultFormat result_format_for(const std::string& path);

}  // namespace tabletop
