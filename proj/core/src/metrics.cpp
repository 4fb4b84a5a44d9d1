#include "tabletop/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

namespace tabletop {

namespace {

bool is_allocation_span(ActionKind k) { return k == ActionKind::allocate_gesture || k == ActionKind::menu_dwell; }

Segment chain_class(const ActionRecord& last) {
  if (last.effect == ActionEffect::placed) return Segment::goal_manipulation;
  if (is_allocation_span(last.kind) || last.effect == ActionEffect::allocated) return Segment::allocation;
  return last.actor == Actor::user ? Segment::maneuver : Segment::reach_overhead;
}

std::map<int, std::size_t> last_record_of_chain(const std::vector<ActionRecord>& records) {
  std::map<int, std::size_t> last;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].kind != ActionKind::idle && records[i].chain != 0) last[records[i].chain] = i;
  }
  return last;
}

std::vector<ActionRecord> records_of(const EventLog& log) { return log.all<ActionRecord>(); }

Tick end_tick(const EventLog& log) {
  const auto ends = log.all<EndEvent>();
  if (ends.empty()) throw MalformedLogError("log has no end event");
  return ends.back().tick;
}

double pct(Tick part, Tick whole) { return 100.0 * static_cast<double>(part) / static_cast<double>(whole); }

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::idle: return "idle";
    case Segment::goal_manipulation: return "goal_manipulation";
    case Segment::maneuver: return "maneuver";
    case Segment::allocation: return "allocation";
    case Segment::reach_overhead: return "reach_overhead";
  }
  return "?";
}

Tick& ActorSegments::operator[](Segment s) {
  switch (s) {
    case Segment::idle: return idle;
    case Segment::goal_manipulation: return goal_manipulation;
    case Segment::maneuver: return maneuver;
    case Segment::allocation: return allocation;
    case Segment::reach_overhead: return reach_overhead;
  }
  return idle;
}

std::vector<Segment> classify_records(const std::vector<ActionRecord>& records) {
  const auto last = last_record_of_chain(records);
  std::vector<Segment> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.kind == ActionKind::idle) {
      out.push_back(Segment::idle);
    } else if (is_allocation_span(r.kind)) {
      out.push_back(Segment::allocation);
    } else if (auto it = last.find(r.chain); it != last.end()) {
      out.push_back(chain_class(records[it->second]));
    } else {
      out.push_back(chain_class(r));
    }
  }
  return out;
}

TimeSegments segment_timeline(const EventLog& log) {
  TimeSegments seg;
  seg.ticks = end_tick(log);
  seg.tick_duration = log.header.config.tick_duration;
  const auto records = records_of(log);
  const auto classes = classify_records(records);

  std::vector<char> user_active(static_cast<std::size_t>(std::max<Tick>(seg.ticks, 0)), 0);
  std::vector<char> robot_active(user_active.size(), 0);

  for (Actor actor : {Actor::user, Actor::robot}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].actor == actor) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].start_tick < records[b].start_tick; });
    Tick prev_end = 0;
    ActorSegments& s = actor == Actor::user ? seg.user : seg.robot;
    auto& active = actor == Actor::user ? user_active : robot_active;
    for (std::size_t i : idx) {
      const ActionRecord& r = records[i];
      if (r.start_tick < 0 || r.end_tick > seg.ticks || r.end_tick < r.start_tick) {
        throw MalformedLogError("record outside the trial window at tick " + std::to_string(r.start_tick));
      }
      if (r.start_tick < prev_end) {
        throw MalformedLogError(std::string(to_string(actor)) + " records overlap at tick " +
                                std::to_string(r.start_tick));
      }
      prev_end = r.end_tick;
      if (classes[i] == Segment::idle) continue;
      s[classes[i]] += r.duration();
      for (Tick t = r.start_tick; t < r.end_tick; ++t) active[static_cast<std::size_t>(t)] = 1;
    }
    s.idle = seg.ticks - s.active();
  }
  for (std::size_t t = 0; t < user_active.size(); ++t) {
    if (user_active[t] && robot_active[t]) ++seg.concurrent_ticks;
  }
  return seg;
}

TouchCounts count_touches(const EventLog& log) {
  const auto records = records_of(log);
  const auto last = last_record_of_chain(records);
  TouchCounts counts;
  std::map<int, bool> touched;
  for (const auto& r : records) {
    if (r.actor != Actor::user || r.kind == ActionKind::idle) continue;
    const bool touch = r.kind == ActionKind::pick || r.kind == ActionKind::maneuver || r.kind == ActionKind::place ||
                       r.kind == ActionKind::menu_dwell || (r.kind == ActionKind::allocate_gesture && r.to);
    touched[r.chain] = touched[r.chain] || touch;
  }
  for (const auto& [chain, touch] : touched) {
    if (!touch) continue;
    switch (chain_class(records[last.at(chain)])) {
      case Segment::goal_manipulation: ++counts.manipulate; break;
      case Segment::allocation: ++counts.allocation; break;
      default: ++counts.maneuver; break;
    }
  }
  return counts;
}

FluencyReport fluency_report(const TimeSegments& seg, const EventLog& log) {
  if (seg.ticks <= 0) throw std::invalid_argument("trial duration must be positive");
  FluencyReport r;
  const auto ends = log.all<EndEvent>();
  r.completed = !ends.empty() && ends.back().completed;
  r.completion_time_s = seg.seconds(seg.ticks);
  r.user_idle_pct = pct(seg.user.idle, seg.ticks);
  r.robot_idle_pct = pct(seg.robot.idle, seg.ticks);
  r.concurrent_activity_pct = pct(seg.concurrent_ticks, seg.ticks);
  r.user_overhead_pct = pct(seg.user.maneuver + seg.user.allocation, seg.ticks);
  for (const auto& p : log.all<PickEvent>()) {
    if (p.result == PickResult::fail_yellow) ++r.robot_errors;
  }
  r.touches = count_touches(log);
  r.user_idle_s = seg.seconds(seg.user.idle);
  r.user_goal_s = seg.seconds(seg.user.goal_manipulation);
  r.user_maneuver_s = seg.seconds(seg.user.maneuver);
  r.user_allocation_s = seg.seconds(seg.user.allocation);
  r.robot_idle_s = seg.seconds(seg.robot.idle);
  r.robot_goal_s = seg.seconds(seg.robot.goal_manipulation);
  r.robot_reach_overhead_s = seg.seconds(seg.robot.reach_overhead);
  return r;
}

FluencyReport fluency_report(const EventLog& log) { return fluency_report(segment_timeline(log), log); }

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns{
      "technique",          "task_type",          "placement",         "model",
      "seed",               "status",             "completed",         "completion_time_s",
      "user_idle_pct",      "robot_idle_pct",     "concurrent_activity_pct",
      "user_overhead_pct",  "robot_errors",       "touches_allocation", "touches_manipulate",
      "touches_maneuver",   "user_idle_s",        "user_goal_s",       "user_maneuver_s",
      "user_allocation_s",  "robot_idle_s",       "robot_goal_s",      "robot_reach_overhead_s"};
  return columns;
}

nlohmann::ordered_json to_json(const FluencyReport& r) {
  nlohmann::ordered_json j;
  j["completed"] = r.completed;
  j["completion_time_s"] = r.completion_time_s;
  j["user_idle_pct"] = r.user_idle_pct;
  j["robot_idle_pct"] = r.robot_idle_pct;
  j["concurrent_activity_pct"] = r.concurrent_activity_pct;
  j["user_overhead_pct"] = r.user_overhead_pct;
  j["robot_errors"] = r.robot_errors;
  j["touches_allocation"] = r.touches.allocation;
  j["touches_manipulate"] = r.touches.manipulate;
  j["touches_maneuver"] = r.touches.maneuver;
  j["user_idle_s"] = r.user_idle_s;
  j["user_goal_s"] = r.user_goal_s;
  j["user_maneuver_s"] = r.user_maneuver_s;
  j["user_allocation_s"] = r.user_allocation_s;
  j["robot_idle_s"] = r.robot_idle_s;
  j["robot_goal_s"] = r.robot_goal_s;
  j["robot_reach_overhead_s"] = r.robot_reach_overhead_s;
  return j;
}

namespace {

nlohmann::ordered_json row_to_json(const TrialRow& row) {
  nlohmann::ordered_json j;
  j["technique"] = row.technique;
  j["task_type"] = row.task_type;
  j["placement"] = row.placement;
  j["model"] = row.model;
  j["seed"] = row.seed;
  j["status"] = row.status;
  j.update(to_json(row.report));
  return j;
}

TrialRow row_from_json(const nlohmann::json& j) {
  TrialRow row;
  FluencyReport& r = row.report;
  row.technique = j.at("technique").get<std::string>();
  row.task_type = j.at("task_type").get<std::string>();
  row.placement = j.at("placement").get<std::string>();
  row.model = j.at("model").get<std::string>();
  row.seed = j.at("seed").get<std::uint64_t>();
  row.status = j.value("status", std::string("ok"));
  r.completed = j.at("completed").get<bool>();
  r.completion_time_s = j.at("completion_time_s").get<double>();
  r.user_idle_pct = j.at("user_idle_pct").get<double>();
  r.robot_idle_pct = j.at("robot_idle_pct").get<double>();
  r.concurrent_activity_pct = j.at("concurrent_activity_pct").get<double>();
  r.user_overhead_pct = j.at("user_overhead_pct").get<double>();
  r.robot_errors = j.at("robot_errors").get<int>();
  r.touches.allocation = j.at("touches_allocation").get<int>();
  r.touches.manipulate = j.at("touches_manipulate").get<int>();
  r.touches.maneuver = j.at("touches_maneuver").get<int>();
  r.user_idle_s = j.at("user_idle_s").get<double>();
  r.user_goal_s = j.at("user_goal_s").get<double>();
  r.user_maneuver_s = j.at("user_maneuver_s").get<double>();
  r.user_allocation_s = j.at("user_allocation_s").get<double>();
  r.robot_idle_s = j.at("robot_idle_s").get<double>();
  r.robot_goal_s = j.at("robot_goal_s").get<double>();
  r.robot_reach_overhead_s = j.at("robot_reach_overhead_s").get<double>();
  return row;
}

std::string csv_cell(const nlohmann::ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt_number(v.get<double>());
  return v.dump();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

std::string export_results(const std::vector<TrialRow>& rows, ResultFormat format) {
  if (rows.empty()) throw std::invalid_argument("no results to export");
  if (format == ResultFormat::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) arr.push_back(row_to_json(row));
    return arr.dump(2) + "\n";
  }
  std::ostringstream out;
  const auto& cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : rows) {
    const auto j = row_to_json(row);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_cell(j.at(cols[i]));
    out << "\n";
  }
  return out.str();
}

std::vector<TrialRow> import_results(const std::string& text, ResultFormat format) {
  std::vector<TrialRow> rows;
  try {
    if (format == ResultFormat::json) {
      for (const auto& j : nlohmann::json::parse(text)) rows.push_back(row_from_json(j));
      return rows;
    }
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) return rows;
    const auto header = split_csv_line(line);
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != header.size()) throw ParseError("results row has " + std::to_string(cells.size()) + " cells");
      nlohmann::json j;
      for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        const std::string& c = cells[i];
        if (h == "technique" || h == "task_type" || h == "placement" || h == "model" || h == "status") {
          j[h] = c;
        } else if (h == "completed") {
          j[h] = c == "true";
        } else {
          j[h] = nlohmann::json::parse(c);
        }
      }
      rows.push_back(row_from_json(j));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed results: ") + e.what());
  }
  return rows;
}

ResultFormat result_format_for(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension();
  if (ext == ".json") return ResultFormat::json;
  if (ext == ".csv") return ResultFormat::csv;
  throw std::invalid_argument("results file must end in .csv or .json: " + path);
}

}  // namespace tabletop
