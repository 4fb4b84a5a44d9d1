#include "tabletop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "tabletop/engine.hpp"

namespace tabletop {

namespace {

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const nlohmann::json& j, const char* key, Parse parse) {
  std::vector<T> out;
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw PlanError(std::string(key) + " must be an array");
  for (const auto& v : arr) out.push_back(parse(v.get<std::string>()));
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrialRow row_for(const TrialCell& cell) {
  TrialRow row;
  row.technique = std::string(to_string(cell.technique));
  row.task_type = std::string(to_string(cell.task_type));
  row.placement = std::string(to_string(cell.placement));
  row.model = std::string(to_string(cell.model.kind));
  row.seed = cell.seed;
  return row;
}

void run_parallel(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

}  // namespace

void validate(const ExperimentPlan& plan) {
  if (plan.techniques.empty()) throw PlanError("plan has no techniques");
  if (plan.task_types.empty()) throw PlanError("plan has no task types");
  if (plan.placements.empty()) throw PlanError("plan has no placements");
  if (plan.models.empty()) throw PlanError("plan has no human models");
  if (plan.seeds.empty()) throw PlanError("plan has no seeds");
  if (plan.tick_limit < 1) throw PlanError("tick_limit must be positive");
  if (std::set<std::uint64_t>(plan.seeds.begin(), plan.seeds.end()).size() != plan.seeds.size()) {
    throw PlanError("seeds must be distinct");
  }
  if (std::set<PolicyKind>(plan.techniques.begin(), plan.techniques.end()).size() != plan.techniques.size()) {
    throw PlanError("techniques must be distinct");
  }
  if (std::set<TaskType>(plan.task_types.begin(), plan.task_types.end()).size() != plan.task_types.size()) {
    throw PlanError("task types must be distinct");
  }
  if (std::set<Placement>(plan.placements.begin(), plan.placements.end()).size() != plan.placements.size()) {
    throw PlanError("placements must be distinct");
  }
  // Model kind names the log files and result rows, so kinds must be unique.
  std::set<HumanModelKind> kinds;
  for (const auto& m : plan.models) {
    if (!kinds.insert(m.kind).second) throw PlanError("human model kinds must be distinct");
    try {
      validate(m);
    } catch (const std::invalid_argument& e) {
      throw PlanError(e.what());
    }
  }
  for (const auto& r : plan.results) {
    if (!has_suffix(r, ".csv") && !has_suffix(r, ".json")) throw PlanError("results file must end in .csv or .json: " + r);
    if (std::filesystem::path(r).has_parent_path()) throw PlanError("results entries are file names, not paths: " + r);
  }
  try {
    validate(plan.config);
  } catch (const std::invalid_argument& e) {
    throw PlanError(e.what());
  }
}

ExperimentPlan experiment_plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw PlanError("plan must be a JSON object");
  ExperimentPlan plan;
  try {
    if (j.at("techniques").is_string()) {
      if (j.at("techniques").get<std::string>() != "all") throw PlanError("techniques must be a list or \"all\"");
      for (const auto& t : kTechniques) plan.techniques.push_back(t.kind);
    } else {
      plan.techniques = parse_list<PolicyKind>(j, "techniques", [](const std::string& s) { return parse_policy_kind(s); });
    }
    plan.task_types = parse_list<TaskType>(j, "task_types", [](const std::string& s) { return parse_task_type(s); });
    plan.placements = parse_list<Placement>(j, "placements", [](const std::string& s) { return parse_placement(s); });
    for (const auto& m : j.at("models")) plan.models.push_back(human_model_from_json(m));
    const auto& seeds = j.at("seeds");
    if (seeds.is_object()) {
      const auto first = seeds.at("first").get<std::uint64_t>();
      const auto count = seeds.at("count").get<std::int64_t>();
      for (std::int64_t i = 0; i < count; ++i) plan.seeds.push_back(first + static_cast<std::uint64_t>(i));
    } else {
      plan.seeds = seeds.get<std::vector<std::uint64_t>>();
    }
    if (auto it = j.find("tick_limit"); it != j.end()) plan.tick_limit = it->get<Tick>();
    if (auto it = j.find("config"); it != j.end()) plan.config = sim_config_from_json(*it, plan.config);
    if (auto it = j.find("params"); it != j.end()) plan.config.params = policy_params_from_json(*it, plan.config.params);
    if (auto it = j.find("results"); it != j.end()) plan.results = it->get<std::vector<std::string>>();
    if (auto it = j.find("workers"); it != j.end()) plan.workers = it->get<unsigned>();
  } catch (const PlanError&) {
    throw;
  } catch (const std::exception& e) {
    throw PlanError(std::string("invalid plan: ") + e.what());
  }
  validate(plan);
  return plan;
}

nlohmann::ordered_json to_json(const ExperimentPlan& plan) {
  nlohmann::ordered_json j;
  j["techniques"] = nlohmann::ordered_json::array();
  for (auto t : plan.techniques) j["techniques"].push_back(to_string(t));
  j["task_types"] = nlohmann::ordered_json::array();
  for (auto t : plan.task_types) j["task_types"].push_back(to_string(t));
  j["placements"] = nlohmann::ordered_json::array();
  for (auto p : plan.placements) j["placements"].push_back(to_string(p));
  j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : plan.models) j["models"].push_back(to_json(m));
  j["seeds"] = plan.seeds;
  j["tick_limit"] = plan.tick_limit;
  j["config"] = to_json(plan.config);
  j["results"] = plan.results;
  j["workers"] = plan.workers;
  return j;
}

ExperimentPlan trend_plan(std::vector<HumanModel> models, int seed_count) {
  ExperimentPlan plan;
  for (const auto& t : kTechniques) plan.techniques.push_back(t.kind);
  plan.task_types = {TaskType::coupled, TaskType::decoupled};
  plan.placements = {Placement::scattered, Placement::sorted};
  plan.models = std::move(models);
  for (int s = 1; s <= seed_count; ++s) plan.seeds.push_back(static_cast<std::uint64_t>(s));
  validate(plan);
  return plan;
}

std::vector<TrialCell> expand(const ExperimentPlan& plan) {
  std::vector<TrialCell> cells;
  for (auto t : plan.techniques) {
    for (auto task : plan.task_types) {
      for (auto pl : plan.placements) {
        for (const auto& m : plan.models) {
          for (auto seed : plan.seeds) cells.push_back({t, task, pl, m, seed});
        }
      }
    }
  }
  return cells;
}

std::string log_file_name(const TrialCell& c) {
  std::string name;
  name += to_string(c.technique);
  name += '_';
  name += to_string(c.task_type);
  name += '_';
  name += to_string(c.placement);
  name += '_';
  name += to_string(c.model.kind);
  name += '_' + std::to_string(c.seed) + ".jsonl";
  return name;
}

CellOutcome run_cell(const TrialCell& cell, const ExperimentPlan& plan) {
  CellOutcome out{row_for(cell), std::nullopt};
  try {
    const Scenario scenario = generate_scenario({cell.task_type, cell.placement, cell.seed, kDefaultBlockCount});
    ScriptedHuman human(cell.model);
    auto [result, log] = run_trial(scenario, plan.config, cell.technique, human, plan.tick_limit);
    out.row.report = fluency_report(log);
    out.log = std::move(log);
  } catch (const std::exception& e) {
    out.row.status = "failed";
    out.row.report = {};
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

BatchSummary run_batch(const ExperimentPlan& plan, const std::filesystem::path& out_dir, const ProgressFn& progress) {
  validate(plan);
  const auto logs_dir = out_dir / "logs";
  std::filesystem::create_directories(logs_dir);

  const auto cells = expand(plan);
  BatchSummary summary;
  summary.rows.resize(cells.size());
  std::vector<char> resumed(cells.size(), 0);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  run_parallel(cells.size(), plan.workers, [&](std::size_t i) {
    const auto path = logs_dir / log_file_name(cells[i]);
    bool have = false;
    if (std::filesystem::exists(path)) {
      // A log that no longer parses is rerun rather than trusted.
      try {
        const EventLog log = parse_jsonl(read_file(path));
        TrialRow row = row_for(cells[i]);
        row.report = fluency_report(log);
        summary.rows[i] = std::move(row);
        resumed[i] = 1;
        have = true;
      } catch (const std::exception&) {
      }
    }
    if (!have) {
      CellOutcome outcome = run_cell(cells[i], plan);
      if (outcome.log) write_file_atomic(path, to_jsonl(*outcome.log));
      summary.rows[i] = std::move(outcome.row);
    }
    const std::size_t n = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(n, cells.size());
    }
  });

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (resumed[i]) {
      ++summary.resumed;
    } else {
      ++summary.ran;
    }
    if (summary.rows[i].status == "failed") ++summary.failed;
  }
  for (const auto& name : plan.results) {
    write_file_atomic(out_dir / name, export_results(summary.rows, result_format_for(name)));
  }
  return summary;
}

BatchSummary run_batch_in_memory(const ExperimentPlan& plan) {
  validate(plan);
  const auto cells = expand(plan);
  BatchSummary summary;
  summary.rows.resize(cells.size());
  run_parallel(cells.size(), plan.workers, [&](std::size_t i) { summary.rows[i] = run_cell(cells[i], plan).row; });
  summary.ran = cells.size();
  summary.failed = static_cast<std::size_t>(
      std::count_if(summary.rows.begin(), summary.rows.end(), [](const TrialRow& r) { return r.status == "failed"; }));
  return summary;
}

std::string_view to_string(TrendStatus s) {
  switch (s) {
    case TrendStatus::pass: return "PASS";
    case TrendStatus::fail: return "FAIL";
    case TrendStatus::not_evaluable: return "NOT-EVALUABLE";
  }
  return "?";
}

const TrendCheck* TrendReport::find(std::string_view id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool TrendReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const TrendCheck& c) { return c.status == TrendStatus::pass; });
}

namespace {

constexpr std::string_view kFocused = "focused_builder";
constexpr std::string_view kGuardian = "guardian";
const std::vector<std::string> kImplicitTrio{"distance", "gaze", "proximity"};
const std::vector<std::string> kExplicitTrio{"voice", "menu", "fixed"};

using Metric = double (*)(const TrialRow&);

double completion(const TrialRow& r) { return r.report.completion_time_s; }
double errors(const TrialRow& r) { return static_cast<double>(r.report.robot_errors); }
double overhead(const TrialRow& r) { return r.report.user_overhead_pct; }

struct CellKey {
  std::string technique, task_type, placement;
  auto operator<=>(const CellKey&) const = default;
};

// Seed means per cell, then the mean over the matching cells. Failed rows are
// excluded; a filter that matches no usable row gives nullopt.
class Means {
 public:
  Means(const std::vector<TrialRow>& rows, std::string_view model) {
    for (const auto& r : rows) {
      if (r.model == model && r.status != "failed") rows_.push_back(&r);
    }
  }

  std::optional<double> mean(Metric metric, const std::function<bool(const TrialRow&)>& keep) const {
    std::map<CellKey, std::pair<double, int>> cells;
    for (const auto* r : rows_) {
      if (!keep(*r)) continue;
      auto& acc = cells[{r->technique, r->task_type, r->placement}];
      acc.first += metric(*r);
      acc.second += 1;
    }
    if (cells.empty()) return std::nullopt;
    double total = 0.0;
    for (const auto& [key, acc] : cells) total += acc.first / acc.second;
    return total / static_cast<double>(cells.size());
  }

  std::optional<double> technique(Metric metric, const std::string& t) const {
    return mean(metric, [&](const TrialRow& r) { return r.technique == t; });
  }

 private:
  std::vector<const TrialRow*> rows_;
};

struct Builder {
  TrendCheck check;
  bool missing = false;
  bool ok = true;

  Builder(std::string id, std::string description) {
    check.id = std::move(id);
    check.description = std::move(description);
  }

  std::optional<double> observe(const std::string& label, std::optional<double> v) {
    if (!v) {
      missing = true;
      check.note += (check.note.empty() ? "missing cells: " : ", ") + label;
    } else {
      check.observed.emplace_back(label, *v);
    }
    return v;
  }

  void require_greater(std::optional<double> a, std::optional<double> b) {
    if (a && b && !(*a > *b)) ok = false;
  }

  TrendCheck finish() {
    check.status = missing ? TrendStatus::not_evaluable : ok ? TrendStatus::pass : TrendStatus::fail;
    return check;
  }
};

}  // namespace

TrendReport check_trends(const std::vector<TrialRow>& rows) {
  TrendReport report;
  const Means focused(rows, kFocused);
  const std::vector<std::string> implicit_all{"proactive", "distance", "gaze", "proximity"};

  {
    Builder b("menu_slowest", "completion: menu > voice and menu > every implicit technique");
    const auto menu = b.observe("menu", focused.technique(completion, "menu"));
    b.require_greater(menu, b.observe("voice", focused.technique(completion, "voice")));
    for (const auto& t : implicit_all) b.require_greater(menu, b.observe(t, focused.technique(completion, t)));
    report.checks.push_back(b.finish());
  }
  {
    Builder b("coupled_slower", "completion: coupled > decoupled, pooled over techniques");
    const auto c = b.observe("coupled", focused.mean(completion, [](const TrialRow& r) { return r.task_type == "coupled"; }));
    const auto d =
        b.observe("decoupled", focused.mean(completion, [](const TrialRow& r) { return r.task_type == "decoupled"; }));
    b.require_greater(c, d);
    report.checks.push_back(b.finish());
  }
  {
    Builder b("scattered_slower", "completion: scattered > sorted, pooled over techniques");
    const auto s =
        b.observe("scattered", focused.mean(completion, [](const TrialRow& r) { return r.placement == "scattered"; }));
    const auto o = b.observe("sorted", focused.mean(completion, [](const TrialRow& r) { return r.placement == "sorted"; }));
    b.require_greater(s, o);
    report.checks.push_back(b.finish());
  }
  {
    Builder b("implicit_more_errors", "robot errors: each of distance, gaze, proximity > each of voice, menu, fixed");
    std::vector<std::optional<double>> imp;
    std::vector<std::optional<double>> exp;
    for (const auto& t : kImplicitTrio) imp.push_back(b.observe(t, focused.technique(errors, t)));
    for (const auto& t : kExplicitTrio) exp.push_back(b.observe(t, focused.technique(errors, t)));
    for (const auto& i : imp) {
      for (const auto& e : exp) b.require_greater(i, e);
    }
    report.checks.push_back(b.finish());
  }
  {
    Builder b("coupled_more_errors", "robot errors: coupled > decoupled for distance, gaze and proximity");
    for (const auto& t : kImplicitTrio) {
      const auto c = b.observe(t + " coupled", focused.mean(errors, [&](const TrialRow& r) {
        return r.technique == t && r.task_type == "coupled";
      }));
      const auto d = b.observe(t + " decoupled", focused.mean(errors, [&](const TrialRow& r) {
        return r.technique == t && r.task_type == "decoupled";
      }));
      b.require_greater(c, d);
    }
    report.checks.push_back(b.finish());
  }
  {
    Builder b("guardian_fewer_errors", "robot errors: guardian < focused_builder on matched implicit cells and seeds");
    using Key = std::tuple<std::string, std::string, std::string, std::uint64_t>;
    std::map<Key, double> f;
    std::map<Key, double> g;
    for (const auto& r : rows) {
      if (r.status == "failed" || !is_implicit(parse_policy_kind(r.technique))) continue;
      const Key k{r.technique, r.task_type, r.placement, r.seed};
      if (r.model == kFocused) f[k] = errors(r);
      if (r.model == kGuardian) g[k] = errors(r);
    }
    double fs = 0.0;
    double gs = 0.0;
    int matched = 0;
    for (const auto& [k, v] : f) {
      if (auto it = g.find(k); it != g.end()) {
        fs += v;
        gs += it->second;
        ++matched;
      }
    }
    if (matched == 0) {
      b.observe("focused_builder", std::nullopt);
      b.observe("guardian", std::nullopt);
    } else {
      const auto fm = b.observe("focused_builder", fs / matched);
      const auto gm = b.observe("guardian", gs / matched);
      b.check.note = std::to_string(matched) + " matched trials";
      b.require_greater(fm, gm);
    }
    report.checks.push_back(b.finish());
  }
  {
    Builder b("menu_overhead", "user overhead under menu > 15% of trial time");
    const auto m = b.observe("menu overhead %", focused.technique(overhead, "menu"));
    b.require_greater(m, 15.0);
    report.checks.push_back(b.finish());
  }
  return report;
}

std::string format_trend_report(const TrendReport& report) {
  std::string out;
  char buf[64];
  for (const auto& c : report.checks) {
    out += std::string(to_string(c.status)) + "  " + c.id + ": " + c.description + "\n";
    for (const auto& [label, v] : c.observed) {
      std::snprintf(buf, sizeof buf, "%.3f", v);
      out += "    " + label + " = " + buf + "\n";
    }
    if (!c.note.empty()) out += "    (" + c.note + ")\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const TrendReport& report) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json obs = nlohmann::ordered_json::object();
    for (const auto& [label, v] : c.observed) obs[label] = v;
    arr.push_back({{"id", c.id},
                   {"description", c.description},
                   {"status", to_string(c.status)},
                   {"observed", obs},
                   {"note", c.note}});
  }
  return {{"checks", arr}, {"all_pass", report.all_pass()}};
}

}  // namespace tabletop
