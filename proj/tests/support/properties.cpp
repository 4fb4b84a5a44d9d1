#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace tabletop::testing {

namespace {

std::string trial_name(const LoggedTrial& t) { return log_file_name(t.cell); }

const HumanModel kModels[] = {
    HumanModel{HumanModelKind::focused_builder},
    HumanModel{HumanModelKind::eager_manager},
    HumanModel{HumanModelKind::guardian},
};

}  // namespace

LoggedTrial run_logged(const TrialCell& cell, const SimConfig& config, Tick tick_limit) {
  const Scenario scenario = generate_scenario({cell.task_type, cell.placement, cell.seed, kDefaultBlockCount});
  ScriptedHuman human(cell.model);
  auto [result, log] = run_trial(scenario, config, cell.technique, human, tick_limit);
  return {cell, std::move(result), std::move(log)};
}

std::vector<TrialCell> mixed_cells(PolicyKind technique, int count, std::uint64_t first_seed) {
  std::vector<TrialCell> cells;
  for (int i = 0; i < count; ++i) {
    TrialCell c;
    c.technique = technique;
    c.task_type = i % 2 ? TaskType::decoupled : TaskType::coupled;
    c.placement = (i / 2) % 2 ? Placement::sorted : Placement::scattered;
    c.model = kModels[(i / 4) % 3];
    c.seed = first_seed + static_cast<std::uint64_t>(i);
    cells.push_back(c);
  }
  return cells;
}

PropertyResult check_determinism(int trials_per_technique) {
  PropertyResult r;
  for (const auto& t : kTechniques) {
    for (const auto& cell : mixed_cells(t.kind, trials_per_technique)) {
      ++r.checked;
      const LoggedTrial a = run_logged(cell);
      const LoggedTrial b = run_logged(cell);
      const std::string text = to_jsonl(a.log);
      if (text != to_jsonl(b.log)) {
        r.fail(trial_name(a) + ": logs differ between runs");
        continue;
      }
      const EventLog parsed = parse_jsonl(text);
      if (!(parsed == a.log)) {
        r.fail(trial_name(a) + ": log does not survive a JSON-lines round trip");
        continue;
      }
      try {
        if (!(replay(parsed.header.scenario, parsed) == a.result.final_world)) {
          r.fail(trial_name(a) + ": replayed final state differs");
          continue;
        }
      } catch (const std::exception& e) {
        r.fail(trial_name(a) + ": replay threw: " + e.what());
        continue;
      }
      if (!(fluency_report(parsed) == fluency_report(a.log))) r.fail(trial_name(a) + ": replayed report differs");
    }
  }
  if (r.pass) r.detail = std::to_string(r.checked) + " trials reproduced byte for byte";
  return r;
}

PropertyResult check_score_field_laws() {
  PropertyResult r;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Proximity channels stay in [0, amplitude]; decay never raises a score.
  for (int trial = 0; trial < 300; ++trial) {
    ++r.checked;
    const double amplitude = 0.1 + 2.0 * u(rng);
    ProximityField f(RegionGrid(1 + static_cast<int>(rng() % 10), 1 + static_cast<int>(rng() % 10)), amplitude,
                     0.5 + 20.0 * u(rng));
    for (Tick t = 0; t < 300 && r.pass; ++t) {
      const auto before_user = f.channel(Actor::user);
      const auto before_robot = f.channel(Actor::robot);
      const bool infuse = rng() % 9 == 0;
      if (infuse) {
        f.infuse(rng() % 2 ? Actor::user : Actor::robot, {u(rng), u(rng)}, 0.3 * u(rng), t);
      } else {
        f.decay(0.05);
      }
      for (Actor a : {Actor::user, Actor::robot}) {
        const auto& now = f.channel(a);
        const auto& before = a == Actor::user ? before_user : before_robot;
        for (std::size_t i = 0; i < now.size(); ++i) {
          if (now[i] < 0.0 || now[i] > amplitude) r.fail("proximity score left [0, amplitude]");
          if (!infuse && now[i] > before[i]) r.fail("decay raised a proximity score");
          if (!infuse && before[i] > 0.0 && !(now[i] < before[i])) r.fail("decay did not lower a positive score");
        }
      }
    }
  }

  // Half-life: 1.0 decays to 0.5 after 10 s, within one tick.
  {
    ++r.checked;
    const double dt = 0.05;
    ProximityField f(RegionGrid(10, 10), 1.0, 10.0);
    f.infuse(Actor::user, {0.5, 0.5}, 0.15, 0);
    const int region = region_of({0.5, 0.5}, f.grid());
    double prev = f.score(Actor::user, region);
    double at_half_life = 0.0;
    double after = 0.0;
    for (int t = 1; t <= 201; ++t) {
      f.decay(dt);
      if (t == 199) prev = f.score(Actor::user, region);
      if (t == 200) at_half_life = f.score(Actor::user, region);
      if (t == 201) after = f.score(Actor::user, region);
    }
    if (!(prev >= 0.5 && after <= 0.5 && std::abs(at_half_life - 0.5) < 1e-12)) {
      std::ostringstream os;
      os << "half-life value " << at_half_life << " (neighbours " << prev << ", " << after << ")";
      r.fail(os.str());
    }
  }

  // Gaze ring buffer equals the naive mean of the last window exposures.
  for (int trial = 0; trial < 300 && r.pass; ++trial) {
    ++r.checked;
    const RegionGrid grid(1 + static_cast<int>(rng() % 10), 1 + static_cast<int>(rng() % 10));
    const int window = 1 + static_cast<int>(rng() % 80);
    GazeField g(grid, window);
    std::deque<int> history;
    for (int t = 0; t < 250 && r.pass; ++t) {
      std::optional<Position> p;
      if (rng() % 6 != 0) p = Position{u(rng), u(rng)};
      g.observe(p);
      history.push_back(p ? static_cast<int>(std::min(std::floor(p->y * grid.rows()), grid.rows() - 1.0)) * grid.cols() +
                                static_cast<int>(std::min(std::floor(p->x * grid.cols()), grid.cols() - 1.0))
                          : -1);
      if (static_cast<int>(history.size()) > window) history.pop_front();
      std::vector<double> naive(static_cast<std::size_t>(grid.size()), 0.0);
      for (int h : history) {
        if (h >= 0) naive[static_cast<std::size_t>(h)] += 1.0;
      }
      for (auto& v : naive) v /= window;
      if (g.means() != naive) r.fail("gaze ring buffer differs from the naive window mean");
    }
  }
  if (r.pass) r.detail = "bounds, monotone decay, half-life and gaze window hold on " + std::to_string(r.checked) + " cases";
  return r;
}

PropertyResult check_task_rules(const std::vector<LoggedTrial>& trials) {
  PropertyResult r;
  for (const auto& t : trials) {
    ++r.checked;
    const EventLog& log = t.log;
    const Scenario& scenario = log.header.scenario;
    const auto color_of = [&](BlockId id) { return scenario.blocks.at(static_cast<std::size_t>(id - 1)).color; };
    const std::string name = trial_name(t);

    for (const auto& p : log.all<PlacementEvent>()) {
      if (p.actor == Actor::robot && color_of(p.block) == Color::yellow) r.fail(name + ": robot placed a yellow block");
    }

    int fail_yellow = 0;
    std::set<BlockId> failed;
    for (const auto& p : log.all<PickEvent>()) {
      if (p.actor != Actor::robot) continue;
      if (failed.contains(p.block)) r.fail(name + ": robot re-attempted block " + std::to_string(p.block));
      if (p.result == PickResult::fail_yellow) {
        ++fail_yellow;
        failed.insert(p.block);
      }
    }
    const WorldState& w = t.result.final_world;
    int yellow_never_retry = 0;
    for (BlockId b : w.robot.never_retry) yellow_never_retry += color_of(b) == Color::yellow;
    const FluencyReport report = fluency_report(log);
    if (w.robot.errors != fail_yellow || report.robot_errors != fail_yellow || yellow_never_retry != fail_yellow) {
      r.fail(name + ": error counts disagree with fail_yellow picks");
    }

    // Placed colours per structure, bottom to top, must match the goal slots.
    std::map<StructureId, std::vector<std::pair<int, Color>>> stacks;
    for (const auto& p : log.all<PlacementEvent>()) stacks[p.structure].emplace_back(p.slot, color_of(p.block));
    for (auto& [id, stack] : stacks) {
      std::sort(stack.begin(), stack.end());
      const auto& slots = scenario.structures.at(static_cast<std::size_t>(id)).slots;
      for (std::size_t i = 0; i < stack.size(); ++i) {
        if (stack[i].first != static_cast<int>(i) || stack[i].second != slots.at(i)) {
          r.fail(name + ": structure " + std::to_string(id) + " stack breaks its colour pattern");
        }
        if (scenario.config.task_type == TaskType::coupled && i > 0 && stack[i].second == stack[i - 1].second) {
          r.fail(name + ": coupled stack does not alternate");
        }
      }
    }

    const TimeSegments seg = segment_timeline(log);
    const Tick ticks = t.result.ticks;
    if (std::abs(seg.user.total() - ticks) > 1 || std::abs(seg.robot.total() - ticks) > 1) {
      r.fail(name + ": segments do not sum to the trial duration");
    }

    if (is_explicit(t.cell.technique)) {
      for (const auto& a : log.all<AllocationEvent>()) {
        if (a.reason == AllocationReason::selection) r.fail(name + ": explicit technique allocated on its own");
      }
    }
  }
  if (r.pass) r.detail = std::to_string(r.checked) + " trials obey the task rules";
  return r;
}

PropertyResult check_concurrency_bound(const std::vector<LoggedTrial>& trials) {
  PropertyResult r;
  for (const auto& t : trials) {
    ++r.checked;
    const TimeSegments seg = segment_timeline(t.log);
    const FluencyReport report = fluency_report(seg, t.log);
    if (seg.concurrent_ticks > std::min(seg.user.active(), seg.robot.active())) {
      r.fail(trial_name(t) + ": concurrent ticks exceed an actor's active ticks");
    }
    const double bound = std::min(100.0 - report.user_idle_pct, 100.0 - report.robot_idle_pct);
    if (report.concurrent_activity_pct > bound + 1e-9) {
      r.fail(trial_name(t) + ": concurrent percentage exceeds an actor's active percentage");
    }
  }
  if (r.pass) r.detail = std::to_string(r.checked) + " reports within the bound";
  return r;
}

std::vector<LoggedTrial> property_corpus(int seeds) {
  ExperimentPlan plan;
  for (const auto& t : kTechniques) plan.techniques.push_back(t.kind);
  plan.task_types = {TaskType::coupled, TaskType::decoupled};
  plan.placements = {Placement::scattered, Placement::sorted};
  plan.models = {std::begin(kModels), std::end(kModels)};
  for (int s = 1; s <= seeds; ++s) plan.seeds.push_back(static_cast<std::uint64_t>(s));
  std::vector<LoggedTrial> out;
  for (const auto& cell : expand(plan)) out.push_back(run_logged(cell));
  return out;
}

}  // namespace tabletop::testing
