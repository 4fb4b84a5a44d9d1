// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "support/oracles.hpp"
#include "support/properties.hpp"
#include "tabletop/harness.hpp"

using namespace tabletop;
using namespace tabletop::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double budget_s, const std::function<Verdict()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0.0 && seconds > budget_s) {
    v.pass = false;
    v.detail += " (over the " + std::to_string(static_cast<int>(budget_s)) + " s budget)";
  }
  failures += !v.pass;
  std::printf("%s %2d  %-34s %6.2f s  %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), seconds, v.detail.c_str());
  std::fflush(stdout);
}

Verdict from(const PropertyResult& r) { return {r.pass, r.detail}; }

std::string observed(const TrendCheck& c) {
  std::ostringstream os;
  os.precision(4);
  for (std::size_t i = 0; i < c.observed.size(); ++i) {
    os << (i ? ", " : "") << c.observed[i].first << " " << c.observed[i].second;
  }
  if (!c.note.empty()) os << " [" << c.note << "]";
  return os.str();
}

Verdict trend(const TrendReport& report, std::initializer_list<const char*> ids) {
  Verdict v{true, ""};
  for (const char* id : ids) {
    const TrendCheck* c = report.find(id);
    if (!c) return {false, std::string("missing check ") + id};
    v.pass = v.pass && c->status == TrendStatus::pass;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += std::string(id) + " " + std::string(to_string(c->status)) + ": " + observed(*c);
  }
  return v;
}

}  // namespace

int main() {
  report(1, "selection-oracle equivalence", 30.0, [] {
    const auto s = check_selection_oracles(1, 10000);
    std::string detail = std::to_string(s.cases) + " worlds, " + std::to_string(s.mismatches) + " mismatches";
    if (!s.first.empty()) detail += "; first: " + s.first;
    return Verdict{s.mismatches == 0 && s.cases >= 10000, detail};
  });

  report(2, "determinism and replay", 60.0, [] { return from(check_determinism(100)); });

  report(3, "score-field laws", 0.0, [] { return from(check_score_field_laws()); });

  const std::vector<LoggedTrial> corpus = property_corpus(5);
  report(4, "task-rule laws", 0.0, [&] { return from(check_task_rules(corpus)); });
  report(5, "concurrency bound", 0.0, [&] { return from(check_concurrency_bound(corpus)); });

  // One batch serves criteria 6 to 10: the full grid, 20 seeds, both models.
  TrendReport trends;
  const auto start = std::chrono::steady_clock::now();
  const BatchSummary batch = run_batch_in_memory(
      trend_plan({HumanModel{HumanModelKind::focused_builder}, HumanModel{HumanModelKind::guardian}}, 20));
  trends = check_trends(batch.rows);
  const double batch_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("      trend batch: %zu trials, %zu failed, %.2f s\n", batch.rows.size(), batch.failed, batch_s);

  report(6, "menu slowest", 0.0, [&] { return trend(trends, {"menu_slowest"}); });
  report(7, "coupled and scattered slower", 0.0, [&] { return trend(trends, {"coupled_slower", "scattered_slower"}); });
  report(8, "implicit and coupled errors", 0.0,
         [&] { return trend(trends, {"implicit_more_errors", "coupled_more_errors"}); });
  report(9, "guardian reduces errors", 0.0, [&] { return trend(trends, {"guardian_fewer_errors"}); });
  report(10, "menu overhead above 15%", 0.0, [&] { return trend(trends, {"menu_overhead"}); });

  if (batch_s > 120.0) {
    std::printf("FAIL     trend batch exceeded the 2 minute budget\n");
    ++failures;
  }
  std::printf("%s\n", failures == 0 ? "all criteria pass" : (std::to_string(failures) + " criteria fail").c_str());
  return failures == 0 ? 0 : 1;
}
