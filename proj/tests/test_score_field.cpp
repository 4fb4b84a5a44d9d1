#include <doctest.h>

#include <cmath>
#include <deque>
#include <random>

#include "tabletop/score_field.hpp"

using namespace tabletop;

namespace {

// Naive window mean: recount the last `window` observations from scratch.
std::vector<double> naive_means(const std::deque<int>& history, int window, int regions) {
  std::vector<double> out(static_cast<std::size_t>(regions), 0.0);
  const std::size_t n = history.size();
  const std::size_t from = n > static_cast<std::size_t>(window) ? n - static_cast<std::size_t>(window) : 0;
  for (std::size_t i = from; i < n; ++i) {
    if (history[i] >= 0) out[static_cast<std::size_t>(history[i])] += 1.0;
  }
  for (auto& v : out) v /= window;
  return out;
}

}  // namespace

TEST_CASE("gaze ring buffer equals the naive window mean") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int trial = 0; trial < 200; ++trial) {
    const RegionGrid grid(1 + static_cast<int>(rng() % 10), 1 + static_cast<int>(rng() % 10));
    const int window = 1 + static_cast<int>(rng() % 60);
    GazeField g(grid, window);
    std::deque<int> history;
    for (int t = 0; t < 300; ++t) {
      std::optional<Position> p;
      if (rng() % 5 != 0) p = Position{u(rng), u(rng)};
      g.observe(p);
      history.push_back(p && on_table(*p) ? region_of(*p, grid) : -1);
      REQUIRE(g.means() == naive_means(history, window, grid.size()));
    }
  }
}

TEST_CASE("gaze window examples") {
  const RegionGrid grid(10, 10);
  const int window = 100;
  SUBCASE("a saturated window") {
    GazeField g(grid, window);
    for (int t = 0; t < 150; ++t) g.observe(Position{0.15, 0.25});
    for (int r = 0; r < grid.size(); ++r) CHECK(g.mean(r) == (r == grid.index(2, 1) ? 1.0 : 0.0));
  }
  SUBCASE("half the window on each of two regions") {
    GazeField g(grid, window);
    for (int t = 0; t < 50; ++t) g.observe(Position{0.15, 0.25});
    for (int t = 0; t < 50; ++t) g.observe(Position{0.85, 0.75});
    CHECK(g.mean(grid.index(2, 1)) == 0.5);
    CHECK(g.mean(grid.index(7, 8)) == 0.5);
  }
  SUBCASE("no gaze for a full window") {
    GazeField g(grid, window);
    for (int t = 0; t < 40; ++t) g.observe(Position{0.5, 0.5});
    for (int t = 0; t < window; ++t) g.observe(std::nullopt);
    for (double m : g.means()) CHECK(m == 0.0);
  }
}

TEST_CASE("proximity scores stay within [0, amplitude] and decay monotonically") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double amplitude = 0.1 + 2.0 * u(rng);
    ProximityField f(RegionGrid(1 + static_cast<int>(rng() % 10), 1 + static_cast<int>(rng() % 10)), amplitude,
                     1.0 + 20.0 * u(rng));
    for (Tick t = 0; t < 200; ++t) {
      const auto before_user = f.channel(Actor::user);
      const auto before_robot = f.channel(Actor::robot);
      const bool infuse = rng() % 7 == 0;
      if (infuse) {
        f.infuse(rng() % 2 ? Actor::user : Actor::robot, {u(rng), u(rng)}, 0.3 * u(rng), t);
      } else {
        f.decay(0.05);
      }
      for (Actor a : {Actor::user, Actor::robot}) {
        const auto& now = f.channel(a);
        const auto& before = a == Actor::user ? before_user : before_robot;
        for (std::size_t r = 0; r < now.size(); ++r) {
          REQUIRE(now[r] >= 0.0);
          REQUIRE(now[r] <= amplitude);
          if (!infuse) REQUIRE(now[r] <= before[r]);
          if (!infuse && before[r] > 0.0) REQUIRE(now[r] < before[r]);
        }
      }
    }
  }
}

TEST_CASE("scores approach zero without infusion") {
  ProximityField f(RegionGrid(10, 10), 1.0, 10.0);
  f.infuse(Actor::robot, {0.5, 0.5}, 0.2, 0);
  for (int t = 0; t < 20 * 600; ++t) f.decay(0.05);
  for (double v : f.channel(Actor::robot)) CHECK(v < 1e-15);
}

TEST_CASE("one half-life halves a score to within one tick") {
  const double dt = 0.05;
  ProximityField f(RegionGrid(10, 10), 1.0, 10.0);
  f.infuse(Actor::user, {0.25, 0.25}, 0.15, 0);
  const int region = region_of({0.25, 0.25}, f.grid());
  REQUIRE(f.score(Actor::user, region) == 1.0);
  std::vector<double> values{1.0};
  for (int t = 1; t <= 201; ++t) {
    f.decay(dt);
    values.push_back(f.score(Actor::user, region));
  }
  CHECK(values[200] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(values[199] >= 0.5);
  CHECK(values[201] <= 0.5);
}

TEST_CASE("infusion examples") {
  const RegionGrid grid(10, 10);
  ProximityField f(grid, 1.0, 10.0);
  f.infuse(Actor::user, {0.2, 0.2}, 0.15, 3);
  for (int r = 0; r < grid.size(); ++r) {
    const bool near = distance(grid.center(r), {0.2, 0.2}) <= 0.15 || r == region_of({0.2, 0.2}, grid);
    CHECK(f.score(Actor::user, r) == (near ? 1.0 : 0.0));
  }

  ProximityField g(grid, 1.0, 10.0);
  g.infuse(Actor::robot, {0.55, 0.55}, 0.05, 0);
  for (int t = 0; t < 64; ++t) g.decay(0.05);
  const int r = region_of({0.55, 0.55}, grid);
  CHECK(g.score(Actor::robot, r) > 0.7);
  g.infuse(Actor::user, {0.55, 0.55}, 0.05, 64);
  CHECK(g.score(Actor::robot, r) == 0.0);
  CHECK(g.score(Actor::user, r) == 1.0);
}

TEST_CASE("territory classification") {
  const RegionGrid grid(2, 2);
  GazeField g(grid, 10);
  for (int t = 0; t < 10; ++t) g.observe(Position{0.25, 0.25});
  const auto gaze = territory_classify(g, 0.3, 0.3);
  CHECK(gaze[0] == Territory::user);
  CHECK(gaze[1] == Territory::robot);

  ProximityField p(grid, 1.0, 10.0);
  CHECK(territory_classify(p, 0.3, 0.3) == std::vector<Territory>(4, Territory::group));
  p.infuse(Actor::robot, {0.75, 0.75}, 0.01, 0);
  for (int t = 0; t < 3; ++t) p.decay(0.05);
  CHECK(p.score(Actor::robot, 3) > 0.8);
  const auto prox = territory_classify(p, 0.3, 0.3);
  CHECK(prox[3] == Territory::robot);
  CHECK(prox[0] == Territory::group);
}

TEST_CASE("score field JSON round-trips") {
  ScoreField f = ScoreField::make(SimConfig{});
  gaze_observe(f, Position{0.3, 0.3});
  proximity_update(f, Pickup{Actor::user, {0.3, 0.6}}, 0.05, 0.15, 1);
  proximity_update(f, std::nullopt, 0.05, 0.15, 2);
  CHECK(ScoreField::from_json(f.to_json()) == f);
}
