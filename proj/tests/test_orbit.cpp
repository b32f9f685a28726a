#include <coupled/orbit.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

using namespace coupled;

namespace {

SystemConfig logistic_pair(double b, double r, double bp, double rp, Scheme scheme = Scheme::simultaneous) {
  return {scheme, Family::logistic, Family::logistic, {b, r}, {bp, rp}};
}

double max_norm(Point a, Point b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

}  // namespace

TEST_CASE("iterate_burn") {
  const auto paper = logistic_pair(0.4, 0.6, 0.4, 0.6);
  CHECK(iterate_burn(paper, {0.0, 0.0}, 1'000'000) == Point{0.0, 0.0});
  CHECK(iterate_burn(paper, {0.7, 0.6}, 1) == Point{0.6384, 0.7872});
  CHECK(iterate_burn(paper, {0.3, 0.9}, 0) == Point{0.3, 0.9});
}

TEST_CASE("iterate_burn composes") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> steps(0, 3000);
  const auto config = logistic_pair(0.25, 0.7, 0.1, 0.85, Scheme::sequential);
  for (int i = 0; i < 50; ++i) {
    const Point z = random_initial(rng());
    const auto a = static_cast<std::uint64_t>(steps(rng));
    const auto b = static_cast<std::uint64_t>(steps(rng));
    CHECK(iterate_burn(config, z, a + b) == iterate_burn(config, iterate_burn(config, z, a), b));
  }
}

TEST_CASE("collect_orbit") {
  const auto paper = logistic_pair(0.4, 0.6, 0.4, 0.6);
  CHECK(collect_orbit(paper, {0.0, 0.0}, 5) == std::vector<Point>(5, Point{0.0, 0.0}));
  CHECK(collect_orbit(paper, {0.7, 0.6}, 0).empty());

  const auto two = collect_orbit(paper, {0.7, 0.6}, 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0] == Point{0.6384, 0.7872});
  const auto [x2, y2] = oracle::h(0.4, 0.6, 0.4, 0.6, 0.6384, 0.7872);
  CHECK(two[1] == Point{x2, y2});

  for (const Point& p : collect_orbit(paper, random_initial(3), 20000))
    REQUIRE((p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0));
}

TEST_CASE("detect_cycle finds attracting fixed points") {
  const CycleSettings settings{1e-9, 4096, 3};

  SUBCASE("parameter 0.1 contracts to the origin") {
    const auto report = detect_cycle(logistic_pair(0.1, 0, 0.1, 0), {0.7, 0.6}, 10'000, settings);
    REQUIRE(report);
    CHECK(report->period == 1);
    CHECK(max_norm(report->points[0], {0.0, 0.0}) < 1e-6);
    CHECK(report->epsilon == 1e-9);
    CHECK(report->confirmed_loops == 3);
  }
  SUBCASE("parameter 0.5 has the superattracting point 1/2") {
    const auto report = detect_cycle(logistic_pair(0.5, 0, 0.5, 0), {0.7, 0.6}, 10'000, settings);
    REQUIRE(report);
    CHECK(report->period == 1);
    CHECK(max_norm(report->points[0], {0.5, 0.5}) < 1e-6);
  }
  SUBCASE("origin start") {
    const auto report = detect_cycle(logistic_pair(0.4, 0.6, 0.4, 0.6), {0.0, 0.0}, 0, settings);
    REQUIRE(report);
    CHECK(report->period == 1);
    CHECK(report->points[0] == Point{0.0, 0.0});
  }
  SUBCASE("no cycle on a chaotic attractor") {
    CHECK_FALSE(detect_cycle(logistic_pair(0.4, 0.6, 0.4, 0.6), {0.7, 0.6}, 100'000, settings));
  }
  SUBCASE("invalid settings give no report") {
    CHECK_FALSE(detect_cycle(logistic_pair(0.5, 0, 0.5, 0), {0.7, 0.6}, 0, {0.0, 16, 3}));
    CHECK_FALSE(detect_cycle(logistic_pair(0.5, 0, 0.5, 0), {0.7, 0.6}, 0, {1e-9, 0, 3}));
  }
}

TEST_CASE("decoupled cycles are products of the one-dimensional cycles") {
  // 4p = 3.2 has a 2-cycle, 4p = 3.5 a 4-cycle.
  struct Case {
    double b, bp;
    std::uint32_t expected_period;
  };
  for (const Case c : {Case{0.8, 0.875, 4}, Case{0.8, 0.5, 2}, Case{0.875, 0.875, 4}, Case{0.2, 0.8, 2}}) {
    CAPTURE(c.b);
    CAPTURE(c.bp);
    const auto oracle_x = oracle::cycle_1d(oracle::logistic, c.b, 0.7, 100'000, 1e-9, 64);
    const auto oracle_y = oracle::cycle_1d(oracle::logistic, c.bp, 0.6, 100'000, 1e-9, 64);
    REQUIRE(oracle_x);
    REQUIRE(oracle_y);
    const auto lcm = std::lcm(oracle_x->size(), oracle_y->size());
    CHECK(lcm == c.expected_period);

    const auto report = detect_cycle(logistic_pair(c.b, 0, c.bp, 0), {0.7, 0.6}, 100'000);
    REQUIRE(report);
    CHECK(report->period == lcm);

    auto near_any = [](double v, const std::vector<double>& set) {
      return std::any_of(set.begin(), set.end(), [v](double s) { return std::abs(s - v) < 1e-6; });
    };
    std::set<std::size_t> x_hits, y_hits;
    for (const Point& p : report->points) {
      CHECK(near_any(p.x, *oracle_x));
      CHECK(near_any(p.y, *oracle_y));
    }
    // Every 1-D cycle point appears as a coordinate of the 2-D cycle.
    for (double v : *oracle_x)
      CHECK(std::any_of(report->points.begin(), report->points.end(), [v](Point p) { return std::abs(p.x - v) < 1e-6; }));
    for (double v : *oracle_y)
      CHECK(std::any_of(report->points.begin(), report->points.end(), [v](Point p) { return std::abs(p.y - v) < 1e-6; }));
  }
}

TEST_CASE("detected periods are minimal and reproducible") {
  const CycleSettings settings{};
  for (double b : {0.8, 0.875, 0.9}) {
    const auto config = logistic_pair(b, 0.0, 0.875, 0.0);
    const auto report = detect_cycle(config, {0.7, 0.6}, 200'000, settings);
    if (!report) continue;
    CAPTURE(b);
    const std::uint32_t k = report->period;

    // Re-running with max_period = k gives the same answer.
    const auto again = detect_cycle(config, {0.7, 0.6}, 200'000, {settings.epsilon, k, settings.confirmations});
    REQUIRE(again);
    CHECK(again->period == k);

    // No proper divisor of k recurs at this tolerance.
    for (std::uint32_t d = 1; d < k; ++d) {
      if (k % d != 0) continue;
      Point z = report->points[0];
      for (std::uint32_t i = 0; i < d; ++i) z = step(config, z);
      CHECK(max_norm(z, report->points[0]) >= settings.epsilon);
    }
    // The stored points follow the orbit.
    for (std::size_t i = 0; i + 1 < report->points.size(); ++i)
      CHECK(step(config, report->points[i]) == report->points[i + 1]);
  }
}

TEST_CASE("random_initial") {
  CHECK(random_initial(42) == random_initial(42));
  CHECK_FALSE(random_initial(42) == random_initial(43));

  std::set<std::pair<double, double>> distinct;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    const Point p = random_initial(seed);
    REQUIRE(p.x > 0.01);
    REQUIRE(p.x < 0.99);
    REQUIRE(p.y > 0.01);
    REQUIRE(p.y < 0.99);
    distinct.insert({p.x, p.y});
  }
  CHECK(distinct.size() >= 990);

  // Neighbouring seeds must not share draws.
  for (std::uint64_t seed = 0; seed < 1000; ++seed) CHECK(random_initial(seed).y != random_initial(seed + 1).x);
}

TEST_CASE("splitmix64 reference values") {
  // Published first outputs of SplitMix64 seeded with 0 (state advanced per call).
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}
