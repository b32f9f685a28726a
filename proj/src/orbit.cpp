#include <coupled/orbit.hpp>

#include <algorithm>
#include <cmath>

namespace coupled {

std::vector<Point> collect_orbit(const SystemConfig& config, Point start, std::uint64_t m) {
  std::vector<Point> out;
  out.reserve(m);
  for_each_orbit_point(config, start, m, [&](Point p) { out.push_back(p); });
  return out;
}

namespace {

double max_norm(Point a, Point b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

}  // namespace

std::optional<CycleReport> detect_cycle(const SystemConfig& config, Point initial, std::uint64_t n_burn,
                                        const CycleSettings& settings) {
  if (!(settings.epsilon > 0.0) || settings.max_period < 1 || settings.confirmations < 1) return std::nullopt;

  const Point anchor = iterate_burn(config, initial, n_burn);
  const std::size_t loops = std::size_t{settings.confirmations} + 1;
  const std::size_t length = loops * settings.max_period;

  std::vector<Point> trajectory;
  trajectory.reserve(length + 1);
  trajectory.push_back(anchor);
  for_each_orbit_point(config, anchor, length, [&](Point p) { trajectory.push_back(p); });

  for (std::size_t k = 1; k <= settings.max_period; ++k) {
    bool recurs = true;
    for (std::size_t j = 1; j <= loops && recurs; ++j) recurs = max_norm(trajectory[j * k], anchor) < settings.epsilon;
    if (!recurs) continue;
    CycleReport report;
    report.period = static_cast<std::uint32_t>(k);
    report.points.assign(trajectory.begin(), trajectory.begin() + static_cast<std::ptrdiff_t>(k));
    report.epsilon = settings.epsilon;
    report.confirmed_loops = settings.confirmations;
    return report;
  }
  return std::nullopt;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Point random_initial(std::uint64_t seed) {
  constexpr double lo = 0.01;
  constexpr double hi = 0.99;
  // The seed is scrambled into a stream key so neighbouring seeds do not share draws.
  std::uint64_t counter = splitmix64(seed);
  auto draw = [&] {
    for (;;) {
      counter += 0x9e3779b97f4a7c15ULL;
      const double u = static_cast<double>(splitmix64(counter) >> 11) * 0x1.0p-53;
      const double v = lo + (hi - lo) * u;
      if (v > lo && v < hi) return v;
    }
  };
  const double x = draw();
  const double y = draw();
  return {x, y};
}

}  // namespace coupled
