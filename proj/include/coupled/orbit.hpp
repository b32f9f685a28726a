#pragma once

#include <coupled/maps.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace coupled {

inline constexpr std::uint64_t default_burn = 1'000'000;
inline constexpr std::uint64_t default_collect = 100'000;

struct CycleSettings {
  double epsilon = 1e-9;
  std::uint32_t max_period = 4096;
  std::uint32_t confirmations = 3;

  friend bool operator==(const CycleSettings&, const CycleSettings&) = default;
};

/// A finite periodic attractor found after burn-in.
struct CycleReport {
  std::uint32_t period = 0;
  std::vector<Point> points;  // size() == period, points[k] = step^k(points[0])
  double epsilon = 0.0;
  std::uint32_t confirmed_loops = 0;

  friend bool operator==(const CycleReport&, const CycleReport&) = default;
};

/// z_n for z_0 = initial and z_{k+1} = step(config, z_k).
inline Point iterate_burn(const SystemConfig& config, Point initial, std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) initial = step(config, initial);
  return initial;
}

/// Streams step^1(start) .. step^m(start) into `sink` without retaining them.
template <typename Sink>
Point for_each_orbit_point(const SystemConfig& config, Point start, std::uint64_t m, Sink&& sink) {
  for (std::uint64_t i = 0; i < m; ++i) {
    start = step(config, start);
    sink(start);
  }
  return start;
}

std::vector<Point> collect_orbit(const SystemConfig& config, Point start, std::uint64_t m);

/// Looks for the smallest period k <= max_period such that z_{n+jk} stays within
/// epsilon (max-norm) of z_n for j = 1 .. confirmations + 1.
std::optional<CycleReport> detect_cycle(const SystemConfig& config, Point initial, std::uint64_t n_burn,
                                        const CycleSettings& settings = {});

/// Typical initial point for a seed: uniform on the open square (0.01, 0.99)^2.
///
/// Draws come from SplitMix64 evaluated at counters derived from the seed, so
/// the result is bit-identical on every platform. Draw k of a seed is
/// splitmix64(splitmix64(seed) + k * 0x9e3779b97f4a7c15), taking the top 53
/// bits and rejecting values that land on the interval ends.
Point random_initial(std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace coupled
