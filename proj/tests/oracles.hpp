#pragma once

// Reference computations written straight from the map definitions. Nothing
// here calls into the library's evaluation path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace oracle {

inline double logistic(double p, double x) { return 4.0 * p * x * (1.0 - x); }
inline double tent(double p, double x) { return p * (1.0 - std::fabs(2.0 * x - 1.0)); }

/// Simultaneous logistic/logistic step in the explicit four-parameter form.
inline std::pair<double, double> h(double b, double r, double bp, double rp, double x, double y) {
  return {4.0 * (b + r * y) * x * (1.0 - x), 4.0 * (bp + rp * x) * y * (1.0 - y)};
}

/// Sequential logistic/logistic step, with the first coordinate substituted into the second.
inline std::pair<double, double> h_prime(double b, double r, double bp, double rp, double x, double y) {
  return {4.0 * (b + r * y) * x * (1.0 - x), 4.0 * (bp + 4.0 * rp * (b + r * y) * x * (1.0 - x)) * y * (1.0 - y)};
}

/// Orbit of a one-dimensional family at a fixed parameter.
template <typename Map>
std::vector<double> orbit_1d(Map map, double p, double x0, std::size_t steps) {
  std::vector<double> out;
  out.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    x0 = map(p, x0);
    out.push_back(x0);
  }
  return out;
}

/// Brute-force attracting cycle of a 1-D map: iterate long, then try every
/// period in turn against a long window of later iterates.
template <typename Map>
std::optional<std::vector<double>> cycle_1d(Map map, double p, double x0, std::size_t burn, double tol,
                                            std::size_t max_period) {
  for (std::size_t i = 0; i < burn; ++i) x0 = map(p, x0);
  std::vector<double> window{x0};
  for (std::size_t i = 0; i < 8 * max_period; ++i) window.push_back(map(p, window.back()));
  for (std::size_t k = 1; k <= max_period; ++k) {
    bool ok = true;
    for (std::size_t i = 0; i + k < window.size() && ok; ++i) ok = std::fabs(window[i + k] - window[i]) < tol;
    if (ok) return std::vector<double>(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return std::nullopt;
}

/// Chebyshev Hausdorff distance between two pixel sets by exhaustive search.
inline std::uint64_t hausdorff(const std::vector<std::pair<long, long>>& a, const std::vector<std::pair<long, long>>& b) {
  auto directed = [](const auto& from, const auto& to) {
    std::uint64_t worst = 0;
    for (auto [ax, ay] : from) {
      std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
      for (auto [bx, by] : to)
        best = std::min<std::uint64_t>(best, static_cast<std::uint64_t>(std::max(std::labs(ax - bx), std::labs(ay - by))));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// Dilated overlap score by exhaustive search: a pixel of one set counts when
/// some pixel of the other lies within Chebyshev distance `radius`.
inline double dilated_jaccard(const std::vector<std::pair<long, long>>& a, const std::vector<std::pair<long, long>>& b,
                              long radius) {
  if (a.empty() && b.empty()) return 1.0;
  auto near = [radius](const auto& from, const auto& to) {
    std::size_t n = 0;
    for (auto [ax, ay] : from)
      n += std::any_of(to.begin(), to.end(), [&](auto q) {
             return std::max(std::labs(ax - q.first), std::labs(ay - q.second)) <= radius;
           })
               ? 1
               : 0;
    return n;
  };
  return static_cast<double>(near(a, b) + near(b, a)) / static_cast<double>(a.size() + b.size());
}

}  // namespace oracle
