#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <optional>
#include <vector>

namespace coupled {

/// A state (x, y) in the closed unit square.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class Family { logistic, tent };
enum class Scheme { simultaneous, sequential };

/// Linear+ coupler c(x) = base + rate * x with base, rate >= 0 and base + rate <= 1.
struct LinearPlusCoupler {
  double base = 0.0;
  double rate = 0.0;

  friend bool operator==(const LinearPlusCoupler&, const LinearPlusCoupler&) = default;
};

/// Everything needed to define one coupled system on the unit square.
///
/// The x coordinate evolves under `family_f` with parameter `coupler_c(y)`,
/// the y coordinate under `family_g` with parameter `coupler_d(x)` (or of the
/// already-updated x when the scheme is sequential).
struct SystemConfig {
  Scheme scheme = Scheme::simultaneous;
  Family family_f = Family::logistic;
  Family family_g = Family::logistic;
  LinearPlusCoupler coupler_c{0.4, 0.6};
  LinearPlusCoupler coupler_d{0.4, 0.6};

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

inline double clamp_unit(double v) {
  // NaN is not expected; comparisons keep it out of range checks below anyway.
  return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

/// Evaluates the family member with parameter `p` at `x`, clamped into [0,1].
inline double eval_family(Family family, double p, double x) {
  switch (family) {
    case Family::logistic:
      return clamp_unit(4.0 * p * x * (1.0 - x));
    case Family::tent:
      return clamp_unit(p * (1.0 - std::abs(2.0 * x - 1.0)));
  }
  return 0.0;
}

inline double eval_coupler(const LinearPlusCoupler& coupler, double x) {
  return clamp_unit(coupler.base + coupler.rate * x);
}

/// One application of the coupled map.
inline Point step(const SystemConfig& config, Point z) {
  const double x_next = eval_family(config.family_f, eval_coupler(config.coupler_c, z.y), z.x);
  const double driver = config.scheme == Scheme::simultaneous ? z.x : x_next;
  const double y_next = eval_family(config.family_g, eval_coupler(config.coupler_d, driver), z.y);
  return {x_next, y_next};
}

/// Returns every violated constraint; an empty list means the config is valid.
std::vector<std::string> validate_config(const SystemConfig& config);
std::vector<std::string> validate_coupler(const LinearPlusCoupler& coupler, std::string_view label = {});

std::string_view to_string(Family family);
std::string_view to_string(Scheme scheme);
std::optional<Family> parse_family(std::string_view name);
std::optional<Scheme> parse_scheme(std::string_view name);

}  // namespace coupled
