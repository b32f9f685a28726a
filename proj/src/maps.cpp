#include <coupled/maps.hpp>

#include <cmath>

namespace coupled {

std::vector<std::string> validate_coupler(const LinearPlusCoupler& coupler, std::string_view label) {
  std::vector<std::string> out;
  const std::string prefix = label.empty() ? std::string{} : std::string(label) + ": ";
  if (!std::isfinite(coupler.base) || !std::isfinite(coupler.rate)) {
    out.push_back(prefix + "base and rate must be finite");
    return out;
  }
  if (coupler.base < 0.0) out.push_back(prefix + "base >= 0 failed");
  if (coupler.rate < 0.0) out.push_back(prefix + "rate >= 0 failed");
  if (coupler.base + coupler.rate > 1.0) out.push_back(prefix + "base + rate <= 1 failed");
  return out;
}

std::vector<std::string> validate_config(const SystemConfig& config) {
  std::vector<std::string> out;
  if (config.scheme != Scheme::simultaneous && config.scheme != Scheme::sequential)
    out.emplace_back("unknown scheme");
  for (auto [family, name] : {std::pair{config.family_f, "family_f"}, std::pair{config.family_g, "family_g"}}) {
    if (family != Family::logistic && family != Family::tent) out.push_back(std::string("unknown family for ") + name);
  }
  for (auto& v : validate_coupler(config.coupler_c, "coupler_c")) out.push_back(std::move(v));
  for (auto& v : validate_coupler(config.coupler_d, "coupler_d")) out.push_back(std::move(v));
  return out;
}

std::string_view to_string(Family family) {
  switch (family) {
    case Family::logistic: return "logistic";
    case Family::tent: return "tent";
  }
  return "unknown";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::simultaneous: return "simultaneous";
    case Scheme::sequential: return "sequential";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "logistic") return Family::logistic;
  if (name == "tent") return Family::tent;
  return std::nullopt;
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "simultaneous") return Scheme::simultaneous;
  if (name == "sequential") return Scheme::sequential;
  return std::nullopt;
}

}  // namespace coupled
