#pragma once

#include <coupled/io.hpp>

#include <json.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace coupled {

using nlohmann::json;

/// Reads typed fields from one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ParseError(path_.empty() ? "document" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return object_.contains(key);
  }
  bool is_null(const std::string& key) { return !has(key) || object_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ParseError(field(key), "missing required field");
    return object_.at(key);
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double real(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ParseError(field(key), "expected a number");
    return v.get<double>();
  }
  std::uint64_t unsigned_integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ParseError(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ParseError(field(key), "expected a string");
    return v.get<std::string>();
  }
  ObjectReader object(const std::string& key) { return {raw(key), field(key)}; }

  void finish() const {
    for (const auto& [key, value] : object_.items())
      if (!seen_.contains(key)) throw ParseError(field(key), "unknown key");
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};


/// Parses JSON, turning syntax errors into ParseError with a line number.
nlohmann::json parse_json(std::string_view text, std::string_view what);

nlohmann::json config_to_json(const RunConfigDocument& doc);
RunConfigDocument config_from_json(const nlohmann::json& j, const RunConfigDocument& defaults);

nlohmann::json point_json(Point p);
nlohmann::json cycle_json(const CycleReport* cycle);
nlohmann::json stability_json(const StabilityResult& result);

}  // namespace coupled
