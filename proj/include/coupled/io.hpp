#pragma once

#include <coupled/maps.hpp>
#include <coupled/orbit.hpp>
#include <coupled/raster.hpp>
#include <coupled/sweep.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coupled {

/// I/O failure carrying the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& cause);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Malformed document. `context` names the line and/or field at fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string context, std::string message);
  const std::string& context() const { return context_; }
  const std::string& message() const { return message_; }

 private:
  std::string context_;
  std::string message_;
};

/// Well-formed document whose values break the model's constraints.
class ConstraintError : public std::runtime_error {
 public:
  explicit ConstraintError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Images ---------------------------------------------------------------------

std::string encode_pgm(const GrayImage& image);
GrayImage decode_pgm(std::string_view bytes);
std::size_t write_pgm(const GrayImage& image, const std::filesystem::path& destination);
GrayImage read_pgm(const std::filesystem::path& source);

std::size_t write_png(const GrayImage& image, const std::filesystem::path& destination);
GrayImage read_png(const std::filesystem::path& source);

// Run configuration ------------------------------------------------------------

/// Fully resolved parameters of one run. The initial point is either derived
/// from a seed or given explicitly.
struct RunConfigDocument {
  SystemConfig system{};
  std::uint64_t n_burn = default_burn;
  std::uint64_t m_collect = default_collect;
  std::variant<std::uint64_t, Point> start = Point{0.7, 0.6};
  std::size_t width = 800;
  std::size_t height = 800;
  CycleSettings cycle{};

  Point initial() const;
  RenderSettings render_settings() const { return {n_burn, m_collect, width, height}; }

  friend bool operator==(const RunConfigDocument&, const RunConfigDocument&) = default;
};

/// Parses and validates; every key is optional (missing ones come from
/// `defaults`) and unknown keys are rejected.
RunConfigDocument parse_config(std::string_view text, const RunConfigDocument& defaults = {});
RunConfigDocument read_config(const std::filesystem::path& source, const RunConfigDocument& defaults = {});

/// Constraint violations of a resolved document (system config, sizes, cycle settings).
std::vector<std::string> validate_document(const RunConfigDocument& doc);
std::string serialize_config(const RunConfigDocument& doc);
void write_config(const RunConfigDocument& doc, const std::filesystem::path& destination);

// Manifests --------------------------------------------------------------------

std::string serialize_manifest(const FrameManifest& manifest);
FrameManifest parse_manifest(std::string_view text);
void write_manifest(const FrameManifest& manifest, const std::filesystem::path& destination);
FrameManifest read_manifest(const std::filesystem::path& source);

// Whole-file helpers; failures throw IoError.
void write_file(const std::filesystem::path& destination, std::string_view bytes);
std::string read_file(const std::filesystem::path& source);

}  // namespace coupled
