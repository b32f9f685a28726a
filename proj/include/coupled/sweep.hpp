#pragma once

#include <coupled/maps.hpp>
#include <coupled/orbit.hpp>
#include <coupled/raster.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coupled {

/// (b, r, b', r'): base and rate of the x-coupler c, then of the y-coupler d.
struct ParamVector {
  double b = 0.0;
  double r = 0.0;
  double b_prime = 0.0;
  double r_prime = 0.0;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

std::vector<std::string> validate_params(const ParamVector& p);

class InvalidCurve : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Either a segment between two parameter vectors or the canonical line
/// s -> (s, 1 - s, b', r').
class ParameterCurve {
 public:
  enum class Kind { segment, canonical };

  static ParameterCurve segment(const ParamVector& from, const ParamVector& to);
  static ParameterCurve canonical(double b_prime, double r_prime);

  Kind kind() const { return kind_; }
  const ParamVector& from() const { return from_; }
  const ParamVector& to() const { return to_; }

  /// Throws InvalidCurve if the point at s violates the coupler constraints.
  ParamVector at(double s) const;

  friend bool operator==(const ParameterCurve&, const ParameterCurve&) = default;

 private:
  ParameterCurve(Kind kind, const ParamVector& from, const ParamVector& to) : kind_(kind), from_(from), to_(to) {}

  Kind kind_;
  ParamVector from_;
  ParamVector to_;  // for the canonical kind only the primed pair is meaningful
};

struct CurveSample {
  double s = 0.0;
  ParamVector params;
};

/// s_i = i / (grid_count - 1) for i = 0 .. grid_count - 1. grid_count must be >= 2.
std::vector<CurveSample> sample_curve(const ParameterCurve& curve, std::size_t grid_count);

SystemConfig make_config(const ParamVector& p, Scheme scheme, Family family_f, Family family_g);

struct SweepSpec {
  ParameterCurve curve = ParameterCurve::canonical(0.4, 0.6);
  std::size_t grid_count = 21;
  Scheme scheme = Scheme::simultaneous;
  Family family_f = Family::logistic;
  Family family_g = Family::logistic;
  RenderSettings render{default_burn, default_collect, 400, 400};
  std::uint64_t seed = 1;
  CycleSettings cycle{};
  std::size_t enlargement = default_enlargement;
  bool check_stability = false;
  StabilityOptions stability{};  // render settings are taken from `render`
  bool write_png = false;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct FrameRecord {
  std::size_t index = 0;
  double s = 0.0;
  ParamVector params;
  Point initial;
  std::string image;                  // file name relative to the output directory
  std::optional<std::string> density_image;  // present when a cycle replaced the density frame
  std::optional<CycleReport> cycle;
  std::optional<Verdict> stability;
  std::optional<double> min_dilated_jaccard;
  std::optional<std::string> error;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

struct FrameManifest {
  std::vector<FrameRecord> frames;

  bool ok() const;
  friend bool operator==(const FrameManifest&, const FrameManifest&) = default;
};

std::string frame_stem(std::size_t index);
std::string frame_filename(std::size_t index, std::string_view extension = "pgm");

/// Initial point used for frame `index` of a sweep seeded with `seed`.
inline Point frame_initial(std::uint64_t seed, std::size_t index) { return random_initial(seed ^ index); }

/// Renders every frame of the sweep into `out_dir` and returns the manifest
/// (the caller writes it). Frame failures are recorded, not thrown.
FrameManifest run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

}  // namespace coupled
