#pragma once

#include <coupled/maps.hpp>
#include <coupled/orbit.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <stdexcept>
#include <utility>
#include <vector>

namespace coupled {

struct PixelIndex {
  std::size_t column = 0;
  std::size_t row = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

/// Column from x, row from y with the y axis pointing up (row 0 is the top).
inline PixelIndex to_pixel(Point p, std::size_t width, std::size_t height) {
  auto cell = [](double v, std::size_t n) {
    const double scaled = std::floor(v * static_cast<double>(n));
    if (!(scaled > 0.0)) return std::size_t{0};
    const auto i = static_cast<std::size_t>(scaled);
    return i < n ? i : n - 1;
  };
  return {cell(p.x, width), (height - 1) - cell(p.y, height)};
}

/// Per-pixel visit counts. Counters are 64-bit and unchecked for overflow.
class Raster {
 public:
  Raster(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::uint64_t at(std::size_t column, std::size_t row) const { return counts_[row * width_ + column]; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  void add(Point p) {
    const auto px = to_pixel(p, width_, height_);
    ++counts_[px.row * width_ + px.column];
    ++total_;
  }
  void accumulate(std::span<const Point> points) {
    for (const auto& p : points) add(p);
  }

  std::uint64_t total() const { return total_; }
  std::uint64_t max_count() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

class OccupancyBitmap {
 public:
  OccupancyBitmap(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool test(std::size_t column, std::size_t row) const { return bits_[row * width_ + column] != 0; }
  void set(std::size_t column, std::size_t row, bool value = true) { bits_[row * width_ + column] = value ? 1 : 0; }
  std::size_t population() const;

  /// Square structuring element of the given radius (Chebyshev ball).
  OccupancyBitmap dilate(std::size_t radius) const;

  friend bool operator==(const OccupancyBitmap&, const OccupancyBitmap&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> bits_;
};

OccupancyBitmap occupancy(const Raster& raster);

struct ComparisonReport {
  double jaccard = 1.0;
  double dilated_jaccard = 1.0;
  std::uint64_t pixel_hausdorff = 0;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws DimensionMismatch when the bitmaps differ in size.
///
/// When exactly one bitmap is empty the Hausdorff distance is undefined; it is
/// reported as max(width, height).
ComparisonReport compare(const OccupancyBitmap& a, const OccupancyBitmap& b, std::size_t dilation);

/// 8-bit grayscale image, row-major, row 0 on top.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 255) : width(w), height(h), pixels(w * h, fill) {}

  std::uint8_t& at(std::size_t column, std::size_t row) { return pixels[row * width + column]; }
  std::uint8_t at(std::size_t column, std::size_t row) const { return pixels[row * width + column]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline constexpr std::size_t default_enlargement = 5;

/// White background, log-scaled darkening by visit count, optional enlarged
/// black squares at each cycle point. `enlargement` must be odd and >= 1.
GrayImage render_image(const Raster& raster, const CycleReport* cycle = nullptr,
                       std::size_t enlargement = default_enlargement);

/// Everything a single limit-set rendering needs besides the system itself.
struct RenderSettings {
  std::uint64_t n_burn = default_burn;
  std::uint64_t m_collect = default_collect;
  std::size_t width = 800;
  std::size_t height = 800;
};

/// Burns in, then accumulates the next m_collect points.
Raster render_raster(const SystemConfig& config, Point initial, const RenderSettings& settings);

struct StabilityOptions {
  RenderSettings render{default_burn, default_collect, 400, 400};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t dilation = 1;
  double threshold = 0.95;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

enum class Verdict { stable, unstable };

struct StabilityTrial {
  std::string label;  // "seed <n>" or "seed <n>, 2N"
  Point initial;
  std::uint64_t n_burn = 0;
  std::size_t population = 0;
};

struct PairComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  ComparisonReport report;
};

struct StabilityResult {
  Verdict verdict = Verdict::unstable;
  std::vector<StabilityTrial> trials;
  std::vector<PairComparison> pairs;
  double min_dilated_jaccard = 1.0;
};

/// Renders one occupancy bitmap per seed plus one from the first seed at twice
/// the burn-in, and calls the result stable iff every pairwise dilated Jaccard
/// score reaches the threshold. Requires at least two seeds.
StabilityResult stability_check(const SystemConfig& config, const StabilityOptions& options);

std::string_view to_string(Verdict verdict);

}  // namespace coupled
