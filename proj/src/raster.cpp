#include <coupled/raster.hpp>

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace coupled {

Raster::Raster(std::size_t width, std::size_t height) : width_(width), height_(height), counts_(width * height, 0) {
  if (width == 0 || height == 0) throw std::invalid_argument("raster dimensions must be >= 1");
}

std::uint64_t Raster::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

OccupancyBitmap::OccupancyBitmap(std::size_t width, std::size_t height)
    : width_(width), height_(height), bits_(width * height, 0) {
  if (width == 0 || height == 0) throw std::invalid_argument("bitmap dimensions must be >= 1");
}

std::size_t OccupancyBitmap::population() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

OccupancyBitmap OccupancyBitmap::dilate(std::size_t radius) const {
  if (radius == 0) return *this;
  // Separable max filter: rows first, then columns.
  OccupancyBitmap horizontal(width_, height_);
  for (std::size_t row = 0; row < height_; ++row) {
    for (std::size_t col = 0; col < width_; ++col) {
      if (!test(col, row)) continue;
      const std::size_t lo = col > radius ? col - radius : 0;
      const std::size_t hi = std::min(width_ - 1, col + radius);
      for (std::size_t c = lo; c <= hi; ++c) horizontal.set(c, row);
    }
  }
  OccupancyBitmap out(width_, height_);
  for (std::size_t row = 0; row < height_; ++row) {
    for (std::size_t col = 0; col < width_; ++col) {
      if (!horizontal.test(col, row)) continue;
      const std::size_t lo = row > radius ? row - radius : 0;
      const std::size_t hi = std::min(height_ - 1, row + radius);
      for (std::size_t r = lo; r <= hi; ++r) out.set(col, r);
    }
  }
  return out;
}

OccupancyBitmap occupancy(const Raster& raster) {
  OccupancyBitmap bits(raster.width(), raster.height());
  for (std::size_t row = 0; row < raster.height(); ++row)
    for (std::size_t col = 0; col < raster.width(); ++col)
      if (raster.at(col, row) > 0) bits.set(col, row);
  return bits;
}

namespace {

/// Chebyshev distance from every pixel to the nearest set bit (8-connected BFS).
std::vector<std::uint64_t> chebyshev_distance(const OccupancyBitmap& bits) {
  const std::size_t w = bits.width();
  const std::size_t h = bits.height();
  constexpr auto unreached = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> dist(w * h, unreached);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < w * h; ++i) {
    if (bits.test(i % w, i / w)) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const auto col = static_cast<std::ptrdiff_t>(i % w);
    const auto row = static_cast<std::ptrdiff_t>(i / w);
    for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
      for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
        const auto r = row + dr;
        const auto c = col + dc;
        if (r < 0 || c < 0 || r >= static_cast<std::ptrdiff_t>(h) || c >= static_cast<std::ptrdiff_t>(w)) continue;
        const auto j = static_cast<std::size_t>(r) * w + static_cast<std::size_t>(c);
        if (dist[j] != unreached) continue;
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return dist;
}

std::uint64_t directed_hausdorff(const OccupancyBitmap& from, const std::vector<std::uint64_t>& to_distance) {
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < to_distance.size(); ++i)
    if (from.test(i % from.width(), i / from.width())) worst = std::max(worst, to_distance[i]);
  return worst;
}

std::size_t count_and(const OccupancyBitmap& a, const OccupancyBitmap& b) {
  std::size_t n = 0;
  for (std::size_t row = 0; row < a.height(); ++row)
    for (std::size_t col = 0; col < a.width(); ++col) n += (a.test(col, row) && b.test(col, row)) ? 1 : 0;
  return n;
}

}  // namespace

ComparisonReport compare(const OccupancyBitmap& a, const OccupancyBitmap& b, std::size_t dilation) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("cannot compare " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                            " bitmap with " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  const std::size_t pop_a = a.population();
  const std::size_t pop_b = b.population();
  ComparisonReport report;
  if (pop_a == 0 && pop_b == 0) return report;

  const std::size_t both = count_and(a, b);
  report.jaccard = static_cast<double>(both) / static_cast<double>(pop_a + pop_b - both);

  const std::size_t near = count_and(a, b.dilate(dilation)) + count_and(b, a.dilate(dilation));
  report.dilated_jaccard = static_cast<double>(near) / static_cast<double>(pop_a + pop_b);

  if (pop_a == 0 || pop_b == 0) {
    report.pixel_hausdorff = std::max(a.width(), a.height());
  } else {
    report.pixel_hausdorff =
        std::max(directed_hausdorff(a, chebyshev_distance(b)), directed_hausdorff(b, chebyshev_distance(a)));
  }
  return report;
}

GrayImage render_image(const Raster& raster, const CycleReport* cycle, std::size_t enlargement) {
  if (enlargement == 0 || enlargement % 2 == 0) throw std::invalid_argument("enlargement must be odd and >= 1");
  GrayImage image(raster.width(), raster.height(), 255);
  const std::uint64_t peak = raster.max_count();
  if (peak > 0) {
    const double scale = std::log1p(static_cast<double>(peak));
    for (std::size_t row = 0; row < raster.height(); ++row) {
      for (std::size_t col = 0; col < raster.width(); ++col) {
        const std::uint64_t c = raster.at(col, row);
        if (c == 0) continue;
        const double shade = std::floor(255.0 * std::log1p(static_cast<double>(c)) / scale);
        image.at(col, row) = static_cast<std::uint8_t>(255 - static_cast<int>(std::clamp(shade, 0.0, 255.0)));
      }
    }
  }
  if (cycle != nullptr) {
    const auto half = static_cast<std::ptrdiff_t>(enlargement / 2);
    const auto w = static_cast<std::ptrdiff_t>(image.width);
    const auto h = static_cast<std::ptrdiff_t>(image.height);
    for (const Point& p : cycle->points) {
      const PixelIndex centre = to_pixel(p, image.width, image.height);
      const auto cc = static_cast<std::ptrdiff_t>(centre.column);
      const auto cr = static_cast<std::ptrdiff_t>(centre.row);
      for (auto r = std::max<std::ptrdiff_t>(0, cr - half); r <= std::min(h - 1, cr + half); ++r)
        for (auto c = std::max<std::ptrdiff_t>(0, cc - half); c <= std::min(w - 1, cc + half); ++c)
          image.at(static_cast<std::size_t>(c), static_cast<std::size_t>(r)) = 0;
    }
  }
  return image;
}

Raster render_raster(const SystemConfig& config, Point initial, const RenderSettings& settings) {
  Raster raster(settings.width, settings.height);
  const Point start = iterate_burn(config, initial, settings.n_burn);
  for_each_orbit_point(config, start, settings.m_collect, [&](Point p) { raster.add(p); });
  return raster;
}

StabilityResult stability_check(const SystemConfig& config, const StabilityOptions& options) {
  if (options.seeds.size() < 2) throw std::invalid_argument("stability check needs at least two trials");

  StabilityResult result;
  for (std::uint64_t seed : options.seeds)
    result.trials.push_back({"seed " + std::to_string(seed), random_initial(seed), options.render.n_burn, 0});
  result.trials.push_back({"seed " + std::to_string(options.seeds.front()) + ", 2N",
                           random_initial(options.seeds.front()), 2 * options.render.n_burn, 0});

  std::vector<std::optional<OccupancyBitmap>> bitmaps(result.trials.size());
  detail::parallel_for(result.trials.size(), options.jobs, [&](std::size_t i) {
    RenderSettings settings = options.render;
    settings.n_burn = result.trials[i].n_burn;
    bitmaps[i] = occupancy(render_raster(config, result.trials[i].initial, settings));
  });
  for (std::size_t i = 0; i < bitmaps.size(); ++i) result.trials[i].population = bitmaps[i]->population();

  bool stable = true;
  for (std::size_t i = 0; i < bitmaps.size(); ++i) {
    for (std::size_t j = i + 1; j < bitmaps.size(); ++j) {
      PairComparison pair{i, j, compare(*bitmaps[i], *bitmaps[j], options.dilation)};
      result.min_dilated_jaccard = std::min(result.min_dilated_jaccard, pair.report.dilated_jaccard);
      stable = stable && pair.report.dilated_jaccard >= options.threshold;
      result.pairs.push_back(pair);
    }
  }
  result.verdict = stable ? Verdict::stable : Verdict::unstable;
  return result;
}

std::string_view to_string(Verdict verdict) { return verdict == Verdict::stable ? "stable" : "unstable"; }

}  // namespace coupled
