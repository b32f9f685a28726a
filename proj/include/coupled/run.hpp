#pragma once

#include <coupled/io.hpp>
#include <coupled/orbit.hpp>
#include <coupled/raster.hpp>

#include <cstdint>
#include <functional>
#include <optional>

namespace coupled {

struct RenderOutcome {
  Raster raster;
  std::optional<CycleReport> cycle;
  GrayImage image;
};

/// Called with (done, total) burn-in steps once per tenth of the burn-in.
using BurnProgress = std::function<void(std::uint64_t, std::uint64_t)>;

/// Burns in, detects a cycle at the burned-in point, collects the orbit and
/// renders it (cycle points enlarged when a cycle is found). The CLI render
/// command and the serve protocol both go through here.
RenderOutcome render_document(const RunConfigDocument& doc, std::size_t enlargement = default_enlargement,
                              const BurnProgress& progress = {});

}  // namespace coupled
