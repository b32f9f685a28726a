#include <coupled/run.hpp>

#include <algorithm>

namespace coupled {

RenderOutcome render_document(const RunConfigDocument& doc, std::size_t enlargement, const BurnProgress& progress) {
  const SystemConfig& config = doc.system;
  Point z = doc.initial();

  const std::uint64_t chunk = std::max<std::uint64_t>(1, doc.n_burn / 10);
  for (std::uint64_t done = 0; done < doc.n_burn;) {
    const std::uint64_t n = std::min(chunk, doc.n_burn - done);
    z = iterate_burn(config, z, n);
    done += n;
    if (progress) progress(done, doc.n_burn);
  }

  RenderOutcome out{Raster(doc.width, doc.height), detect_cycle(config, z, 0, doc.cycle), {}};
  for_each_orbit_point(config, z, doc.m_collect, [&](Point p) { out.raster.add(p); });
  out.image = render_image(out.raster, out.cycle ? &*out.cycle : nullptr, enlargement);
  return out;
}

}  // namespace coupled
