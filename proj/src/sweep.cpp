#include <coupled/sweep.hpp>

#include <coupled/io.hpp>

#include "parallel.hpp"

#include <cmath>
#include <cstdio>

namespace coupled {

std::vector<std::string> validate_params(const ParamVector& p) {
  auto out = validate_coupler({p.b, p.r}, "b, r");
  for (auto& v : validate_coupler({p.b_prime, p.r_prime}, "b', r'")) out.push_back(std::move(v));
  return out;
}

namespace {

void require_valid(const ParamVector& p, std::string_view what) {
  const auto violations = validate_params(p);
  if (violations.empty()) return;
  std::string message(what);
  for (const auto& v : violations) message += "; " + v;
  throw InvalidCurve(message);
}

// Interpolation can overshoot base + rate <= 1 by a rounding error.
void absorb_rounding(double& base, double& rate) {
  if (base + rate > 1.0 && base + rate <= 1.0 + 1e-12) rate = 1.0 - base;
}

}  // namespace

ParameterCurve ParameterCurve::segment(const ParamVector& from, const ParamVector& to) {
  require_valid(from, "segment start");
  require_valid(to, "segment end");
  return {Kind::segment, from, to};
}

ParameterCurve ParameterCurve::canonical(double b_prime, double r_prime) {
  ParamVector fixed{0.0, 1.0, b_prime, r_prime};
  require_valid(fixed, "canonical curve");
  return {Kind::canonical, fixed, fixed};
}

ParamVector ParameterCurve::at(double s) const {
  ParamVector p;
  if (kind_ == Kind::canonical) {
    p = {s, 1.0 - s, to_.b_prime, to_.r_prime};
  } else {
    auto lerp = [s](double a, double b) { return a + s * (b - a); };
    p = {lerp(from_.b, to_.b), lerp(from_.r, to_.r), lerp(from_.b_prime, to_.b_prime),
         lerp(from_.r_prime, to_.r_prime)};
    absorb_rounding(p.b, p.r);
    absorb_rounding(p.b_prime, p.r_prime);
  }
  require_valid(p, "curve sample at s=" + std::to_string(s));
  return p;
}

std::vector<CurveSample> sample_curve(const ParameterCurve& curve, std::size_t grid_count) {
  if (grid_count < 2) throw InvalidCurve("grid_count must be >= 2");
  std::vector<CurveSample> out;
  out.reserve(grid_count);
  const auto last = static_cast<double>(grid_count - 1);
  for (std::size_t i = 0; i < grid_count; ++i) {
    const double s = static_cast<double>(i) / last;
    out.push_back({s, curve.at(s)});
  }
  return out;
}

SystemConfig make_config(const ParamVector& p, Scheme scheme, Family family_f, Family family_g) {
  return {scheme, family_f, family_g, {p.b, p.r}, {p.b_prime, p.r_prime}};
}

bool FrameManifest::ok() const {
  for (const auto& f : frames)
    if (f.error) return false;
  return true;
}

std::string frame_stem(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu", index);
  return buf;
}

std::string frame_filename(std::size_t index, std::string_view extension) {
  return frame_stem(index) + "." + std::string(extension);
}

namespace {

void render_frame(const SweepSpec& spec, const std::filesystem::path& out_dir, FrameRecord& record) {
  const SystemConfig config = make_config(record.params, spec.scheme, spec.family_f, spec.family_g);
  const Point start = iterate_burn(config, record.initial, spec.render.n_burn);
  record.cycle = detect_cycle(config, start, 0, spec.cycle);

  Raster raster(spec.render.width, spec.render.height);
  for_each_orbit_point(config, start, spec.render.m_collect, [&](Point p) { raster.add(p); });

  const GrayImage density = render_image(raster, nullptr, spec.enlargement);
  auto emit = [&](const GrayImage& image, const std::string& stem) {
    write_pgm(image, out_dir / (stem + ".pgm"));
    if (spec.write_png) write_png(image, out_dir / (stem + ".png"));
  };

  const std::string stem = frame_stem(record.index);
  record.image = stem + ".pgm";
  if (record.cycle) {
    emit(render_image(raster, &*record.cycle, spec.enlargement), stem);
    emit(density, stem + "_density");
    record.density_image = stem + "_density.pgm";
  } else {
    emit(density, stem);
  }

  if (spec.check_stability) {
    StabilityOptions options = spec.stability;
    options.render = spec.render;
    options.jobs = 1;
    const auto result = stability_check(config, options);
    record.stability = result.verdict;
    record.min_dilated_jaccard = result.min_dilated_jaccard;
  }
}

}  // namespace

FrameManifest run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir) {
  const auto samples = sample_curve(spec.curve, spec.grid_count);
  FrameManifest manifest;
  manifest.frames.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& f = manifest.frames[i];
    f.index = i;
    f.s = samples[i].s;
    f.params = samples[i].params;
    f.initial = frame_initial(spec.seed, i);
    f.image = frame_filename(i);
  }

  detail::parallel_for(manifest.frames.size(), spec.jobs, [&](std::size_t i) {
    auto& record = manifest.frames[i];
    try {
      render_frame(spec, out_dir, record);
    } catch (const std::exception& e) {
      record.error = e.what();
    }
  });
  return manifest;
}

}  // namespace coupled
