#include <coupled/io.hpp>

#include "json_codec.hpp"

#include <json.hpp>
#include <png.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace coupled {

using nlohmann::json;

IoError::IoError(const std::filesystem::path& path, const std::string& cause)
    : std::runtime_error(path.string() + ": " + cause), path_(path) {}

ParseError::ParseError(std::string context, std::string message)
    : std::runtime_error(context.empty() ? message : context + ": " + message),
      context_(std::move(context)),
      message_(std::move(message)) {}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace

ConstraintError::ConstraintError(std::vector<std::string> violations)
    : std::runtime_error("constraint violations: " + join(violations)), violations_(std::move(violations)) {}

void write_file(const std::filesystem::path& destination, std::string_view bytes) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(destination, std::strerror(errno));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError(destination, "write failed");
}

std::string read_file(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw IoError(source, std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// PGM ------------------------------------------------------------------------

std::string encode_pgm(const GrayImage& image) {
  if (image.width == 0 || image.height == 0) throw std::invalid_argument("image dimensions must be >= 1");
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  auto number = [&](const char* what) {
    const auto t = token();
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw ParseError("pgm header", std::string("bad ") + what);
    return static_cast<std::size_t>(std::stoull(std::string(t)));
  };
  if (token() != "P5") throw ParseError("pgm header", "missing P5 magic");
  const std::size_t width = number("width");
  const std::size_t height = number("height");
  if (number("maxval") != 255) throw ParseError("pgm header", "only maxval 255 is supported");
  ++pos;  // single whitespace before raster
  if (width == 0 || height == 0 || bytes.size() < pos || bytes.size() - pos != width * height)
    throw ParseError("pgm raster", "expected " + std::to_string(width * height) + " bytes");
  GrayImage image(width, height);
  std::memcpy(image.pixels.data(), bytes.data() + pos, width * height);
  return image;
}

std::size_t write_pgm(const GrayImage& image, const std::filesystem::path& destination) {
  const std::string bytes = encode_pgm(image);
  write_file(destination, bytes);
  return bytes.size();
}

GrayImage read_pgm(const std::filesystem::path& source) {
  try {
    return decode_pgm(read_file(source));
  } catch (const ParseError& e) {
    throw ParseError(source.string() + ": " + e.context(), e.message());
  }
}

// PNG ------------------------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FileHandle = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* slot = static_cast<std::string*>(png_get_error_ptr(png));
  if (slot) *slot = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

std::size_t write_png(const GrayImage& image, const std::filesystem::path& destination) {
  if (image.width == 0 || image.height == 0) throw std::invalid_argument("image dimensions must be >= 1");
  FileHandle file(std::fopen(destination.c_str(), "wb"));
  if (!file) throw IoError(destination, std::strerror(errno));

  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError(destination, "cannot initialise png encoder");
  }
  std::vector<png_bytep> rows(image.height);
  for (std::size_t r = 0; r < image.height; ++r)
    rows[r] = const_cast<png_bytep>(image.pixels.data() + r * image.width);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(destination, "png encode failed: " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  if (std::fflush(file.get()) != 0) throw IoError(destination, std::strerror(errno));
  const long size = std::ftell(file.get());
  return size < 0 ? 0 : static_cast<std::size_t>(size);
}

GrayImage read_png(const std::filesystem::path& source) {
  FileHandle file(std::fopen(source.c_str(), "rb"));
  if (!file) throw IoError(source, std::strerror(errno));

  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(source, "cannot initialise png decoder");
  }
  GrayImage image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(source.string(), "png decode failed: " + error);
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError(source.string(), "expected 8-bit grayscale png");
  }
  image = GrayImage(png_get_image_width(png, info), png_get_image_height(png, info));
  rows.resize(image.height);
  for (std::size_t r = 0; r < image.height; ++r) rows[r] = image.pixels.data() + r * image.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

// Structured text ------------------------------------------------------------

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw ParseError(std::string(what) + " line " + std::to_string(line), e.what());
  }
}

json point_json(Point p) { return {{"x", p.x}, {"y", p.y}}; }

namespace {

Point read_point(ObjectReader r) {
  Point p{r.real("x"), r.real("y")};
  r.finish();
  return p;
}

LinearPlusCoupler read_coupler(ObjectReader r) {
  LinearPlusCoupler c{r.real("base"), r.real("rate")};
  r.finish();
  return c;
}

}  // namespace

// Run configuration ------------------------------------------------------------

Point RunConfigDocument::initial() const {
  if (const auto* p = std::get_if<Point>(&start)) return *p;
  return random_initial(std::get<std::uint64_t>(start));
}

std::string serialize_config(const RunConfigDocument& doc) { return config_to_json(doc).dump(2) + "\n"; }

json config_to_json(const RunConfigDocument& doc) {
  json j;
  j["scheme"] = to_string(doc.system.scheme);
  j["family_f"] = to_string(doc.system.family_f);
  j["family_g"] = to_string(doc.system.family_g);
  j["coupler_c"] = {{"base", doc.system.coupler_c.base}, {"rate", doc.system.coupler_c.rate}};
  j["coupler_d"] = {{"base", doc.system.coupler_d.base}, {"rate", doc.system.coupler_d.rate}};
  j["n_burn"] = doc.n_burn;
  j["m_collect"] = doc.m_collect;
  if (const auto* p = std::get_if<Point>(&doc.start))
    j["initial"] = point_json(*p);
  else
    j["seed"] = std::get<std::uint64_t>(doc.start);
  j["width"] = doc.width;
  j["height"] = doc.height;
  j["cycle"] = {{"epsilon", doc.cycle.epsilon},
                {"max_period", doc.cycle.max_period},
                {"confirmations", doc.cycle.confirmations}};
  return j;
}

RunConfigDocument config_from_json(const json& j, const RunConfigDocument& defaults) {
  ObjectReader r(j, "");
  RunConfigDocument doc = defaults;

  auto family = [&](const std::string& key, Family& slot) {
    if (!r.has(key)) return;
    const auto name = r.string(key);
    const auto parsed = parse_family(name);
    if (!parsed) throw ParseError(key, "unknown family '" + name + "'");
    slot = *parsed;
  };
  if (r.has("scheme")) {
    const auto name = r.string("scheme");
    const auto parsed = parse_scheme(name);
    if (!parsed) throw ParseError("scheme", "unknown scheme '" + name + "'");
    doc.system.scheme = *parsed;
  }
  family("family_f", doc.system.family_f);
  family("family_g", doc.system.family_g);
  if (r.has("coupler_c")) doc.system.coupler_c = read_coupler(r.object("coupler_c"));
  if (r.has("coupler_d")) doc.system.coupler_d = read_coupler(r.object("coupler_d"));
  if (r.has("n_burn")) doc.n_burn = r.unsigned_integer("n_burn");
  if (r.has("m_collect")) doc.m_collect = r.unsigned_integer("m_collect");
  const bool has_initial = r.has("initial");
  const bool has_seed = r.has("seed");
  if (has_initial && has_seed) throw ParseError("seed", "give either seed or initial, not both");
  if (has_initial) doc.start = read_point(r.object("initial"));
  if (has_seed) doc.start = r.unsigned_integer("seed");
  if (r.has("width")) doc.width = r.unsigned_integer("width");
  if (r.has("height")) doc.height = r.unsigned_integer("height");
  if (r.has("cycle")) {
    auto c = r.object("cycle");
    if (c.has("epsilon")) doc.cycle.epsilon = c.real("epsilon");
    if (c.has("max_period")) doc.cycle.max_period = static_cast<std::uint32_t>(c.unsigned_integer("max_period"));
    if (c.has("confirmations"))
      doc.cycle.confirmations = static_cast<std::uint32_t>(c.unsigned_integer("confirmations"));
    c.finish();
  }
  r.finish();

  if (auto violations = validate_document(doc); !violations.empty()) throw ConstraintError(std::move(violations));
  return doc;
}

std::vector<std::string> validate_document(const RunConfigDocument& doc) {
  auto violations = validate_config(doc.system);
  if (doc.width == 0) violations.emplace_back("width >= 1 failed");
  if (doc.height == 0) violations.emplace_back("height >= 1 failed");
  if (!(doc.cycle.epsilon > 0.0)) violations.emplace_back("cycle.epsilon > 0 failed");
  if (doc.cycle.max_period == 0) violations.emplace_back("cycle.max_period >= 1 failed");
  if (doc.cycle.confirmations == 0) violations.emplace_back("cycle.confirmations >= 1 failed");
  if (const auto* p = std::get_if<Point>(&doc.start)) {
    if (!(p->x >= 0.0 && p->x <= 1.0 && p->y >= 0.0 && p->y <= 1.0))
      violations.emplace_back("initial point must lie in the unit square");
  }
  return violations;
}

RunConfigDocument parse_config(std::string_view text, const RunConfigDocument& defaults) {
  return config_from_json(parse_json(text, "config"), defaults);
}

RunConfigDocument read_config(const std::filesystem::path& source, const RunConfigDocument& defaults) {
  const std::string text = read_file(source);
  try {
    return parse_config(text, defaults);
  } catch (const ParseError& e) {
    throw ParseError(source.string() + ": " + e.context(), e.message());
  }
}

void write_config(const RunConfigDocument& doc, const std::filesystem::path& destination) {
  write_file(destination, serialize_config(doc));
}

// Manifests --------------------------------------------------------------------

json cycle_json(const CycleReport* cycle) {
  if (cycle == nullptr) return nullptr;
  json points = json::array();
  for (const Point& p : cycle->points) points.push_back(json::array({p.x, p.y}));
  return {{"period", cycle->period},
          {"epsilon", cycle->epsilon},
          {"confirmed_loops", cycle->confirmed_loops},
          {"points", points}};
}

json stability_json(const StabilityResult& result) {
  json trials = json::array();
  for (const auto& t : result.trials)
    trials.push_back({{"label", t.label}, {"initial", point_json(t.initial)}, {"n_burn", t.n_burn},
                      {"population", t.population}});
  json pairs = json::array();
  for (const auto& p : result.pairs)
    pairs.push_back({{"first", p.first},
                     {"second", p.second},
                     {"jaccard", p.report.jaccard},
                     {"dilated_jaccard", p.report.dilated_jaccard},
                     {"pixel_hausdorff", p.report.pixel_hausdorff}});
  return {{"verdict", to_string(result.verdict)},
          {"min_dilated_jaccard", result.min_dilated_jaccard},
          {"trials", trials},
          {"pairs", pairs}};
}

namespace {

constexpr std::string_view manifest_format = "coupled-maps/frame-manifest";
constexpr int manifest_version = 1;

json frame_json(const FrameRecord& f) {
  json j;
  j["index"] = f.index;
  j["s"] = f.s;
  j["params"] = {{"b", f.params.b}, {"r", f.params.r}, {"b_prime", f.params.b_prime}, {"r_prime", f.params.r_prime}};
  j["initial"] = point_json(f.initial);
  j["image"] = f.image;
  j["density_image"] = f.density_image ? json(*f.density_image) : json(nullptr);
  j["cycle"] = cycle_json(f.cycle ? &*f.cycle : nullptr);
  j["stability"] = f.stability ? json(to_string(*f.stability)) : json(nullptr);
  j["min_dilated_jaccard"] = f.min_dilated_jaccard ? json(*f.min_dilated_jaccard) : json(nullptr);
  j["error"] = f.error ? json(*f.error) : json(nullptr);
  return j;
}

FrameRecord read_frame(ObjectReader r) {
  FrameRecord f;
  f.index = r.unsigned_integer("index");
  f.s = r.real("s");
  {
    auto p = r.object("params");
    f.params = {p.real("b"), p.real("r"), p.real("b_prime"), p.real("r_prime")};
    p.finish();
  }
  f.initial = read_point(r.object("initial"));
  f.image = r.string("image");
  if (!r.is_null("density_image")) f.density_image = r.string("density_image");
  if (!r.is_null("cycle")) {
    auto c = r.object("cycle");
    CycleReport report;
    report.period = static_cast<std::uint32_t>(c.unsigned_integer("period"));
    report.epsilon = c.real("epsilon");
    report.confirmed_loops = static_cast<std::uint32_t>(c.unsigned_integer("confirmed_loops"));
    const json& points = c.raw("points");
    if (!points.is_array()) throw ParseError(c.field("points"), "expected an array");
    for (const json& p : points) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ParseError(c.field("points"), "expected [x, y] pairs");
      report.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (report.points.size() != report.period) throw ParseError(c.field("points"), "length differs from period");
    c.finish();
    f.cycle = std::move(report);
  }
  if (!r.is_null("stability")) {
    const auto v = r.string("stability");
    if (v == "stable")
      f.stability = Verdict::stable;
    else if (v == "unstable")
      f.stability = Verdict::unstable;
    else
      throw ParseError(r.field("stability"), "expected 'stable' or 'unstable'");
  }
  if (!r.is_null("min_dilated_jaccard")) f.min_dilated_jaccard = r.real("min_dilated_jaccard");
  if (!r.is_null("error")) f.error = r.string("error");
  r.finish();
  return f;
}

}  // namespace

std::string serialize_manifest(const FrameManifest& manifest) {
  json frames = json::array();
  for (const auto& f : manifest.frames) frames.push_back(frame_json(f));
  json j{{"format", manifest_format}, {"version", manifest_version}, {"frames", frames}};
  return j.dump(2) + "\n";
}

FrameManifest parse_manifest(std::string_view text) {
  const json j = parse_json(text, "manifest");
  ObjectReader r(j, "");
  if (r.string("format") != manifest_format) throw ParseError("format", "not a frame manifest");
  if (r.unsigned_integer("version") != manifest_version) throw ParseError("version", "unsupported version");
  const json& frames = r.raw("frames");
  if (!frames.is_array()) throw ParseError("frames", "expected an array");
  r.finish();

  FrameManifest manifest;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string where = "frames[" + std::to_string(i) + "]";
    FrameRecord f = read_frame(ObjectReader(frames[i], where));
    if (f.index != i) throw ParseError(where, "index " + std::to_string(f.index) + " breaks the contiguous sequence");
    if (i > 0 && !(f.s > manifest.frames.back().s)) throw ParseError(where, "s values must increase strictly");
    manifest.frames.push_back(std::move(f));
  }
  return manifest;
}

void write_manifest(const FrameManifest& manifest, const std::filesystem::path& destination) {
  write_file(destination, serialize_manifest(manifest));
}

FrameManifest read_manifest(const std::filesystem::path& source) {
  const std::string text = read_file(source);
  try {
    return parse_manifest(text);
  } catch (const ParseError& e) {
    throw ParseError(source.string() + ": " + e.context(), e.message());
  }
}

}  // namespace coupled
