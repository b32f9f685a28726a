// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <coupled/cli.hpp>
#include <coupled/io.hpp>
#include <coupled/maps.hpp>
#include <coupled/orbit.hpp>
#include <coupled/raster.hpp>
#include <coupled/run.hpp>
#include <coupled/serve.hpp>
#include <coupled/sweep.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#ifndef COUPLED_MAPS_BIN
#error "COUPLED_MAPS_BIN must name the CLI executable"
#endif

using namespace coupled;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LinearPlusCoupler random_coupler(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double base = u(rng);
  return {base, u(rng) * (1.0 - base)};
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// Criteria -------------------------------------------------------------------

Outcome closure_suite() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Family families[] = {Family::logistic, Family::tent};
  const Scheme schemes[] = {Scheme::simultaneous, Scheme::sequential};
  constexpr std::size_t total = 1'000'000;

  const auto start = Clock::now();
  std::size_t escapes = 0;
  std::size_t evaluated = 0;
  for (std::size_t i = 0; i < total; ++i) {
    // Cycle through the 2 schemes x 4 family pairs.
    const SystemConfig config{schemes[i % 2], families[(i / 2) % 2], families[(i / 4) % 2], random_coupler(rng),
                              random_coupler(rng)};
    const Point z = step(config, {u(rng), u(rng)});
    escapes += (z.x >= 0.0 && z.x <= 1.0 && z.y >= 0.0 && z.y <= 1.0) ? 0 : 1;
    ++evaluated;
  }
  const double elapsed = seconds_since(start);
  return {escapes == 0 && evaluated == total && elapsed < 10.0,
          std::to_string(evaluated) + " steps, " + std::to_string(escapes) + " escapes, " + fmt(elapsed) + " s (< 10 s)"};
}

Outcome decoupling_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatched = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    SystemConfig config{trial % 2 ? Scheme::sequential : Scheme::simultaneous,
                        (trial / 2) % 2 ? Family::tent : Family::logistic,
                        (trial / 4) % 2 ? Family::tent : Family::logistic, random_coupler(rng), random_coupler(rng)};
    config.coupler_c.rate = 0.0;
    const double p = config.coupler_c.base;
    Point z{u(rng), u(rng)};
    const auto expected = config.family_f == Family::logistic ? oracle::orbit_1d(oracle::logistic, p, z.x, 10'000)
                                                               : oracle::orbit_1d(oracle::tent, p, z.x, 10'000);
    bool exact = true;
    for (double x : expected) {
      z = step(config, z);
      exact = exact && z.x == x;
      worst = std::max(worst, std::abs(z.x - x));
    }
    mismatched += exact ? 0 : 1;
  }
  return {mismatched == 0, "100 configs x 10^4 steps, " + std::to_string(mismatched) +
                               " orbits differing from the 1-D oracle (max |dx| = " + fmt(worst) + ", 0 ulp required)"};
}

Outcome scheme_agreement() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SystemConfig h{Scheme::simultaneous, trial % 2 ? Family::tent : Family::logistic,
                   (trial / 2) % 2 ? Family::tent : Family::logistic, random_coupler(rng), random_coupler(rng)};
    h.coupler_d.rate = 0.0;
    SystemConfig h_prime = h;
    h_prime.scheme = Scheme::sequential;
    Point a{u(rng), u(rng)};
    Point b = a;
    bool same = true;
    for (int i = 0; i < 10'000 && same; ++i) {
      a = step(h, a);
      b = step(h_prime, b);
      same = a.x == b.x && a.y == b.y;
    }
    mismatched += same ? 0 : 1;
  }
  return {mismatched == 0, "100 configs x 10^4 steps, " + std::to_string(mismatched) + " bitwise disagreements"};
}

Outcome fixed_point_detection() {
  struct Case {
    double b;
    Point expected;
  };
  bool pass = true;
  std::string detail;
  for (const Case c : {Case{0.1, {0.0, 0.0}}, Case{0.2, {0.0, 0.0}}, Case{0.5, {0.5, 0.5}}}) {
    const SystemConfig config{Scheme::simultaneous, Family::logistic, Family::logistic, {c.b, 0.0}, {c.b, 0.0}};
    const auto start = Clock::now();
    const auto report = detect_cycle(config, {0.7, 0.6}, 10'000, {1e-9, 4096, 3});
    const double elapsed = seconds_since(start);
    const bool ok = report && report->period == 1 &&
                    std::max(std::abs(report->points[0].x - c.expected.x), std::abs(report->points[0].y - c.expected.y)) <
                        1e-6 &&
                    elapsed < 1.0;
    pass = pass && ok;
    detail += "b=" + fmt(c.b) + ": " + (report ? "period " + std::to_string(report->period) : std::string("none")) +
              " in " + fmt(elapsed) + " s; ";
  }
  return {pass, detail + "(period 1 within 1e-6, < 1 s each)"};
}

Outcome headline_run() {
  RunConfigDocument doc;  // simultaneous logistic/logistic, 0.4/0.6 twice, N=10^6, M=10^5, start (0.7, 0.6)
  doc.width = 400;
  doc.height = 400;
  const bool paper_parameters = doc.n_burn == 1'000'000 && doc.m_collect == 100'000 && doc.initial() == Point{0.7, 0.6} &&
                                doc.system.coupler_c == LinearPlusCoupler{0.4, 0.6} &&
                                doc.system.coupler_d == LinearPlusCoupler{0.4, 0.6};

  const auto start = Clock::now();
  const auto rendered = render_document(doc);
  const double render_seconds = seconds_since(start);

  StabilityOptions options;
  options.render = doc.render_settings();
  options.seeds = {1, 2, 3, 4, 5};
  options.dilation = 1;
  options.threshold = 0.95;
  const auto stability = stability_check(doc.system, options);

  const bool pass = paper_parameters && render_seconds < 30.0 && rendered.raster.total() == 100'000 &&
                    stability.trials.size() == 6 && stability.trials.back().n_burn == 2'000'000 &&
                    stability.verdict == Verdict::stable;
  return {pass, "render " + fmt(render_seconds) + " s (< 30 s), " + std::to_string(occupancy(rendered.raster).population()) +
                    " pixels; stability over 5 seeds + 2N: " + std::string(to_string(stability.verdict)) +
                    ", min dilated jaccard " + fmt(stability.min_dilated_jaccard) + " (>= 0.95)"};
}

Outcome sweep_reproduction(const TempDir& scratch) {
  const std::vector<std::string> common = {"coupled-maps", "sweep", "--bp", "0.4", "--rp", "0.6", "--grid", "21"};
  std::ostringstream sink;
  auto sweep_into = [&](const std::string& name) {
    auto args = common;
    args.push_back("--out");
    args.push_back((scratch / name).string());
    return cli::run(args, sink, sink);
  };
  if (sweep_into("sweep_a") != 0 || sweep_into("sweep_b") != 0) return {false, "sweep command failed: " + sink.str()};

  const auto manifest = read_manifest(scratch / "sweep_a" / "manifest.json");
  const double captions[] = {0.00, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50,
                             0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00};
  bool values = manifest.frames.size() == 21;
  for (std::size_t i = 0; values && i < 21; ++i) {
    const auto& f = manifest.frames[i];
    values = f.s == captions[i] && f.params.b == captions[i] && f.params.r == 1.0 - captions[i] &&
             f.params.b_prime == 0.4 && f.params.r_prime == 0.6;
  }

  bool identical = read_file(scratch / "sweep_a" / "manifest.json") == read_file(scratch / "sweep_b" / "manifest.json");
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(scratch / "sweep_a")) {
    const auto twin = scratch / "sweep_b" / entry.path().filename();
    identical = identical && std::filesystem::exists(twin) && read_file(entry.path()) == read_file(twin);
    ++files;
  }
  std::size_t cycles = 0;
  for (const auto& f : manifest.frames) cycles += f.cycle ? 1 : 0;
  return {values && identical,
          std::to_string(manifest.frames.size()) + " frames, s = 0.00..1.00 in steps of 0.05 " +
              (values ? "exact" : "MISMATCH") + ", " + std::to_string(cycles) + " periodic; rerun " +
              (identical ? "byte-identical" : "DIFFERS") + " over " + std::to_string(files) + " files"};
}

Outcome determinism(const TempDir& scratch) {
  const std::string bin = COUPLED_MAPS_BIN;
  auto render = [&](const std::string& name) {
    const std::string cmd = "\"" + bin + "\" render --width 400 --height 400 --out \"" + (scratch / name).string() +
                            "\" > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (render("det_a.pgm") != 0 || render("det_b.pgm") != 0) return {false, "render command failed"};
  const bool same_pgm = read_file(scratch / "det_a.pgm") == read_file(scratch / "det_b.pgm");

  const nlohmann::json request = {
      {"op", "render"}, {"config", {{"width", 400}, {"height", 400}}}};
  const std::string frame = serve::frame({request.dump(), {}});
  write_file(scratch / "requests.bin", frame + frame);
  auto serve = [&](const std::string& name) {
    const std::string cmd = "\"" + bin + "\" serve --stdio < \"" + (scratch / "requests.bin").string() + "\" > \"" +
                            (scratch / name).string() + "\" 2>/dev/null";
    return std::system(cmd.c_str());
  };
  if (serve("resp_a.bin") != 0 || serve("resp_b.bin") != 0) return {false, "serve command failed"};
  const std::string resp_a = read_file(scratch / "resp_a.bin");
  const bool same_runs = resp_a == read_file(scratch / "resp_b.bin");
  const bool same_within = resp_a.size() % 2 == 0 && resp_a.substr(0, resp_a.size() / 2) == resp_a.substr(resp_a.size() / 2);

  // Serve pixels equal the render command's PGM pixels.
  std::istringstream in(resp_a);
  serve::StreamReader reader(in);
  const auto first = serve::read_message(reader);
  const auto pgm = read_pgm(scratch / "det_a.pgm");
  const bool same_pixels = first && first->payload == std::string(pgm.pixels.begin(), pgm.pixels.end());

  return {same_pgm && same_runs && same_within && same_pixels,
          std::string("render PGMs ") + (same_pgm ? "identical" : "DIFFER") + "; serve responses " +
              (same_runs && same_within ? "identical" : "DIFFER") + "; serve pixels " +
              (same_pixels ? "equal" : "DIFFER from") + " render pixels"};
}

Outcome raster_conservation() {
  std::vector<std::pair<SystemConfig, RenderSettings>> runs;
  runs.push_back({SystemConfig{}, {1'000'000, 100'000, 400, 400}});
  for (const auto scheme : {Scheme::simultaneous, Scheme::sequential})
    for (const auto& sample : sample_curve(ParameterCurve::canonical(0.4, 0.6), 21))
      runs.push_back({make_config(sample.params, scheme, Family::logistic, Family::logistic), {100'000, 100'000, 400, 400}});

  std::size_t bad_sum = 0;
  std::size_t bad_self = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& [config, settings] = runs[i];
    const Raster raster = render_raster(config, random_initial(i + 1), settings);
    std::uint64_t sum = 0;
    for (auto c : raster.counts()) sum += c;
    bad_sum += (sum == settings.m_collect && raster.total() == settings.m_collect) ? 0 : 1;
    const auto bits = occupancy(raster);
    bad_self += compare(bits, bits, 1) == ComparisonReport{1.0, 1.0, 0} ? 0 : 1;
  }
  return {bad_sum == 0 && bad_self == 0, std::to_string(runs.size()) + " renders, " + std::to_string(bad_sum) +
                                             " with counts != M, " + std::to_string(bad_self) +
                                             " with compare(a,a) != (1, 1, 0)"};
}

}  // namespace

int main() {
  TempDir scratch("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closure suite", closure_suite},
      {"decoupling oracle", decoupling_oracle},
      {"scheme agreement", scheme_agreement},
      {"fixed-point detection", fixed_point_detection},
      {"headline run", headline_run},
      {"sweep reproduction", [&] { return sweep_reproduction(scratch); }},
      {"determinism", [&] { return determinism(scratch); }},
      {"raster conservation", raster_conservation},
  };

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
