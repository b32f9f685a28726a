#include <coupled/cli.hpp>

#include <coupled/io.hpp>
#include <coupled/run.hpp>
#include <coupled/serve.hpp>
#include <coupled/sweep.hpp>

#include "json_codec.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace coupled::cli {

namespace {

namespace fs = std::filesystem;

/// Flags shared by every command that builds a system and an orbit.
struct SystemFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> scheme;
  std::optional<std::string> fx;
  std::optional<std::string> gy;
  std::optional<double> b, r, bp, rp;
  std::optional<std::uint64_t> burn, plot, seed;
  std::optional<double> x0, y0;
  std::optional<std::size_t> width, height;
  std::optional<double> eps;
  std::optional<std::uint32_t> max_period, confirmations;
};

void add_system_flags(CLI::App& app, SystemFlags& f, bool with_initial) {
  app.add_option("--config", f.config_path, "Run configuration file (flags override it)");
  app.add_option("--scheme", f.scheme, "simultaneous | sequential [simultaneous]")
      ->check(CLI::IsMember({"simultaneous", "sequential"}));
  app.add_option("--fx", f.fx, "family for x: logistic | tent [logistic]")->check(CLI::IsMember({"logistic", "tent"}));
  app.add_option("--gy", f.gy, "family for y: logistic | tent [logistic]")->check(CLI::IsMember({"logistic", "tent"}));
  app.add_option("--b", f.b, "base of the x coupler [0.4]");
  app.add_option("--r", f.r, "rate of the x coupler [0.6]");
  app.add_option("--bp", f.bp, "base of the y coupler [0.4]");
  app.add_option("--rp", f.rp, "rate of the y coupler [0.6]");
  app.add_option("--burn", f.burn, "burn-in steps N [1000000]");
  app.add_option("--plot", f.plot, "plotted steps M [100000]");
  app.add_option("--seed", f.seed, "seed for a random typical initial point");
  if (with_initial) {
    auto* x0 = app.add_option("--x0", f.x0, "initial x [0.7]");
    auto* y0 = app.add_option("--y0", f.y0, "initial y [0.6]");
    x0->excludes("--seed");
    y0->excludes("--seed");
  }
  app.add_option("--width", f.width, "raster width in pixels");
  app.add_option("--height", f.height, "raster height in pixels");
  app.add_option("--eps", f.eps, "cycle detection tolerance [1e-9]");
  app.add_option("--max-period", f.max_period, "longest cycle searched for [4096]");
  app.add_option("--confirmations", f.confirmations, "extra loops confirming a cycle [3]");
}

RunConfigDocument resolve(const SystemFlags& f, RunConfigDocument doc) {
  if (f.config_path) doc = read_config(*f.config_path, doc);
  if (f.scheme) doc.system.scheme = *parse_scheme(*f.scheme);
  if (f.fx) doc.system.family_f = *parse_family(*f.fx);
  if (f.gy) doc.system.family_g = *parse_family(*f.gy);
  if (f.b) doc.system.coupler_c.base = *f.b;
  if (f.r) doc.system.coupler_c.rate = *f.r;
  if (f.bp) doc.system.coupler_d.base = *f.bp;
  if (f.rp) doc.system.coupler_d.rate = *f.rp;
  if (f.burn) doc.n_burn = *f.burn;
  if (f.plot) doc.m_collect = *f.plot;
  if (f.seed) doc.start = *f.seed;
  if (f.x0 || f.y0) {
    Point p = std::holds_alternative<Point>(doc.start) ? std::get<Point>(doc.start) : Point{0.7, 0.6};
    if (f.x0) p.x = *f.x0;
    if (f.y0) p.y = *f.y0;
    doc.start = p;
  }
  if (f.width) doc.width = *f.width;
  if (f.height) doc.height = *f.height;
  if (f.eps) doc.cycle.epsilon = *f.eps;
  if (f.max_period) doc.cycle.max_period = *f.max_period;
  if (f.confirmations) doc.cycle.confirmations = *f.confirmations;
  if (auto violations = validate_document(doc); !violations.empty()) throw ConstraintError(std::move(violations));
  return doc;
}

RunConfigDocument with_size(std::size_t side) {
  RunConfigDocument doc;
  doc.width = side;
  doc.height = side;
  return doc;
}

void print_resolved(std::ostream& out, const json& resolved) { out << "resolved " << resolved.dump() << "\n"; }

fs::path run_record_path(const fs::path& image) {
  fs::path record = image;
  record.replace_extension(".run.json");
  return record;
}

int cmd_render(const SystemFlags& flags, const std::string& out_path, std::size_t enlargement, std::ostream& out,
               std::ostream& err) {
  const RunConfigDocument doc = resolve(flags, with_size(800));
  print_resolved(out, config_to_json(doc));
  const RenderOutcome result = render_document(doc, enlargement, [&](std::uint64_t done, std::uint64_t total) {
    err << "burn-in " << (done * 100 / total) << "% (" << done << "/" << total << ")\n";
  });

  const fs::path path = out_path;
  if (path.extension() == ".png")
    write_png(result.image, path);
  else
    write_pgm(result.image, path);

  json record = config_to_json(doc);
  record["image"] = path.filename().string();
  record["enlargement"] = enlargement;
  record["total_count"] = result.raster.total();
  record["cycle"] = cycle_json(result.cycle ? &*result.cycle : nullptr);
  write_file(run_record_path(path), record.dump(2) + "\n");

  out << "wrote " << path.string();
  if (result.cycle) out << " (period " << result.cycle->period << " cycle)";
  out << "\n";
  return success;
}

struct SweepFlags {
  std::string out_dir;
  std::string curve = "canonical";
  std::vector<double> from, to;
  std::size_t grid = 21;
  unsigned jobs = 0;
  std::size_t enlargement = default_enlargement;
  bool png = false;
  bool check_stability = false;
  std::size_t trials = 5;
  double threshold = 0.95;
  std::size_t dilation = 1;
};

int cmd_sweep(const SystemFlags& flags, const SweepFlags& sf, std::ostream& out, std::ostream& err) {
  RunConfigDocument defaults = with_size(400);
  defaults.start = std::uint64_t{1};
  const RunConfigDocument doc = resolve(flags, defaults);
  if (!std::holds_alternative<std::uint64_t>(doc.start)) {
    err << "sweep frames draw their initial points from --seed; an explicit initial point is not supported\n";
    return usage;
  }

  SweepSpec spec;
  if (sf.curve == "segment") {
    if (sf.from.size() != 4 || sf.to.size() != 4) {
      err << "--curve segment needs --from and --to, each as b,r,bp,rp\n";
      return usage;
    }
    spec.curve = ParameterCurve::segment({sf.from[0], sf.from[1], sf.from[2], sf.from[3]},
                                         {sf.to[0], sf.to[1], sf.to[2], sf.to[3]});
  } else {
    spec.curve = ParameterCurve::canonical(doc.system.coupler_d.base, doc.system.coupler_d.rate);
  }
  spec.grid_count = sf.grid;
  spec.scheme = doc.system.scheme;
  spec.family_f = doc.system.family_f;
  spec.family_g = doc.system.family_g;
  spec.render = doc.render_settings();
  spec.seed = std::get<std::uint64_t>(doc.start);
  spec.cycle = doc.cycle;
  spec.enlargement = sf.enlargement;
  spec.write_png = sf.png;
  spec.jobs = sf.jobs;
  spec.check_stability = sf.check_stability;
  spec.stability.seeds.clear();
  for (std::size_t i = 0; i < sf.trials; ++i) spec.stability.seeds.push_back(spec.seed + i);
  spec.stability.threshold = sf.threshold;
  spec.stability.dilation = sf.dilation;
  const auto samples = sample_curve(spec.curve, spec.grid_count);  // validates before touching the disk

  json resolved = config_to_json(doc);
  resolved.erase("coupler_c");
  resolved["curve"] = sf.curve;
  if (sf.curve == "segment") {
    resolved["from"] = sf.from;
    resolved["to"] = sf.to;
  }
  resolved["grid"] = sf.grid;
  resolved["jobs"] = sf.jobs;
  resolved["enlargement"] = sf.enlargement;
  resolved["check_stability"] = sf.check_stability;
  print_resolved(out, resolved);

  const fs::path dir = sf.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    err << dir.string() << ": cannot create output directory" << (ec ? ": " + ec.message() : std::string{}) << "\n";
    return failure;
  }
  try {
    write_file(dir / ".write-probe", "");
    fs::remove(dir / ".write-probe");
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return failure;
  }

  err << "rendering " << samples.size() << " frames\n";
  const FrameManifest manifest = run_sweep(spec, dir);
  write_manifest(manifest, dir / "manifest.json");

  std::size_t cycles = 0;
  std::size_t failed = 0;
  for (const auto& f : manifest.frames) {
    cycles += f.cycle ? 1 : 0;
    if (f.error) {
      ++failed;
      err << "frame " << f.index << ": " << *f.error << "\n";
    }
  }
  out << "wrote " << manifest.frames.size() << " frames (" << cycles << " periodic, " << failed << " failed) to "
      << dir.string() << "\n";
  return failed == 0 ? success : failure;
}

int cmd_cycle(const SystemFlags& flags, std::ostream& out) {
  const RunConfigDocument doc = resolve(flags, with_size(400));
  const auto report = detect_cycle(doc.system, doc.initial(), doc.n_burn, doc.cycle);
  json j{{"command", "cycle"},
         {"found", report.has_value()},
         {"cycle", cycle_json(report ? &*report : nullptr)},
         {"resolved", config_to_json(doc)}};
  out << j.dump(2) << "\n";
  return success;
}

struct StabilityFlags {
  std::size_t trials = 5;
  double threshold = 0.95;
  std::size_t dilation = 1;
  unsigned jobs = 0;
};

int cmd_stability(const SystemFlags& flags, const StabilityFlags& sf, std::ostream& out, std::ostream& err) {
  RunConfigDocument defaults = with_size(400);
  defaults.start = std::uint64_t{1};
  const RunConfigDocument doc = resolve(flags, defaults);
  if (sf.trials < 2) {
    err << "--trials must be at least 2\n";
    return usage;
  }
  const std::uint64_t first = std::holds_alternative<std::uint64_t>(doc.start) ? std::get<std::uint64_t>(doc.start) : 1;

  StabilityOptions options;
  options.render = doc.render_settings();
  options.seeds.clear();
  for (std::size_t i = 0; i < sf.trials; ++i) options.seeds.push_back(first + i);
  options.dilation = sf.dilation;
  options.threshold = sf.threshold;
  options.jobs = sf.jobs;

  json j = stability_json(stability_check(doc.system, options));
  j["command"] = "stability";
  j["threshold"] = sf.threshold;
  j["dilation"] = sf.dilation;
  j["resolved"] = config_to_json(doc);
  out << j.dump(2) << "\n";
  return success;
}

int cmd_serve(std::optional<std::uint16_t> port, bool stdio, std::ostream& err) {
  serve::Engine engine;
  if (stdio) {
    serve::serve_stream(engine, std::cin, std::cout);
    return success;
  }
  serve::TcpServer server(engine, *port);
  err << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.run();
  return success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled one-dimensional maps on the unit square: render limit sets, sweep parameters, "
               "detect cycles, check stability, serve the explorer protocol"};
  app.name(args.empty() ? "coupled-maps" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  SystemFlags render_flags, sweep_flags, cycle_flags, stability_flags;

  auto* render = app.add_subcommand("render", "Render one limit-set image");
  add_system_flags(*render, render_flags, true);
  std::string render_out;
  std::size_t render_enlarge = default_enlargement;
  render->add_option("--out", render_out, "output image (.pgm, or .png)")->required();
  render->add_option("--enlarge", render_enlarge, "side of the square drawn at each cycle point, odd [5]");

  auto* sweep = app.add_subcommand("sweep", "Render limit-set frames along a parameter curve");
  add_system_flags(*sweep, sweep_flags, false);
  SweepFlags sf;
  sweep->add_option("--out", sf.out_dir, "output directory")->required();
  sweep->add_option("--curve", sf.curve, "canonical (s -> (s, 1-s, bp, rp)) | segment [canonical]")
      ->check(CLI::IsMember({"canonical", "segment"}));
  sweep->add_option("--from", sf.from, "segment start b,r,bp,rp")->delimiter(',')->expected(4);
  sweep->add_option("--to", sf.to, "segment end b,r,bp,rp")->delimiter(',')->expected(4);
  sweep->add_option("--grid", sf.grid, "number of samples along the curve [21]")->check(CLI::Range(2ul, 1000000ul));
  sweep->add_option("--jobs", sf.jobs, "parallel frame workers, 0 = all cores [0]");
  sweep->add_option("--enlarge", sf.enlargement, "cycle point size [5]");
  sweep->add_flag("--png", sf.png, "also write PNG frames");
  sweep->add_flag("--check-stability", sf.check_stability, "run the stability check on every frame");
  sweep->add_option("--trials", sf.trials, "stability trials per frame [5]");
  sweep->add_option("--threshold", sf.threshold, "stability dilated-jaccard threshold [0.95]");
  sweep->add_option("--dilation", sf.dilation, "stability dilation radius [1]");

  auto* cycle = app.add_subcommand("cycle", "Detect a finite periodic cycle");
  add_system_flags(*cycle, cycle_flags, true);

  auto* stability = app.add_subcommand("stability", "Check that the limit-set image is independent of the start");
  add_system_flags(*stability, stability_flags, false);
  StabilityFlags stf;
  stability->add_option("--trials", stf.trials, "random initial points [5]");
  stability->add_option("--threshold", stf.threshold, "dilated-jaccard threshold [0.95]");
  stability->add_option("--dilation", stf.dilation, "dilation radius in pixels [1]");
  stability->add_option("--jobs", stf.jobs, "parallel trials, 0 = all cores [0]");

  auto* serve_cmd = app.add_subcommand("serve", "Serve the explorer request/response protocol");
  std::optional<std::uint16_t> port;
  bool stdio = false;
  auto* port_opt = serve_cmd->add_option("--port", port, "TCP port on 127.0.0.1");
  auto* stdio_opt = serve_cmd->add_flag("--stdio", stdio, "use standard input/output");
  port_opt->excludes(stdio_opt);
  serve_cmd->require_option(1);

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return success;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return usage;
  }

  if (render_enlarge % 2 == 0 || sf.enlargement % 2 == 0) {
    err << "--enlarge must be odd\n";
    return usage;
  }

  try {
    if (*render) return cmd_render(render_flags, render_out, render_enlarge, out, err);
    if (*sweep) return cmd_sweep(sweep_flags, sf, out, err);
    if (*cycle) return cmd_cycle(cycle_flags, out);
    if (*stability) return cmd_stability(stability_flags, stf, out, err);
    if (*serve_cmd) return cmd_serve(port, stdio, err);
  } catch (const ConstraintError& e) {
    err << "invalid configuration:\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return usage;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return usage;
  } catch (const InvalidCurve& e) {
    err << "invalid curve: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return failure;
  }
  return usage;
}

}  // namespace coupled::cli
