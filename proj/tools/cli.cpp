// Copyright 2026 The ESI Reconstruction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <utility>

#include "CLI11.hpp"
#include "config.hpp"
#include "esi/bench.hpp"
#include "esi/evio.hpp"
#include "esi/metrics.hpp"
#include "esi/pipeline.hpp"

namespace esi::cli
{
namespace
{
namespace fs = std::filesystem;

constexpr std::size_t kChunk = 65'536;

// Bad invocation that is not tied to a single config key.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char * spec, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt_opt(const char * spec, const std::optional<double> & v)
{
  return v ? fmt(spec, *v) : std::string("n/a");
}

std::string numbered(const char * prefix, std::uint64_t index)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06llu.pgm", prefix, static_cast<unsigned long long>(index));
  return buf;
}

Timestamp seconds_to_us(double s) { return static_cast<Timestamp>(std::llround(s * kMicrosPerSecond)); }

void ensure_dir(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(Errc::IoError, "cannot create directory " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw Error(Errc::IoError, "cannot write " + path.string());
  }
}

bool is_csv(const fs::path & p)
{
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}

// Chunked view over an event file of either format.
struct FileSource
{
  SensorGeometry geometry;
  std::function<std::vector<Event>(std::size_t)> next;
};

FileSource open_events(const Config & config, const fs::path & path)
{
  if (is_csv(path)) {
    auto reader = std::make_shared<evio::CsvEventReader>(path, config.strict_time);
    const SensorGeometry g =
      reader->geometry().value_or(config.geometry.value_or(SensorGeometry{}));
    return {g, [reader](std::size_t n) { return reader->read_chunk(n); }};
  }
  auto reader = std::make_shared<evio::BinaryEventReader>(path);
  return {reader->geometry(), [reader](std::size_t n) { return reader->read_chunk(n); }};
}

EventBatch read_all(FileSource & src)
{
  EventBatch batch;
  for (auto chunk = src.next(kChunk); !chunk.empty(); chunk = src.next(kChunk)) {
    batch.events.insert(batch.events.end(), chunk.begin(), chunk.end());
  }
  return batch;
}

EventBatch simulate_scene(const Config & c)
{
  return synth::generate_events(c.scene, c.trigger, c.noise, c.dt_sample);
}

// key = value lines that rebuild the simulated scene for `compare --scene-config`.
std::string scene_config_text(const Config & c)
{
  const auto & s = c.scene;
  std::string hot;
  for (const auto & hp : c.noise.hot_pixels) {
    hot += (hot.empty() ? "" : ";") + std::to_string(hp.x) + ":" + std::to_string(hp.y) + ":" +
           fmt("%.17g", hp.rate) + ":" + std::to_string(hp.polarity);
  }
  std::string out = "# scene used by esi simulate\n";
  out += "width = " + std::to_string(s.geometry.width) + "\n";
  out += "height = " + std::to_string(s.geometry.height) + "\n";
  out += "duration = " + fmt("%.17g", s.duration) + "\n";
  out += "lead = " + fmt("%.17g", s.stationary_lead) + "\n";
  out += "ramp_min = " + fmt("%.17g", s.ramp_min) + "\n";
  out += "ramp_max = " + fmt("%.17g", s.ramp_max) + "\n";
  out += "radius = " + fmt("%.17g", s.circle.radius) + "\n";
  out += "reflectivity = " + fmt("%.17g", s.circle.reflectivity) + "\n";
  out += "center_x = " + fmt("%.17g", s.circle.center_x) + "\n";
  out += "center_y = " + fmt("%.17g", s.circle.center_y) + "\n";
  out += "velocity = " + fmt("%.17g", s.circle.velocity) + "\n";
  out += "illumination_rate = " + fmt("%.17g", s.illumination_rate) + "\n";
  out += "contrast = " + fmt("%.17g", c.trigger.contrast) + "\n";
  out += "dt_sample = " + fmt("%.17g", c.dt_sample) + "\n";
  out += "noise_rate = " + fmt("%.17g", c.noise.background_rate) + "\n";
  out += "seed = " + std::to_string(c.noise.seed) + "\n";
  if (!hot.empty()) {
    out += "hot_pixels = " + hot + "\n";
  }
  return out;
}

// Per-frame min..max stretch of the true log intensity; a flat image maps to 128.
Frame truth_frame(const ValueMatrix & m, Timestamp t)
{
  const auto [lo, hi] = std::minmax_element(m.values.begin(), m.values.end());
  std::vector<int> px(m.values.size(), 128);
  if (*hi > *lo) {
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = static_cast<int>(map_to_gray(m.values[i], *lo, *hi));
    }
  }
  return Frame::from_values(t, m.geometry, px);
}

int cmd_simulate(const Config & c, std::ostream & out)
{
  const EventBatch batch = simulate_scene(c);
  ensure_dir(c.output_dir);
  const fs::path events_path = c.output_dir / ("events." + c.format);
  if (c.format == "csv") {
    evio::write_events_csv(events_path, batch, c.scene.geometry);
  } else {
    evio::write_events_bin(events_path, batch, c.scene.geometry);
  }
  write_text(c.output_dir / "scene.cfg", scene_config_text(c));

  out << "simulated " << batch.size() << " events over " << fmt("%g", c.scene.duration) << " s ("
      << c.scene.geometry.width << "x" << c.scene.geometry.height << ")";
  if (const auto span = batch.time_span()) {
    out << ", first t=" << span->first << " us, last t=" << span->last << " us";
  }
  out << "\nwrote " << events_path.string() << "\n";

  if (c.dump_truth) {
    const double fps = c.recon.esi.frame_rate;
    const auto n = static_cast<std::uint64_t>(std::ceil(c.scene.duration * fps - 1e-9));
    std::string manifest = "index,t_us,path\n";
    for (std::uint64_t i = 1; i <= n; ++i) {
      const Timestamp t =
        std::min(seconds_to_us(static_cast<double>(i) / fps), seconds_to_us(c.scene.duration));
      const std::string name = numbered("truth", i);
      evio::write_frame_pgm(
        truth_frame(synth::render_log_intensity(c.scene, to_seconds(t)), t), c.output_dir / name);
      manifest += std::to_string(i) + "," + std::to_string(t) + "," + name + "\n";
    }
    write_text(c.output_dir / "truth_manifest.csv", manifest);
    out << "wrote " << n << " ground-truth frames\n";
  }
  return 0;
}

int cmd_reconstruct(const Config & c, std::ostream & out)
{
  std::optional<FileSource> file;
  EventBatch simulated;
  SensorGeometry g = c.scene.geometry;
  MethodConfig mc = c.recon;
  std::optional<Timestamp> t_end = c.end_us;
  if (c.input) {
    file = open_events(c, *c.input);
    g = file->geometry;
  } else {
    simulated = simulate_scene(c);
    mc.origin = mc.origin.value_or(0);
    t_end = t_end.value_or(seconds_to_us(c.scene.duration));
  }
  auto recon = make_reconstructor(c.method, mc, g);

  ensure_dir(c.output_dir);
  std::string manifest = "index,t_us,path\n";
  std::uint64_t written = 0;
  auto sink = [&](Frame && f) {
    ++written;
    const std::string name = numbered("frame", written);
    evio::write_frame_pgm(f, c.output_dir / name);
    manifest += std::to_string(written) + "," + std::to_string(f.t_emit) + "," + name + "\n";
  };

  // simulated streams are handed over in 10 ms packets, files in chunks
  std::size_t cursor = 0;
  std::optional<Timestamp> last_t;
  BatchSource source = [&]() -> std::optional<EventBatch> {
    EventBatch b;
    if (file) {
      b.events = file->next(kChunk);
    } else if (cursor < simulated.size()) {
      const Timestamp limit = simulated.events[cursor].t + 10'000;
      std::size_t end = cursor;
      while (end < simulated.size() && simulated.events[end].t < limit) {
        ++end;
      }
      b.events.assign(
        simulated.events.begin() + static_cast<std::ptrdiff_t>(cursor),
        simulated.events.begin() + static_cast<std::ptrdiff_t>(end));
      cursor = end;
    }
    if (b.empty()) {
      return std::nullopt;
    }
    last_t = b.events.back().t;
    return b;
  };

  if (c.pipeline) {
    run_staged_pipeline(source, *recon, sink);
  } else {
    while (auto b = source()) {
      for (Frame & f : recon->process_events(*b)) {
        sink(std::move(f));
      }
    }
  }
  if (const auto end = t_end ? t_end : last_t) {
    for (Frame & f : recon->finish(*end)) {
      sink(std::move(f));
    }
  }
  write_text(c.output_dir / "manifest.csv", manifest);
  out << recon->name() << ": " << recon->events_processed() << " events, " << written
      << " frames at " << fmt("%g", c.recon.esi.frame_rate) << " fps -> "
      << c.output_dir.string() << "\n";
  return 0;
}

std::vector<std::string> resolve_methods(const Config & c, std::vector<std::string> fallback)
{
  return c.methods.empty() ? fallback : c.methods;
}

int cmd_compare(const Config & c, std::ostream & out)
{
  const auto methods = resolve_methods(c, method_names());
  for (const auto & m : methods) {
    if (m == "noop") {
      throw ConfigError("methods", "noop is a benchmark stub and cannot be scored");
    }
  }
  if (methods.size() < 2) {
    throw ConfigError("methods", "compare needs at least two methods");
  }

  EventBatch batch;
  SensorGeometry g = c.scene.geometry;
  synth::SceneSpec truth_scene = c.scene;
  MethodConfig mc = c.recon;
  std::optional<Timestamp> t_end = c.end_us;
  if (c.input) {
    if (!c.scene_config) {
      throw UsageError("compare --input needs ground truth: pass --scene-config <file>");
    }
    Config truth;
    load_config_file(truth, *c.scene_config);
    validate(truth);
    truth_scene = truth.scene;
    FileSource src = open_events(c, *c.input);
    g = src.geometry;
    batch = read_all(src);
    if (!t_end && !batch.empty()) {
      t_end = batch.events.back().t;
    }
  } else {
    batch = simulate_scene(c);
    mc.origin = mc.origin.value_or(0);
    t_end = t_end.value_or(seconds_to_us(c.scene.duration));
  }
  const metrics::TruthProvider truth = [&](Timestamp t) {
    return synth::render_log_intensity(truth_scene, to_seconds(t));
  };

  ensure_dir(c.output_dir);
  std::string combined = "method,t_us,pearson,mse_norm\n";
  std::string table = "method      frames  scored  missing  mean_pearson  min_pearson  mean_mse_norm\n";
  for (const auto & m : methods) {
    auto recon = make_reconstructor(m, mc, g);
    std::vector<Frame> frames = recon->process_events(batch);
    if (t_end) {
      auto tail = recon->finish(*t_end);
      std::move(tail.begin(), tail.end(), std::back_inserter(frames));
    }
    const metrics::RunScores scores = metrics::score_run(frames, truth);
    const std::string rows = metrics::to_csv(scores.frames, false);
    std::size_t pos = 0;
    while (pos < rows.size()) {
      const auto nl = rows.find('\n', pos);
      combined += m + "," + rows.substr(pos, nl - pos) + "\n";
      pos = nl == std::string::npos ? rows.size() : nl + 1;
    }
    write_text(c.output_dir / ("scores_" + m + ".csv"), metrics::to_csv(scores.frames));

    char line[160];
    std::snprintf(
      line, sizeof(line), "%-10s  %6zu  %6zu  %7zu  %12s  %11s  %13s\n", m.c_str(), frames.size(),
      scores.summary.scored, scores.summary.missing,
      fmt_opt("%.4f", scores.summary.mean_pearson).c_str(),
      fmt_opt("%.4f", scores.summary.min_pearson).c_str(),
      fmt_opt("%.5f", scores.summary.mean_mse_norm).c_str());
    table += line;
  }
  write_text(c.output_dir / "compare.csv", combined);
  write_text(c.output_dir / "summary.txt", table);
  out << table;
  return 0;
}

int cmd_bench(const Config & c, std::ostream & out)
{
  const auto methods = resolve_methods(c, {"noop", "esi", "naive", "expdecay", "compfilter"});
  const SensorGeometry g = c.geometry.value_or(SensorGeometry{});
  const EventBatch stream = bench::make_uniform_stream(g, c.bench_events, c.bench_rate, c.noise.seed);
  const EventBatch scene = simulate_scene(c);

  std::vector<bench::BenchReport> reports;
  for (const auto & m : methods) {
    bench::BenchReport r = bench::bench_throughput(m, c.recon, g, stream, c.repeats, c.pipeline);
    r.per_frame_time = bench::bench_frame_time(m, c.recon, c.scene.geometry, scene, c.fps_list);
    reports.push_back(std::move(r));
  }
  ensure_dir(c.output_dir);
  write_text(c.output_dir / "bench.csv", bench::report_csv(reports));
  const std::string text = bench::report_text(reports);
  write_text(c.output_dir / "bench.txt", text);
  out << text;
  return 0;
}

struct Setup
{
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;
};

void add_common(CLI::App & sub, Setup & setup)
{
  sub.add_option("--config", setup.config_path, "key = value config file (default: $ESI_CONFIG)");
  sub.add_option("--set", setup.sets, "override one config key, as key=value (repeatable)");
  auto value = [&](const std::string & flag, const std::string & key, const std::string & help) {
    sub.add_option_function<std::string>(
      flag, [&setup, key](const std::string & v) { setup.flags.emplace_back(key, v); }, help);
  };
  auto toggle = [&](const std::string & flag, const std::string & key, const std::string & help) {
    sub.add_flag_callback(flag, [&setup, key] { setup.flags.emplace_back(key, "true"); }, help);
  };
  value("--method", "method", "esi|naive|expdecay|compfilter");
  value("--methods", "methods", "comma-separated methods (compare, bench)");
  value("--fps", "fps", "frame rate");
  value("--k", "k", "decay rate k (1/s)");
  value("--b", "b", "decay exponent b");
  value("--threshold", "threshold", "contrast threshold C");
  value("--smin", "smin", "lower clamp bound");
  value("--smax", "smax", "upper clamp bound");
  value("--lambda", "lambda", "expdecay rate (1/s)");
  value("--alpha", "alpha", "compfilter rate (1/s)");
  value("--seed", "seed", "random seed");
  value("--input", "input", "event file (.csv or binary)");
  value("--output-dir", "output_dir", "output directory");
  value("--format", "format", "csv|bin (simulate output)");
  value("--scene-config", "scene_config", "scene config giving ground truth for --input");
  value("--origin-us", "origin_us", "frame grid origin (us)");
  value("--end-us", "end_us", "stream end (us); adds the trailing frame");
  value("--events", "bench_events", "benchmark stream length");
  value("--repeats", "repeats", "benchmark repeats (>= 3)");
  value("--fps-list", "fps_list", "comma-separated frame rates for per-frame timing");
  toggle("--strict-time", "strict_time", "reject non-monotone CSV timestamps");
  toggle("--pipeline", "pipeline", "use the staged three-thread pipeline");
  toggle("--dump-truth", "dump_truth", "write ground-truth frames (simulate)");
}

Config build_config(const Setup & setup)
{
  Config config;
  std::optional<std::string> path = setup.config_path;
  if (!path) {
    if (const char * env = std::getenv("ESI_CONFIG"); env != nullptr && *env != '\0') {
      path = env;
    }
  }
  if (path) {
    load_config_file(config, *path);
  }
  for (const auto & kv : setup.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(kv, "--set expects key=value");
    }
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto & [key, value] : setup.flags) {
    apply_setting(config, key, value);
  }
  validate(config);
  return config;
}
}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Event-based single integration: simulate, reconstruct, compare, bench", "esi"};
  app.require_subcommand(1);
  Setup setup;
  struct Command
  {
    CLI::App * app;
    int (*fn)(const Config &, std::ostream &);
  };
  const std::vector<Command> commands{
    {app.add_subcommand("simulate", "generate the synthetic scene's events"), cmd_simulate},
    {app.add_subcommand("reconstruct", "write PGM frames for one method"), cmd_reconstruct},
    {app.add_subcommand("compare", "score several methods against ground truth"), cmd_compare},
    {app.add_subcommand("bench", "throughput and per-frame timing"), cmd_bench},
  };
  for (const auto & c : commands) {
    add_common(*c.app, setup);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Config config = build_config(setup);
    for (const auto & c : commands) {
      if (c.app->parsed()) {
        return c.fn(config, out);
      }
    }
    return 2;
  } catch (const ConfigError & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError & e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace esi::cli
