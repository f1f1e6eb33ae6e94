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

#include "esi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include "esi/evio.hpp"
#include "esi/pipeline.hpp"

namespace esi::bench
{
namespace
{
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Timed region: integration, frame emission and the trailing frame. The
// reconstructor is built by the caller.
double run_once(Reconstructor & r, const EventBatch & batch)
{
  const Timestamp t_end = batch.events.back().t;
  const auto start = Clock::now();
  r.process_events(batch);
  r.finish(t_end);
  return seconds_since(start);
}

// below this the clock measures nothing useful (e.g. noop without emission)
constexpr double kMinWall = 1e-5;

std::optional<double> rate(std::size_t events, double wall)
{
  if (events == 0 || !(wall >= kMinWall)) {
    return std::nullopt;
  }
  return static_cast<double>(events) / wall;
}

std::string fmt(const char * spec, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt_opt(const char * spec, const std::optional<double> & v)
{
  return v ? fmt(spec, *v) : std::string();
}

double pipeline_run(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g,
  const EventBatch & batch)
{
  auto r = make_bench_reconstructor(kind, config, g);
  const std::span<const Event> all = batch.view();
  const Timestamp packet_us = 10'000;  // 100 Hz driver packets
  std::size_t cursor = 0;
  BatchSource source = [&]() -> std::optional<EventBatch> {
    if (cursor >= all.size()) {
      return std::nullopt;
    }
    const Timestamp limit = all[cursor].t + packet_us;
    std::size_t end = cursor;
    while (end < all.size() && all[end].t < limit) {
      ++end;
    }
    EventBatch packet{{all.begin() + static_cast<std::ptrdiff_t>(cursor),
                       all.begin() + static_cast<std::ptrdiff_t>(end)}};
    cursor = end;
    return packet;
  };
  std::size_t encoded_bytes = 0;
  FrameSink sink = [&](Frame && f) { encoded_bytes += evio::encode_pgm(f).size(); };
  const auto start = Clock::now();
  run_staged_pipeline(source, *r, sink, all.back().t);
  return seconds_since(start);
}
}  // namespace

NoopReconstructor::NoopReconstructor(const SensorGeometry & g, const MethodConfig & config)
: Reconstructor(
    g, config.esi.s_min, config.esi.s_max, FrameSchedule{config.esi.frame_rate, config.origin})
{
}

void NoopReconstructor::read_values(Timestamp, std::span<double> out) const
{
  std::fill(out.begin(), out.end(), 0.0);
}

std::unique_ptr<Reconstructor> make_bench_reconstructor(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g)
{
  if (kind == "noop") {
    return std::make_unique<NoopReconstructor>(g, config);
  }
  return make_reconstructor(kind, config, g);
}

BenchReport bench_throughput(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g,
  const EventBatch & batch, int repeats, bool pipeline)
{
  if (repeats < 3) {
    throw Error(Errc::InvalidParameter, "benchmark needs at least 3 repeats");
  }
  BenchReport report;
  report.method = std::string(kind);
  report.events_processed = batch.size();
  report.repeats = static_cast<std::size_t>(repeats);
  report.frame_rate = config.esi.frame_rate;
  report.machine_note = machine_note();
  make_bench_reconstructor(kind, config, g);  // validates parameters even for empty input
  if (batch.empty()) {
    return report;
  }

  std::vector<double> with_emission;
  std::vector<double> without_emission;
  {
    auto warm = make_bench_reconstructor(kind, config, g);
    run_once(*warm, batch);
  }
  for (int i = 0; i < repeats; ++i) {
    auto r = make_bench_reconstructor(kind, config, g);
    with_emission.push_back(run_once(*r, batch));
    auto quiet = make_bench_reconstructor(kind, config, g);
    quiet->set_frame_emission(false);
    without_emission.push_back(run_once(*quiet, batch));
  }
  report.wall_time_s = median(with_emission);
  report.throughput = rate(batch.size(), report.wall_time_s);
  report.wall_time_no_emission_s = median(without_emission);
  report.throughput_no_emission = rate(batch.size(), report.wall_time_no_emission_s);

  if (pipeline) {
    std::vector<double> staged;
    for (int i = 0; i < repeats; ++i) {
      staged.push_back(pipeline_run(kind, config, g, batch));
    }
    report.pipeline_throughput = rate(batch.size(), median(staged));
  }
  return report;
}

std::vector<FrameTiming> bench_frame_time(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g,
  const EventBatch & batch, std::span<const double> fps_list)
{
  std::vector<FrameTiming> out;
  const std::span<const Event> all = batch.view();
  for (const double fps : fps_list) {
    MethodConfig c = config;
    c.esi.frame_rate = fps;
    c.origin = all.empty() ? Timestamp{0} : all.front().t;
    auto r = make_bench_reconstructor(kind, c, g);
    const Timestamp t_last = all.empty() ? c.origin.value() + 1'000'000 : all.back().t;

    // pre-split into per-frame packets: events in (F_{i-1}, F_i]
    std::vector<std::pair<std::span<const Event>, Timestamp>> packets;
    std::size_t cursor = 0;
    for (std::uint64_t i = 1;; ++i) {
      const Timestamp boundary = r->frame_time(i);
      std::size_t end = cursor;
      while (end < all.size() && all[end].t <= boundary) {
        ++end;
      }
      packets.emplace_back(all.subspan(cursor, end - cursor), boundary);
      cursor = end;
      if (boundary >= t_last) {
        break;
      }
    }

    std::vector<double> ms;
    ms.reserve(packets.size());
    std::size_t frames = 0;
    for (const auto & [events, boundary] : packets) {
      const auto start = Clock::now();
      frames += r->process_events(events).size();
      frames += r->advance_to(boundary).size();
      ms.push_back(seconds_since(start) * 1e3);
    }

    FrameTiming ft;
    ft.fps = fps;
    ft.frames = frames;
    double sum = 0.0;
    for (const double v : ms) {
      sum += v;
    }
    ft.mean_ms = ms.empty() ? 0.0 : sum / static_cast<double>(ms.size());
    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
      const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size()))) - 1;
      ft.p99_ms = sorted[std::min(idx, sorted.size() - 1)];
    }
    ft.period_percent = ft.mean_ms / (1e3 / fps) * 100.0;
    ft.mean_events_per_frame =
      packets.empty() ? 0.0 : static_cast<double>(all.size()) / static_cast<double>(packets.size());
    out.push_back(ft);
  }
  return out;
}

EventBatch make_uniform_stream(
  const SensorGeometry & g, std::size_t count, double rate, std::uint64_t seed)
{
  if (!(rate > 0.0)) {
    throw Error(Errc::InvalidParameter, "stream rate must be > 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> px(0, static_cast<std::uint32_t>(g.pixel_count() - 1));
  EventBatch batch;
  batch.events.resize(count);
  const double us_per_event = 1e6 / rate;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t p = px(rng);
    batch.events[i] = Event{
      static_cast<Timestamp>(static_cast<double>(i) * us_per_event),
      static_cast<std::uint16_t>(p % g.width), static_cast<std::uint16_t>(p / g.width),
      static_cast<std::int8_t>((rng() & 1) ? 1 : -1)};
  }
  return batch;
}

std::string machine_note()
{
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        cpu = line.substr(colon + 2);
      }
      break;
    }
  }
  return cpu + ", " + std::to_string(std::thread::hardware_concurrency()) + " hw threads";
}

std::string report_csv(std::span<const BenchReport> reports)
{
  std::string out =
    "method,events,repeats,fps,wall_s,throughput_ev_s,wall_no_emission_s,"
    "throughput_no_emission_ev_s,pipeline_throughput_ev_s\n";
  for (const auto & r : reports) {
    out += r.method + "," + std::to_string(r.events_processed) + "," + std::to_string(r.repeats) +
           "," + fmt("%g", r.frame_rate) + "," + fmt("%.6f", r.wall_time_s) + "," +
           fmt_opt("%.0f", r.throughput) + "," + fmt("%.6f", r.wall_time_no_emission_s) + "," +
           fmt_opt("%.0f", r.throughput_no_emission) + "," + fmt_opt("%.0f", r.pipeline_throughput) +
           "\n";
  }
  out += "\nmethod,fps,frames,mean_ms,p99_ms,period_percent,mean_events_per_frame\n";
  for (const auto & r : reports) {
    for (const auto & ft : r.per_frame_time) {
      out += r.method + "," + fmt("%g", ft.fps) + "," + std::to_string(ft.frames) + "," +
             fmt("%.4f", ft.mean_ms) + "," + fmt("%.4f", ft.p99_ms) + "," +
             fmt("%.3f", ft.period_percent) + "," + fmt("%.1f", ft.mean_events_per_frame) + "\n";
    }
  }
  return out;
}

std::string report_text(std::span<const BenchReport> reports)
{
  std::string out;
  if (!reports.empty()) {
    out += "machine: " + reports.front().machine_note + "\n";
  }
  for (const auto & r : reports) {
    out += r.method + ": " + std::to_string(r.events_processed) + " events, median of " +
           std::to_string(r.repeats) + "\n";
    out += "  with " + fmt("%g", r.frame_rate) + " fps emission: " +
           (r.throughput ? fmt("%.2f Mev/s", *r.throughput / 1e6) : "n/a") + "\n";
    out += "  without emission:     " +
           (r.throughput_no_emission ? fmt("%.2f Mev/s", *r.throughput_no_emission / 1e6) : "n/a") +
           "\n";
    if (r.pipeline_throughput) {
      out += "  staged pipeline:      " + fmt("%.2f Mev/s", *r.pipeline_throughput / 1e6) + "\n";
    }
    for (const auto & ft : r.per_frame_time) {
      out += "  " + fmt("%g", ft.fps) + " fps: mean " + fmt("%.3f", ft.mean_ms) + " ms, p99 " +
             fmt("%.3f", ft.p99_ms) + " ms (" + fmt("%.1f", ft.period_percent) +
             "% of period), " + fmt("%.0f", ft.mean_events_per_frame) + " events/frame\n";
    }
  }
  return out;
}

}  // namespace esi::bench
