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

#ifndef ESI_BENCH_HPP
#define ESI_BENCH_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esi/baselines.hpp"

namespace esi::bench
{
/// Does nothing per event and renders a uniform frame. Its throughput is an
/// upper bound for the harness overhead.
class NoopReconstructor : public Reconstructor
{
public:
  NoopReconstructor(const SensorGeometry & g, const MethodConfig & config);
  std::string_view name() const override { return "noop"; }

protected:
  void integrate(std::span<const Event>, std::size_t) override {}
  void read_values(Timestamp, std::span<double> out) const override;
  void clear_state() override {}
};

/// make_reconstructor() plus "noop".
std::unique_ptr<Reconstructor> make_bench_reconstructor(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g);

struct FrameTiming
{
  double fps{0.0};
  std::size_t frames{0};
  double mean_ms{0.0};
  double p99_ms{0.0};
  double period_percent{0.0};  // mean_ms relative to the frame period
  double mean_events_per_frame{0.0};
};

struct BenchReport
{
  std::string method;
  std::size_t events_processed{0};
  std::size_t repeats{0};
  double frame_rate{0.0};
  // median wall time with frame emission on, and the resulting rate
  double wall_time_s{0.0};
  std::optional<double> throughput;
  // same stream with frame emission off; rates are empty below 10 us of wall time
  double wall_time_no_emission_s{0.0};
  std::optional<double> throughput_no_emission;
  // staged three-thread pipeline, when requested
  std::optional<double> pipeline_throughput;
  std::vector<FrameTiming> per_frame_time;
  std::string machine_note;
};

/// Median-of-`repeats` wall time for processing the in-memory batch (a fresh
/// reconstructor per repeat, one untimed warm-up pass first). Frame emission
/// runs at config.esi.frame_rate. Throws InvalidParameter if repeats < 3.
BenchReport bench_throughput(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g,
  const EventBatch & batch, int repeats = 5, bool pipeline = false);

/// Per-frame processing time at each frame rate. Events are pre-split into
/// per-frame packets; each timed step integrates one packet and emits its
/// frame. An empty batch times 1 s of frames with rendering cost only.
std::vector<FrameTiming> bench_frame_time(
  std::string_view kind, const MethodConfig & config, const SensorGeometry & g,
  const EventBatch & batch, std::span<const double> fps_list);

/// `count` events uniformly spread over the sensor at `rate` events/s with
/// random polarity, time-ordered.
EventBatch make_uniform_stream(
  const SensorGeometry & g, std::size_t count, double rate, std::uint64_t seed = 7);

std::string machine_note();

std::string report_csv(std::span<const BenchReport> reports);
std::string report_text(std::span<const BenchReport> reports);

}  // namespace esi::bench

#endif  // ESI_BENCH_HPP
