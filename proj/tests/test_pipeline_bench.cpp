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


#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <thread>

#include "esi/bench.hpp"
#include "esi/pipeline.hpp"
#include "oracle.hpp"

namespace
{
using esi::Event;
using esi::EventBatch;
using esi::Frame;
using esi::SensorGeometry;

TEST(Channel, FifoAndClose)
{
  esi::Channel<int> ch(4);
  EXPECT_TRUE(ch.push(1));
  EXPECT_TRUE(ch.push(2));
  EXPECT_EQ(ch.pop(), 1);
  ch.close();
  EXPECT_EQ(ch.pop(), 2);  // drains after close
  EXPECT_FALSE(ch.pop());
  EXPECT_FALSE(ch.push(3));
}

TEST(Channel, BoundedProducerConsumer)
{
  esi::Channel<int> ch(2);
  std::vector<int> got;
  std::jthread consumer([&] {
    while (auto v = ch.pop()) {
      got.push_back(*v);
    }
  });
  for (int i = 0; i < 1000; ++i) {
    ASSERT_TRUE(ch.push(i));
  }
  ch.close();
  consumer.join();
  ASSERT_EQ(got.size(), 1000u);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(got[i], i);
  }
}

esi::BatchSource chunks_of(const std::vector<Event> & events, std::size_t n)
{
  auto cursor = std::make_shared<std::size_t>(0);
  return [&events, n, cursor]() -> std::optional<EventBatch> {
    if (*cursor >= events.size()) {
      return std::nullopt;
    }
    const std::size_t m = std::min(n, events.size() - *cursor);
    EventBatch b{{events.begin() + static_cast<std::ptrdiff_t>(*cursor),
                  events.begin() + static_cast<std::ptrdiff_t>(*cursor + m)}};
    *cursor += m;
    return b;
  };
}

TEST(Pipeline, MatchesSequential)
{
  std::mt19937_64 rng(61);
  const SensorGeometry g{32, 24};
  const auto events = esi::oracle::random_stream(rng, g, 50'000, 40);
  const esi::Timestamp t_end = events.back().t + 5000;

  esi::EsiReconstructor seq(g, esi::EsiParams{});
  auto expect = seq.process_events(events);
  auto tail = seq.finish(t_end);
  expect.insert(expect.end(), tail.begin(), tail.end());

  for (const std::size_t depth : {1u, 8u}) {
    esi::EsiReconstructor staged(g, esi::EsiParams{});
    std::vector<Frame> got;
    esi::run_staged_pipeline(chunks_of(events, 333), staged, [&](Frame && f) { got.push_back(std::move(f)); }, t_end, depth);
    EXPECT_EQ(got, expect);
    EXPECT_TRUE(staged.state().bit_identical(seq.state()));
  }
}

TEST(Pipeline, PropagatesFirstError)
{
  const SensorGeometry g{4, 4};
  const std::vector<Event> bad{{100, 0, 0, 1}, {50, 0, 0, 1}};
  esi::EsiReconstructor r(g, esi::EsiParams{});
  try {
    esi::run_staged_pipeline(chunks_of(bad, 1), r, [](Frame &&) {});
    FAIL();
  } catch (const esi::Error & e) {
    EXPECT_EQ(e.code(), esi::Errc::NegativeInterval);
    EXPECT_EQ(e.position(), std::optional<std::size_t>(1));
  }

  esi::EsiReconstructor r2(g, esi::EsiParams{}, 0);
  esi::BatchSource failing = []() -> std::optional<EventBatch> { throw std::runtime_error("source broke"); };
  EXPECT_THROW(esi::run_staged_pipeline(failing, r2, [](Frame &&) {}), std::runtime_error);

  std::mt19937_64 rng(62);
  const auto events = esi::oracle::random_stream(rng, g, 10'000, 500);
  esi::EsiReconstructor r3(g, esi::EsiParams{});
  auto sink = [](Frame &&) { throw std::logic_error("sink broke"); };
  EXPECT_THROW(esi::run_staged_pipeline(chunks_of(events, 10), r3, sink), std::logic_error);
}

TEST(Bench, UniformStream)
{
  const SensorGeometry g{346, 260};
  const auto a = esi::bench::make_uniform_stream(g, 10'000, 1e6, 3);
  EXPECT_EQ(a.size(), 10'000u);
  EXPECT_TRUE(a.is_time_ordered());
  EXPECT_EQ(a.events.back().t, 9'999u);
  for (const auto & e : a.events) {
    ASSERT_FALSE(esi::validate_event(e, g));
  }
  EXPECT_EQ(a, esi::bench::make_uniform_stream(g, 10'000, 1e6, 3));
}

TEST(Bench, Degenerate)
{
  const SensorGeometry g{16, 16};
  EXPECT_THROW(esi::bench::bench_throughput("esi", {}, g, {}, 2), esi::Error);
  const auto r = esi::bench::bench_throughput("esi", {}, g, {}, 3);
  EXPECT_EQ(r.events_processed, 0u);
  EXPECT_FALSE(r.throughput);
  EXPECT_FALSE(r.throughput_no_emission);
  EXPECT_THROW(esi::bench::bench_throughput("fast", {}, g, {}, 3), esi::Error);
}

TEST(Bench, ThroughputIsEventsOverWallTime)
{
  const SensorGeometry g{64, 64};
  const auto batch = esi::bench::make_uniform_stream(g, 200'000, 12e6);
  const auto r = esi::bench::bench_throughput("esi", {}, g, batch, 3, true);
  ASSERT_TRUE(r.throughput);
  EXPECT_DOUBLE_EQ(*r.throughput, 200'000 / r.wall_time_s);
  EXPECT_DOUBLE_EQ(*r.throughput_no_emission, 200'000 / r.wall_time_no_emission_s);
  EXPECT_TRUE(r.pipeline_throughput);
  EXPECT_FALSE(r.machine_note.empty());
}

TEST(Bench, NoopBoundsEveryMethod)
{
  const SensorGeometry g{346, 260};
  const auto batch = esi::bench::make_uniform_stream(g, 2'000'000, 12e6);
  const double noop = *esi::bench::bench_throughput("noop", {}, g, batch, 5).throughput;
  double esi_rate = 0.0;
  double naive_rate = 0.0;
  for (const auto & m : esi::method_names()) {
    const double rate = *esi::bench::bench_throughput(m, {}, g, batch, 5).throughput;
    EXPECT_GT(noop, rate) << m;
    if (m == "esi") {
      esi_rate = rate;
    } else if (m == "naive") {
      naive_rate = rate;
    }
  }
  EXPECT_GE(naive_rate, esi_rate);
}

TEST(Bench, FrameTimeScalesWithRate)
{
  const SensorGeometry g{64, 64};
  const auto batch = esi::bench::make_uniform_stream(g, 400'000, 200'000.0);  // 2 s
  const std::vector<double> fps{50, 100, 200};
  const auto t = esi::bench::bench_frame_time("esi", {}, g, batch, fps);
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i].fps, fps[i]);
    EXPECT_EQ(t[i].frames, static_cast<std::size_t>(2 * fps[i]));
    EXPECT_GT(t[i].mean_ms, 0.0);
    EXPECT_GE(t[i].p99_ms, 0.0);
    EXPECT_NEAR(t[i].period_percent, t[i].mean_ms / (1000.0 / fps[i]) * 100.0, 1e-9);
  }
  EXPECT_NEAR(t[1].mean_events_per_frame / t[0].mean_events_per_frame, 0.5, 0.02);
  EXPECT_NEAR(t[2].mean_events_per_frame / t[1].mean_events_per_frame, 0.5, 0.02);
}

TEST(Bench, EmptyStreamFrameTime)
{
  const std::vector<double> fps{100};
  const auto t = esi::bench::bench_frame_time("esi", {}, {32, 32}, {}, fps);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].frames, 100u);
  EXPECT_EQ(t[0].mean_events_per_frame, 0.0);
  EXPECT_GT(t[0].mean_ms, 0.0);
}

TEST(Bench, Reports)
{
  esi::bench::BenchReport r;
  r.method = "esi";
  r.events_processed = 10;
  r.repeats = 3;
  r.frame_rate = 100;
  r.wall_time_s = 0.5;
  r.throughput = 20.0;
  r.per_frame_time.push_back({100, 5, 0.1, 0.2, 1.0, 2.0});
  const std::vector<esi::bench::BenchReport> rs{r};
  const std::string csv = esi::bench::report_csv(rs);
  EXPECT_EQ(csv.rfind("method,events,repeats,fps,wall_s,throughput_ev_s", 0), 0u);
  EXPECT_NE(csv.find("esi,10,3,100,0.500000,20,"), std::string::npos);
  EXPECT_NE(csv.find("esi,100,5,0.1000,0.2000,1.000,2.0"), std::string::npos);
  EXPECT_NE(esi::bench::report_text(rs).find("n/a"), std::string::npos);
}

}  // namespace
