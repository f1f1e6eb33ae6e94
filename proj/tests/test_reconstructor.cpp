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

#include <cmath>
#include <random>

#include "esi/reconstructor.hpp"
#include "oracle.hpp"

namespace
{
using esi::EsiParams;
using esi::EsiReconstructor;
using esi::Event;
using esi::Frame;
using esi::SensorGeometry;

std::vector<Frame> run_all(esi::Reconstructor & r, const std::vector<Event> & events, esi::Timestamp t_end)
{
  auto frames = r.process_events(events);
  auto tail = r.finish(t_end);
  frames.insert(frames.end(), tail.begin(), tail.end());
  return frames;
}

TEST(Clamp, Examples)
{
  EXPECT_EQ(esi::clamp(0.7, -1.5, 1.5), 0.7);
  EXPECT_EQ(esi::clamp(9.9, -1.5, 1.5), 1.5);
  EXPECT_EQ(esi::clamp(-2.0, -1.5, 1.5), -1.5);
}

TEST(MapToGray, Examples)
{
  EXPECT_EQ(esi::map_to_gray(-1.5, -1.5, 1.5), 0);
  EXPECT_EQ(esi::map_to_gray(1.5, -1.5, 1.5), 255);
  EXPECT_EQ(esi::map_to_gray(0.0, -1.5, 1.5), 128);
}

TEST(ClampProperty, IdempotentAndMonotone)
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 20'000; ++i) {
    double lo = u(rng);
    double hi = u(rng);
    if (lo == hi) {
      continue;
    }
    if (lo > hi) {
      std::swap(lo, hi);
    }
    const double a = u(rng) * 2.0;
    const double b = u(rng) * 2.0;
    const double ca = esi::clamp(a, lo, hi);
    ASSERT_EQ(esi::clamp(ca, lo, hi), ca);
    ASSERT_GE(ca, lo);
    ASSERT_LE(ca, hi);
    if (a <= b) {
      ASSERT_LE(ca, esi::clamp(b, lo, hi));
      ASSERT_LE(esi::map_to_gray(ca, lo, hi), esi::map_to_gray(esi::clamp(b, lo, hi), lo, hi));
    }
  }
}

TEST(MapToGrayProperty, MatchesOracle)
{
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 20'000; ++i) {
    const double lo = u(rng);
    const double hi = lo + std::abs(u(rng)) + 1e-3;
    const double v = std::uniform_real_distribution<double>(lo, hi)(rng);
    ASSERT_EQ(esi::map_to_gray(v, lo, hi), esi::oracle::gray(v, lo, hi));
  }
}

TEST(EsiParams, Validation)
{
  const SensorGeometry g{4, 4};
  auto bad = [&](auto mutate) {
    EsiParams p;
    mutate(p);
    try {
      EsiReconstructor r(g, p);
    } catch (const esi::Error & e) {
      return e.code() == esi::Errc::InvalidParameter;
    }
    return false;
  };
  EXPECT_TRUE(bad([](EsiParams & p) { p.s_min = p.s_max; }));
  EXPECT_TRUE(bad([](EsiParams & p) { p.threshold = 0.0; }));
  EXPECT_TRUE(bad([](EsiParams & p) { p.frame_rate = -1.0; }));
  EXPECT_TRUE(bad([](EsiParams & p) { p.decay.k = 0.0; }));
  EXPECT_TRUE(bad([](EsiParams & p) { p.decay.b = 0.0; }));
}

TEST(Schedule, GridRounding)
{
  EsiParams p;
  p.frame_rate = 30.0;
  EsiReconstructor r({2, 2}, p, 1000);
  EXPECT_EQ(r.frame_time(1), 1000u + 33'333u);
  EXPECT_EQ(r.frame_time(2), 1000u + 66'667u);
  EXPECT_EQ(r.frame_time(3), 1000u + 100'000u);
}

TEST(Schedule, EmptyStreamGivesUniformFrames)
{
  const SensorGeometry g{6, 4};
  EsiReconstructor r(g, EsiParams{}, 0);
  const auto frames = run_all(r, {}, 30'000);
  ASSERT_EQ(frames.size(), 3u);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].t_emit, 10'000u * (i + 1));
    for (const auto px : frames[i].pixels) {
      ASSERT_EQ(px, 128);
    }
  }
}

TEST(Schedule, AnchorsAtFirstEvent)
{
  EsiReconstructor r({2, 2}, EsiParams{});
  r.process_events(std::vector<Event>{{5000, 0, 0, 1}});
  ASSERT_TRUE(r.origin());
  EXPECT_EQ(*r.origin(), 5000u);
  EXPECT_EQ(r.frame_time(1), 15'000u);
}

TEST(Schedule, TrailingPartialFrame)
{
  EsiReconstructor r({2, 2}, EsiParams{}, 0);
  const auto frames = run_all(r, {}, 25'000);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames.back().t_emit, 30'000u);
}

TEST(Schedule, BoundaryEventBelongsToEarlierFrame)
{
  EsiReconstructor r({2, 2}, EsiParams{}, 0);
  auto frames = r.process_events(std::vector<Event>{{10'000, 1, 1, 1}, {10'001, 0, 0, 1}});
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].t_emit, 10'000u);
  EXPECT_GT(frames[0].at(1, 1), 128);
  EXPECT_EQ(frames[0].at(0, 0), 128);
}

TEST(Schedule, EmitsOnlyBeforeLastEvent)
{
  EsiReconstructor r({2, 2}, EsiParams{}, 0);
  EXPECT_TRUE(r.process_events(std::vector<Event>{{10'000, 0, 0, 1}}).empty());
  EXPECT_EQ(r.advance_to(10'000).size(), 1u);
  EXPECT_TRUE(r.advance_to(19'999).empty());
}

TEST(Esi, SingleEventFadesToMidGray)
{
  EsiParams p;
  p.decay = {10.0, 2.0};
  EsiReconstructor r({3, 3}, p, 0);
  auto frames = r.process_events(std::vector<Event>{{0, 1, 1, 1}});
  auto more = r.advance_to(200'000);
  frames.insert(frames.end(), more.begin(), more.end());
  ASSERT_EQ(frames.size(), 20u);
  int prev = 255;
  for (const auto & f : frames) {
    const int v = f.at(1, 1);
    EXPECT_LE(v, prev);
    EXPECT_EQ(v, esi::oracle::gray(0.15 * esi::oracle::decay(f.t_emit / 1e6, 10.0, 2.0), -1.5, 1.5));
    prev = v;
  }
  EXPECT_GT(frames.front().at(1, 1), 128);
  EXPECT_EQ(frames.back().at(1, 1), 128);
}

TEST(Esi, HotPixelSaturates)
{
  EsiReconstructor r({4, 4}, EsiParams{}, 0);
  std::vector<Event> events;
  for (esi::Timestamp t = 0; t < 1'000'000; t += 100) {
    events.push_back({t, 2, 3, 1});
  }
  for (std::size_t i = 0; i < events.size(); i += 997) {
    const std::size_t n = std::min<std::size_t>(997, events.size() - i);
    for (const auto & f : r.process_events(std::span<const Event>(events).subspan(i, n))) {
      EXPECT_EQ(f.at(2, 3), 255);
    }
    EXPECT_LE(r.state().s(2, 3), 1.5);
    EXPECT_GE(r.state().s(2, 3), -1.5);
  }
  EXPECT_EQ(r.state().s(2, 3), 1.5);
}

TEST(Esi, ClampAfterEveryEvent)
{
  std::mt19937_64 rng(23);
  const SensorGeometry g{2, 2};
  EsiParams p;
  p.s_min = -0.4;
  p.s_max = 0.3;
  EsiReconstructor r(g, p, 0);
  std::vector<Event> events;
  for (int i = 0; i < 5000; ++i) {
    events.push_back({static_cast<esi::Timestamp>(i * 50), static_cast<std::uint16_t>(rng() % 2),
                      static_cast<std::uint16_t>(rng() % 2), static_cast<std::int8_t>(rng() % 4 ? 1 : -1)});
  }
  for (const auto & e : events) {
    r.process_events(std::span<const Event>(&e, 1));
    ASSERT_GE(r.state().s(e.x, e.y), p.s_min);
    ASSERT_LE(r.state().s(e.x, e.y), p.s_max);
  }
}

TEST(Esi, NegativeIntervalReportsIndex)
{
  EsiReconstructor r({2, 2}, EsiParams{});
  r.process_events(std::vector<Event>{{100, 0, 0, 1}, {200, 1, 0, 1}});
  try {
    r.process_events(std::vector<Event>{{300, 1, 1, 1}, {50, 0, 0, 1}});
    FAIL() << "expected NegativeInterval";
  } catch (const esi::Error & e) {
    EXPECT_EQ(e.code(), esi::Errc::NegativeInterval);
    ASSERT_TRUE(e.position());
    EXPECT_EQ(*e.position(), 3u);
    EXPECT_NE(std::string(e.what()).find("event index 3"), std::string::npos);
  }
}

TEST(Esi, ResetRestoresFreshState)
{
  const SensorGeometry g{4, 4};
  std::mt19937_64 rng(24);
  const auto events = esi::oracle::random_stream(rng, g, 400, 1000);
  EsiReconstructor r(g, EsiParams{}, 0);
  EsiReconstructor fresh(g, EsiParams{}, 0);
  r.process_events(events);
  r.reset();
  EXPECT_TRUE(r.state().bit_identical(fresh.state()));
  EXPECT_EQ(r.frames_emitted(), 0u);
  r.reset();
  EXPECT_TRUE(r.state().bit_identical(fresh.state()));
  const auto frames = run_all(r, {}, 30'000);
  ASSERT_EQ(frames.size(), 3u);
  for (const auto & f : frames) {
    for (const auto px : f.pixels) {
      ASSERT_EQ(px, 128);
    }
  }
}

TEST(EsiProperty, MatchesOracleWithWideBounds)
{
  std::mt19937_64 rng(25);
  const SensorGeometry g{8, 8};
  EsiParams p;
  p.s_min = -1e9;
  p.s_max = 1e9;
  for (int trial = 0; trial < 50; ++trial) {
    const auto events = esi::oracle::random_stream(rng, g, 800, 30'000);
    EsiReconstructor r(g, p);
    r.process_events(events);
    const auto expect = esi::oracle::replay(events, g, p.threshold, p.decay.k, p.decay.b);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      ASSERT_NEAR(r.state()[i].s, expect[i], 1e-9);
    }
  }
}

TEST(EsiProperty, FramesMatchOracleRender)
{
  std::mt19937_64 rng(26);
  const SensorGeometry g{8, 8};
  EsiParams p;
  p.s_min = -1e9;
  p.s_max = 1e9;
  const auto events = esi::oracle::random_stream(rng, g, 600, 2000);
  EsiReconstructor r(g, p, 0);
  const auto frames = r.process_events(events);
  ASSERT_FALSE(frames.empty());
  for (const auto & f : frames) {
    std::vector<Event> prefix;
    for (const auto & e : events) {
      if (e.t <= f.t_emit) {
        prefix.push_back(e);
      }
    }
    const auto s = esi::oracle::replay(prefix, g, p.threshold, p.decay.k, p.decay.b);
    const auto last = esi::oracle::last_times(prefix, g);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double v = s[i] * esi::oracle::decay((f.t_emit - last[i]) / 1e6, p.decay.k, p.decay.b);
      ASSERT_NEAR(f.pixels[i], esi::oracle::gray(v, p.s_min, p.s_max), 1);
    }
  }
}

TEST(EsiProperty, BatchSplitInvariance)
{
  std::mt19937_64 rng(27);
  const SensorGeometry g{8, 8};
  for (int trial = 0; trial < 40; ++trial) {
    const auto events = esi::oracle::random_stream(rng, g, 1000, 700);
    const esi::Timestamp t_end = events.back().t + 12'345;
    EsiReconstructor whole(g, EsiParams{});
    const auto expect = run_all(whole, events, t_end);

    EsiReconstructor split(g, EsiParams{});
    std::vector<Frame> got;
    std::size_t cursor = 0;
    while (cursor < events.size()) {
      const std::size_t n = std::min<std::size_t>(rng() % 150, events.size() - cursor);
      auto part = split.process_events(std::span<const Event>(events).subspan(cursor, n));
      got.insert(got.end(), part.begin(), part.end());
      cursor += n;
    }
    auto tail = split.finish(t_end);
    got.insert(got.end(), tail.begin(), tail.end());
    ASSERT_EQ(got, expect);
    ASSERT_TRUE(split.state().bit_identical(whole.state()));
  }
}

TEST(EsiProperty, Deterministic)
{
  std::mt19937_64 rng(28);
  const SensorGeometry g{16, 8};
  const auto events = esi::oracle::random_stream(rng, g, 5000, 200);
  EsiReconstructor a(g, EsiParams{});
  EsiReconstructor b(g, EsiParams{});
  EXPECT_EQ(run_all(a, events, events.back().t), run_all(b, events, events.back().t));
  EXPECT_TRUE(a.state().bit_identical(b.state()));
}

TEST(EsiProperty, FrameRateIndependentState)
{
  std::mt19937_64 rng(29);
  const SensorGeometry g{16, 16};
  for (int trial = 0; trial < 10; ++trial) {
    const auto events = esi::oracle::random_stream(rng, g, 20'000, 100);
    std::vector<std::unique_ptr<EsiReconstructor>> rs;
    for (const double fps : {10.0, 100.0, 1000.0}) {
      EsiParams p;
      p.frame_rate = fps;
      rs.push_back(std::make_unique<EsiReconstructor>(g, p));
      run_all(*rs.back(), events, events.back().t);
    }
    EXPECT_LT(rs[0]->frames_emitted(), rs[2]->frames_emitted());
    EXPECT_TRUE(rs[0]->state().bit_identical(rs[1]->state()));
    EXPECT_TRUE(rs[0]->state().bit_identical(rs[2]->state()));
  }
}

TEST(Esi, EmissionOffIntegratesEverything)
{
  std::mt19937_64 rng(30);
  const SensorGeometry g{8, 8};
  const auto events = esi::oracle::random_stream(rng, g, 3000, 500);
  EsiReconstructor on(g, EsiParams{});
  EsiReconstructor off(g, EsiParams{});
  off.set_frame_emission(false);
  on.process_events(events);
  EXPECT_TRUE(off.process_events(events).empty());
  EXPECT_TRUE(off.state().bit_identical(on.state()));
  EXPECT_EQ(off.events_processed(), events.size());
}

}  // namespace
