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

#include "esi/reconstructor.hpp"

#include <string>

namespace esi
{
namespace
{
void check_bounds_and_rate(double s_min, double s_max, double frame_rate)
{
  if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
    throw Error(
      Errc::InvalidParameter, "clamp bounds must satisfy s_min < s_max, got [" +
                                std::to_string(s_min) + ", " + std::to_string(s_max) + "]");
  }
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) {
    throw Error(Errc::InvalidParameter, "frame rate must be > 0, got " + std::to_string(frame_rate));
  }
}
}  // namespace

void rethrow_at(const Error & err, std::size_t index)
{
  throw Error(err.code(), err.detail() + " (event index " + std::to_string(index) + ")", index);
}

Reconstructor::Reconstructor(
  const SensorGeometry & g, double s_min, double s_max, FrameSchedule schedule)
: geometry_(g), s_min_(s_min), s_max_(s_max), schedule_(schedule), origin_(schedule.origin)
{
  if (!g.valid()) {
    throw Error(Errc::InvalidParameter, "sensor geometry must be at least 1x1");
  }
  check_bounds_and_rate(s_min, s_max, schedule.frame_rate);
}

Timestamp Reconstructor::frame_time(std::uint64_t index) const
{
  const double offset = static_cast<double>(index) * kMicrosPerSecond / schedule_.frame_rate;
  return origin_.value_or(0) + static_cast<Timestamp>(std::llround(offset));
}

std::vector<Frame> Reconstructor::process_events(std::span<const Event> events)
{
  std::vector<Frame> frames;
  if (events.empty()) {
    return frames;
  }
  if (!emit_frames_) {
    integrate(events, events_seen_);
    events_seen_ += events.size();
    return frames;
  }
  if (!origin_) {
    origin_ = events.front().t;
  }
  std::size_t i = 0;
  const std::size_t n = events.size();
  while (i < n) {
    const Timestamp boundary = frame_time(next_index_);
    std::size_t j = i;
    while (j < n && events[j].t <= boundary) {
      ++j;
    }
    if (j > i) {
      integrate(events.subspan(i, j - i), events_seen_ + i);
      i = j;
    }
    if (i < n) {
      emit(boundary, frames);
    }
  }
  events_seen_ += n;
  return frames;
}

std::vector<Frame> Reconstructor::advance_to(Timestamp t)
{
  std::vector<Frame> frames;
  if (!origin_ || !emit_frames_) {
    return frames;
  }
  for (Timestamp boundary = frame_time(next_index_); boundary <= t;
       boundary = frame_time(next_index_)) {
    emit(boundary, frames);
  }
  return frames;
}

std::vector<Frame> Reconstructor::finish(Timestamp t_end)
{
  std::vector<Frame> frames = advance_to(t_end);
  if (origin_ && emit_frames_ && frame_time(next_index_ - 1) < t_end) {
    emit(frame_time(next_index_), frames);
  }
  return frames;
}

void Reconstructor::reset()
{
  clear_state();
  origin_ = schedule_.origin;
  next_index_ = 1;
  events_seen_ = 0;
}

ValueMatrix Reconstructor::values_at(Timestamp t) const
{
  ValueMatrix m(geometry_);
  read_values(t, m.values);
  for (double & v : m.values) {
    v = clamp(v, s_min_, s_max_);
  }
  return m;
}

Frame Reconstructor::render(Timestamp t) const
{
  scratch_.resize(geometry_.pixel_count());
  read_values(t, scratch_);
  Frame f{t, geometry_, std::vector<std::uint8_t>(scratch_.size())};
  for (std::size_t i = 0; i < scratch_.size(); ++i) {
    f.pixels[i] = map_to_gray(clamp(scratch_[i], s_min_, s_max_), s_min_, s_max_);
  }
  return f;
}

void Reconstructor::emit(Timestamp t, std::vector<Frame> & frames)
{
  frames.push_back(render(t));
  ++next_index_;
}

void EsiParams::validate() const
{
  decay.validate();
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(Errc::InvalidParameter, "threshold must be > 0, got " + std::to_string(threshold));
  }
  check_bounds_and_rate(s_min, s_max, frame_rate);
}

EsiReconstructor::EsiReconstructor(
  const SensorGeometry & g, const EsiParams & params, std::optional<Timestamp> origin)
: Reconstructor(g, params.s_min, params.s_max, FrameSchedule{params.frame_rate, origin}),
  params_(params),
  state_(g)
{
  params_.validate();
}

void EsiReconstructor::integrate(std::span<const Event> events, std::size_t first_index)
{
  std::size_t i = 0;
  try {
    for (; i < events.size(); ++i) {
      PixelState & px = apply_event(state_, events[i], params_.threshold, params_.decay);
      px.s = clamp(px.s, params_.s_min, params_.s_max);
    }
  } catch (const Error & err) {
    rethrow_at(err, first_index + i);
  }
}

void EsiReconstructor::read_values(Timestamp t, std::span<double> out) const
{
  peek_decayed_into(state_, t, params_.decay, out);
}

}  // namespace esi
