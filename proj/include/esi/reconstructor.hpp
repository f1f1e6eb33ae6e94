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

#ifndef ESI_RECONSTRUCTOR_HPP
#define ESI_RECONSTRUCTOR_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "esi/decay.hpp"
#include "esi/event.hpp"

namespace esi
{
inline double clamp(double v, double s_min, double s_max)
{
  return std::min(std::max(v, s_min), s_max);
}

/// Linear map of [s_min, s_max] onto [0, 255], rounding half away from zero.
/// `v` must already be clamped.
inline std::uint8_t map_to_gray(double v, double s_min, double s_max)
{
  // fraction first: the midpoint of any bounds is then exactly 127.5
  return static_cast<std::uint8_t>(std::lround(255.0 * ((v - s_min) / (s_max - s_min))));
}

/// Fixed-rate frame grid. Frame i (i >= 1) is emitted at
/// origin + round(i * 1e6 / frame_rate) microseconds. Without an explicit
/// origin the grid is anchored at the first event seen.
struct FrameSchedule
{
  double frame_rate{100.0};
  std::optional<Timestamp> origin;
};

/// Common driver for every reconstruction method: owns the frame grid and
/// hands runs of events between frame boundaries to the method.
///
/// An event whose timestamp equals a frame time is integrated before that
/// frame is rendered. Consequently process_events() only emits frames that
/// lie strictly before the last event of the batch; advance_to() declares the
/// stream complete up to and including a time.
class Reconstructor
{
public:
  Reconstructor(const SensorGeometry & g, double s_min, double s_max, FrameSchedule schedule);
  virtual ~Reconstructor() = default;

  Reconstructor(const Reconstructor &) = delete;
  Reconstructor & operator=(const Reconstructor &) = delete;

  virtual std::string_view name() const = 0;

  std::vector<Frame> process_events(std::span<const Event> events);
  std::vector<Frame> process_events(const EventBatch & batch) { return process_events(batch.view()); }

  /// Emits every frame whose time is <= t.
  std::vector<Frame> advance_to(Timestamp t);

  /// advance_to(t_end), plus one trailing frame covering a partial period.
  /// Emits ceil((t_end - origin) * frame_rate / 1e6) frames in total.
  std::vector<Frame> finish(Timestamp t_end);

  /// Zeroes the method state and rewinds the grid to its origin.
  void reset();

  /// Clamped values as they would be rendered at time t.
  ValueMatrix values_at(Timestamp t) const;
  Frame render(Timestamp t) const;

  /// When disabled, process_events() only integrates; the grid does not advance.
  void set_frame_emission(bool enabled) { emit_frames_ = enabled; }

  const SensorGeometry & geometry() const { return geometry_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }
  double frame_rate() const { return schedule_.frame_rate; }
  std::optional<Timestamp> origin() const { return origin_; }
  Timestamp frame_time(std::uint64_t index) const;
  std::uint64_t frames_emitted() const { return next_index_ - 1; }
  std::size_t events_processed() const { return events_seen_; }

protected:
  /// Integrates a run of events. `first_index` is the stream index of
  /// events[0], used to report the failing event.
  virtual void integrate(std::span<const Event> events, std::size_t first_index) = 0;
  /// Unclamped values at time t.
  virtual void read_values(Timestamp t, std::span<double> out) const = 0;
  virtual void clear_state() = 0;

private:
  void emit(Timestamp t, std::vector<Frame> & frames);

  SensorGeometry geometry_;
  double s_min_;
  double s_max_;
  FrameSchedule schedule_;
  std::optional<Timestamp> origin_;
  std::uint64_t next_index_{1};
  std::size_t events_seen_{0};
  bool emit_frames_{true};
  mutable std::vector<double> scratch_;
};

/// Rethrows `err` tagged with the stream index of the offending event.
[[noreturn]] void rethrow_at(const Error & err, std::size_t index);

struct EsiParams
{
  DecayParams decay;
  double threshold{0.15};
  double s_min{-1.5};
  double s_max{1.5};
  double frame_rate{100.0};

  void validate() const;
};

/// Event-based single integration: lazy polynomial decay on event arrival,
/// clamp at the touched pixel, linear 8-bit mapping at frame time.
class EsiReconstructor : public Reconstructor
{
public:
  EsiReconstructor(
    const SensorGeometry & g, const EsiParams & params,
    std::optional<Timestamp> origin = std::nullopt);

  std::string_view name() const override { return "esi"; }
  const EsiParams & params() const { return params_; }
  const StateMatrices & state() const { return state_; }

protected:
  void integrate(std::span<const Event> events, std::size_t first_index) override;
  void read_values(Timestamp t, std::span<double> out) const override;
  void clear_state() override { state_.reset(); }

private:
  EsiParams params_;
  StateMatrices state_;
};

}  // namespace esi

#endif  // ESI_RECONSTRUCTOR_HPP
