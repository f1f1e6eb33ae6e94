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

#ifndef ESI_EVENT_HPP
#define ESI_EVENT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "esi/error.hpp"

namespace esi
{
/// Microseconds since stream origin.
using Timestamp = std::uint64_t;

constexpr double kMicrosPerSecond = 1e6;

inline double to_seconds(Timestamp dt_us) { return static_cast<double>(dt_us) / kMicrosPerSecond; }

/// One polarity-tagged brightness change. `p` is +1 (brighter) or -1 (darker),
/// kept signed so accumulation is a single multiply-add.
struct Event
{
  Timestamp t{0};
  std::uint16_t x{0};
  std::uint16_t y{0};
  std::int8_t p{1};

  friend bool operator==(const Event &, const Event &) = default;
};

struct SensorGeometry
{
  std::uint16_t width{346};
  std::uint16_t height{260};

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::size_t index(std::uint16_t x, std::uint16_t y) const
  {
    return static_cast<std::size_t>(y) * width + x;
  }
  bool valid() const { return width >= 1 && height >= 1; }

  friend bool operator==(const SensorGeometry &, const SensorGeometry &) = default;
};

/// Returns nullopt when the event lies on the sensor and has unit polarity.
inline std::optional<Errc> validate_event(const Event & e, const SensorGeometry & g)
{
  if (e.x >= g.width || e.y >= g.height) {
    return Errc::OutOfBounds;
  }
  if (e.p != 1 && e.p != -1) {
    return Errc::BadPolarity;
  }
  return std::nullopt;
}

struct TimeSpan
{
  Timestamp first{0};
  Timestamp last{0};
  Timestamp duration() const { return last - first; }
};

/// Events in arrival order. Timestamps are non-decreasing; equal timestamps
/// keep the order they were received in.
struct EventBatch
{
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  std::optional<TimeSpan> time_span() const;
  bool is_time_ordered() const;
  std::span<const Event> view() const { return events; }

  friend bool operator==(const EventBatch &, const EventBatch &) = default;
};

/// Dense row-major matrix of reals over the sensor.
struct ValueMatrix
{
  SensorGeometry geometry;
  std::vector<double> values;

  ValueMatrix() = default;
  explicit ValueMatrix(const SensorGeometry & g, double fill = 0.0)
  : geometry(g), values(g.pixel_count(), fill)
  {
  }

  double at(std::uint16_t x, std::uint16_t y) const { return values[geometry.index(x, y)]; }
  double & at(std::uint16_t x, std::uint16_t y) { return values[geometry.index(x, y)]; }
};

/// 8-bit grayscale image emitted at `t_emit`.
struct Frame
{
  Timestamp t_emit{0};
  SensorGeometry geometry;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::uint16_t x, std::uint16_t y) const { return pixels[geometry.index(x, y)]; }

  /// Builds a frame from integral gray values. Throws InvalidParameter on a
  /// size mismatch or a value outside [0, 255].
  static Frame from_values(Timestamp t, const SensorGeometry & g, std::span<const int> values);

  friend bool operator==(const Frame &, const Frame &) = default;
};

}  // namespace esi

#endif  // ESI_EVENT_HPP
