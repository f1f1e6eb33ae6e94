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

#include "esi/event.hpp"

#include <algorithm>
#include <string>

namespace esi
{
std::string_view to_string(Errc code)
{
  switch (code) {
    case Errc::OutOfBounds:
      return "OutOfBounds";
    case Errc::BadPolarity:
      return "BadPolarity";
    case Errc::NegativeInterval:
      return "NegativeInterval";
    case Errc::InvalidParameter:
      return "InvalidParameter";
    case Errc::ParseError:
      return "ParseError";
    case Errc::NonMonotoneTime:
      return "NonMonotoneTime";
    case Errc::BadMagic:
      return "BadMagic";
    case Errc::TruncatedFile:
      return "TruncatedFile";
    case Errc::CountMismatch:
      return "CountMismatch";
    case Errc::IoError:
      return "IoError";
    case Errc::SamplingTooCoarse:
      return "SamplingTooCoarse";
    case Errc::NonPositiveIntensity:
      return "NonPositiveIntensity";
    case Errc::GeometryMismatch:
      return "GeometryMismatch";
  }
  return "Unknown";
}

std::optional<TimeSpan> EventBatch::time_span() const
{
  if (events.empty()) {
    return std::nullopt;
  }
  return TimeSpan{events.front().t, events.back().t};
}

bool EventBatch::is_time_ordered() const
{
  return std::is_sorted(
    events.begin(), events.end(), [](const Event & a, const Event & b) { return a.t < b.t; });
}

Frame Frame::from_values(Timestamp t, const SensorGeometry & g, std::span<const int> values)
{
  if (values.size() != g.pixel_count()) {
    throw Error(
      Errc::InvalidParameter, "frame needs " + std::to_string(g.pixel_count()) + " values, got " +
                                std::to_string(values.size()));
  }
  Frame f{t, g, {}};
  f.pixels.reserve(values.size());
  for (const int v : values) {
    if (v < 0 || v > 255) {
      throw Error(Errc::InvalidParameter, "gray value " + std::to_string(v) + " outside [0, 255]");
    }
    f.pixels.push_back(static_cast<std::uint8_t>(v));
  }
  return f;
}

}  // namespace esi
