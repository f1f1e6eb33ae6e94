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

#ifndef ESI_SYNTH_HPP
#define ESI_SYNTH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "esi/event.hpp"

namespace esi::synth
{
/// A dark disc sliding along x over a horizontal intensity ramp.
struct CircleSpec
{
  double radius{18.0};        // px
  double reflectivity{0.3};   // fraction of the background that the disc returns
  double center_x{104.0};     // px, at t = 0
  double center_y{64.0};      // px
  double velocity{-60.0};     // px/s along x
};

struct SceneSpec
{
  SensorGeometry geometry{128, 128};
  double ramp_min{0.1};  // linear intensity at x = 0
  double ramp_max{1.0};  // linear intensity at x = width - 1
  CircleSpec circle;
  double duration{2.5};         // s
  double stationary_lead{0.5};  // s before the disc starts moving
  // Global brightening in log units per second. 0 keeps the scene static
  // apart from the disc.
  double illumination_rate{0.0};

  void validate() const;
  /// Disc center x at time t (seconds).
  double center_x_at(double t) const;
  /// True if the pixel center (x, y) lies within the disc at time t.
  bool inside_circle(std::uint16_t x, std::uint16_t y, double t) const;
};

struct TriggerModel
{
  double contrast{0.15};  // log-intensity step per event
};

struct HotPixel
{
  std::uint16_t x{0};
  std::uint16_t y{0};
  double rate{0.0};  // events/s
  std::int8_t polarity{1};
};

struct NoiseSpec
{
  double background_rate{0.0};  // events / pixel / s, random polarity
  std::vector<HotPixel> hot_pixels;
  std::uint64_t seed{1};

  void validate(const SensorGeometry & g) const;
};

/// Log intensity L(x, y, t) of the scene.
ValueMatrix render_log_intensity(const SceneSpec & scene, double t);

/// render_log_intensity at each requested time.
std::vector<ValueMatrix> replay_ground_truth(const SceneSpec & scene, std::span<const double> times);

/// Samples the scene every `dt_sample` seconds and fires events whenever a
/// pixel's log intensity moves a full contrast step away from its reference
/// level; the reference then steps by one contrast per event. Event times are
/// interpolated linearly inside the sample interval at 1 us resolution.
/// Background and hot-pixel noise from `noise` are merged in time order.
///
/// Throws SamplingTooCoarse when a smooth (non-edge) per-sample change reaches
/// 2 contrast steps, NonPositiveIntensity for a non-positive scene intensity.
EventBatch generate_events(
  const SceneSpec & scene, const TriggerModel & trigger, const NoiseSpec & noise,
  double dt_sample = 1e-3);

/// Noise events alone over [0, duration], time-ordered.
EventBatch generate_noise(const SensorGeometry & g, const NoiseSpec & noise, double duration);

}  // namespace esi::synth

#endif  // ESI_SYNTH_HPP
