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

#include "esi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace esi::synth
{
namespace
{
Timestamp to_micros(double seconds) { return static_cast<Timestamp>(std::llround(seconds * 1e6)); }

std::vector<double> log_ramp(const SceneSpec & scene)
{
  const int w = scene.geometry.width;
  std::vector<double> out(w);
  for (int x = 0; x < w; ++x) {
    const double frac = w > 1 ? static_cast<double>(x) / (w - 1) : 0.0;
    out[x] = std::log(scene.ramp_min + (scene.ramp_max - scene.ramp_min) * frac);
  }
  return out;
}

// Fills `field` and `inside` at time t using the precomputed ramp.
void render_into(
  const SceneSpec & scene, const std::vector<double> & ramp, double log_reflectivity, double t,
  std::vector<double> & field, std::vector<std::uint8_t> & inside)
{
  const SensorGeometry & g = scene.geometry;
  const double cx = scene.center_x_at(t);
  const double cy = scene.circle.center_y;
  const double r2 = scene.circle.radius * scene.circle.radius;
  const double illumination = scene.illumination_rate * t;
  for (std::uint16_t y = 0; y < g.height; ++y) {
    const double dy = y - cy;
    for (std::uint16_t x = 0; x < g.width; ++x) {
      const double dx = x - cx;
      const bool in = dx * dx + dy * dy <= r2;
      const std::size_t i = g.index(x, y);
      inside[i] = in;
      field[i] = ramp[x] + (in ? log_reflectivity : 0.0) + illumination;
    }
  }
}

void append_poisson(
  std::vector<Event> & out, std::mt19937_64 & rng, std::uint16_t x, std::uint16_t y, double rate,
  double duration, std::int8_t fixed_polarity)
{
  if (rate <= 0.0) {
    return;
  }
  std::exponential_distribution<double> gap(rate);
  std::bernoulli_distribution coin(0.5);
  for (double t = gap(rng); t <= duration; t += gap(rng)) {
    const std::int8_t p = fixed_polarity != 0 ? fixed_polarity : (coin(rng) ? 1 : -1);
    out.push_back(Event{to_micros(t), x, y, p});
  }
}

void sort_by_time(std::vector<Event> & events)
{
  std::stable_sort(
    events.begin(), events.end(), [](const Event & a, const Event & b) { return a.t < b.t; });
}
}  // namespace

void SceneSpec::validate() const
{
  if (!geometry.valid()) {
    throw Error(Errc::InvalidParameter, "scene geometry must be at least 1x1");
  }
  if (!(ramp_min > 0.0) || !(ramp_max > 0.0)) {
    throw Error(Errc::NonPositiveIntensity, "background ramp intensities must be > 0");
  }
  if (!(circle.reflectivity > 0.0)) {
    throw Error(Errc::NonPositiveIntensity, "circle reflectivity must be > 0");
  }
  if (circle.reflectivity > 1.0) {
    throw Error(Errc::InvalidParameter, "circle reflectivity must be <= 1");
  }
  if (!(circle.radius >= 0.0)) {
    throw Error(Errc::InvalidParameter, "circle radius must be >= 0");
  }
  if (!(duration > 0.0)) {
    throw Error(Errc::InvalidParameter, "duration must be > 0");
  }
  if (!(stationary_lead >= 0.0)) {
    throw Error(Errc::InvalidParameter, "stationary lead time must be >= 0");
  }
  if (!std::isfinite(illumination_rate) || !std::isfinite(circle.velocity)) {
    throw Error(Errc::InvalidParameter, "scene rates must be finite");
  }
}

double SceneSpec::center_x_at(double t) const
{
  return circle.center_x + circle.velocity * std::max(0.0, t - stationary_lead);
}

bool SceneSpec::inside_circle(std::uint16_t x, std::uint16_t y, double t) const
{
  const double dx = x - center_x_at(t);
  const double dy = y - circle.center_y;
  return dx * dx + dy * dy <= circle.radius * circle.radius;
}

void NoiseSpec::validate(const SensorGeometry & g) const
{
  if (!(background_rate >= 0.0)) {
    throw Error(Errc::InvalidParameter, "background noise rate must be >= 0");
  }
  for (const auto & hp : hot_pixels) {
    if (hp.x >= g.width || hp.y >= g.height) {
      throw Error(
        Errc::OutOfBounds,
        "hot pixel (" + std::to_string(hp.x) + ", " + std::to_string(hp.y) + ") is off the sensor");
    }
    if (!(hp.rate >= 0.0)) {
      throw Error(Errc::InvalidParameter, "hot pixel rate must be >= 0");
    }
    if (hp.polarity != 1 && hp.polarity != -1) {
      throw Error(Errc::BadPolarity, "hot pixel polarity must be +1 or -1");
    }
  }
}

ValueMatrix render_log_intensity(const SceneSpec & scene, double t)
{
  scene.validate();
  ValueMatrix m(scene.geometry);
  std::vector<std::uint8_t> inside(scene.geometry.pixel_count());
  render_into(scene, log_ramp(scene), std::log(scene.circle.reflectivity), t, m.values, inside);
  return m;
}

std::vector<ValueMatrix> replay_ground_truth(const SceneSpec & scene, std::span<const double> times)
{
  std::vector<ValueMatrix> out;
  out.reserve(times.size());
  for (const double t : times) {
    out.push_back(render_log_intensity(scene, t));
  }
  return out;
}

EventBatch generate_noise(const SensorGeometry & g, const NoiseSpec & noise, double duration)
{
  noise.validate(g);
  std::mt19937_64 rng(noise.seed);
  std::vector<Event> events;
  if (noise.background_rate > 0.0) {
    events.reserve(static_cast<std::size_t>(noise.background_rate * duration * g.pixel_count() * 1.1));
    for (std::uint16_t y = 0; y < g.height; ++y) {
      for (std::uint16_t x = 0; x < g.width; ++x) {
        append_poisson(events, rng, x, y, noise.background_rate, duration, 0);
      }
    }
  }
  for (const auto & hp : noise.hot_pixels) {
    append_poisson(events, rng, hp.x, hp.y, hp.rate, duration, hp.polarity);
  }
  sort_by_time(events);
  return EventBatch{std::move(events)};
}

EventBatch generate_events(
  const SceneSpec & scene, const TriggerModel & trigger, const NoiseSpec & noise, double dt_sample)
{
  scene.validate();
  const double c = trigger.contrast;
  if (!(c > 0.0)) {
    throw Error(Errc::InvalidParameter, "contrast threshold must be > 0");
  }
  if (!(dt_sample > 0.0)) {
    throw Error(Errc::InvalidParameter, "sample interval must be > 0");
  }
  noise.validate(scene.geometry);

  const SensorGeometry & g = scene.geometry;
  const std::size_t n_px = g.pixel_count();
  const std::vector<double> ramp = log_ramp(scene);
  const double log_refl = std::log(scene.circle.reflectivity);

  std::vector<double> prev(n_px), next(n_px);
  std::vector<std::uint8_t> prev_in(n_px), next_in(n_px);
  render_into(scene, ramp, log_refl, 0.0, prev, prev_in);
  std::vector<double> reference = prev;

  std::vector<Event> events;
  const auto n_samples = static_cast<std::uint64_t>(std::ceil(scene.duration / dt_sample - 1e-9));
  Timestamp t_prev_us = 0;
  for (std::uint64_t k = 1; k <= n_samples; ++k) {
    const double t = std::min(static_cast<double>(k) * dt_sample, scene.duration);
    const Timestamp t_us = to_micros(t);
    render_into(scene, ramp, log_refl, t, next, next_in);
    const double span_us = static_cast<double>(t_us - t_prev_us);
    for (std::size_t i = 0; i < n_px; ++i) {
      const double delta = next[i] - prev[i];
      if (delta == 0.0) {
        continue;
      }
      // Disc edges are step discontinuities; only smooth change is bounded.
      if (prev_in[i] == next_in[i] && std::abs(delta) >= 2.0 * c) {
        throw Error(
          Errc::SamplingTooCoarse, "log intensity changed by " + std::to_string(delta) +
                                     " in one sample of " + std::to_string(dt_sample) +
                                     " s; reduce the sample interval");
      }
      const auto x = static_cast<std::uint16_t>(i % g.width);
      const auto y = static_cast<std::uint16_t>(i / g.width);
      const std::int8_t p = delta > 0.0 ? 1 : -1;
      const double step = p * c;
      while (p * (next[i] - reference[i]) >= c) {
        reference[i] += step;
        const double frac = std::clamp((reference[i] - prev[i]) / delta, 0.0, 1.0);
        events.push_back(
          Event{t_prev_us + static_cast<Timestamp>(std::llround(frac * span_us)), x, y, p});
      }
    }
    std::swap(prev, next);
    std::swap(prev_in, next_in);
    t_prev_us = t_us;
  }

  EventBatch noise_events = generate_noise(g, noise, scene.duration);
  events.insert(events.end(), noise_events.events.begin(), noise_events.events.end());
  sort_by_time(events);
  return EventBatch{std::move(events)};
}

}  // namespace esi::synth
