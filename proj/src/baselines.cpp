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

#include "esi/baselines.hpp"

#include <algorithm>
#include <string>

namespace esi
{
namespace
{
void check_positive(double v, const char * what)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(Errc::InvalidParameter, std::string(what) + " must be > 0, got " + std::to_string(v));
  }
}

// Shared by the two decaying baselines: validates, then returns the pixel.
PixelState & checked_pixel(StateMatrices & state, const Event & e)
{
  if (auto err = validate_event(e, state.geometry())) {
    throw_invalid_event(e, *err);
  }
  PixelState & px = state[state.geometry().index(e.x, e.y)];
  if (e.t < px.t) {
    throw_negative_interval(e, px.t);
  }
  return px;
}
}  // namespace

// ---------------------------------------------------------------------------
// naive

NaiveIntegrator::NaiveIntegrator(
  const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin)
: Reconstructor(g, params.s_min, params.s_max, FrameSchedule{params.frame_rate, origin}),
  params_(params),
  sum_(g)
{
  check_positive(params.threshold, "threshold");
}

void NaiveIntegrator::integrate(std::span<const Event> events, std::size_t first_index)
{
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event & e = events[i];
    if (auto err = validate_event(e, geometry())) {
      const std::size_t index = first_index + i;
      throw Error(*err, "invalid event (event index " + std::to_string(index) + ")", index);
    }
    sum_.values[geometry().index(e.x, e.y)] += e.p * params_.threshold;
  }
}

void NaiveIntegrator::read_values(Timestamp, std::span<double> out) const
{
  std::copy(sum_.values.begin(), sum_.values.end(), out.begin());
}

void NaiveIntegrator::clear_state() { std::fill(sum_.values.begin(), sum_.values.end(), 0.0); }

// ---------------------------------------------------------------------------
// exponential decay

ExpDecayAccumulator::ExpDecayAccumulator(
  const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin)
: Reconstructor(g, params.s_min, params.s_max, FrameSchedule{params.frame_rate, origin}),
  params_(params),
  state_(g)
{
  check_positive(params.threshold, "threshold");
  check_positive(params.lambda, "lambda");
}

void ExpDecayAccumulator::integrate(std::span<const Event> events, std::size_t first_index)
{
  std::size_t i = 0;
  try {
    for (; i < events.size(); ++i) {
      const Event & e = events[i];
      PixelState & px = checked_pixel(state_, e);
      px.s += e.p * params_.threshold;
      px.s *= exp_decay_factor(to_seconds(e.t - px.t), params_.lambda);
      px.t = e.t;
      px.s = clamp(px.s, params_.s_min, params_.s_max);
    }
  } catch (const Error & err) {
    rethrow_at(err, first_index + i);
  }
}

void ExpDecayAccumulator::read_values(Timestamp t, std::span<double> out) const
{
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const PixelState & px = state_[i];
    if (t < px.t) {
      throw Error(Errc::NegativeInterval, "read time precedes last decay time");
    }
    out[i] = px.s == 0.0 ? 0.0 : px.s * exp_decay_factor(to_seconds(t - px.t), params_.lambda);
  }
}

// ---------------------------------------------------------------------------
// complementary filter

ComplementaryFilter::ComplementaryFilter(
  const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin)
: Reconstructor(g, params.s_min, params.s_max, FrameSchedule{params.frame_rate, origin}),
  params_(params),
  state_(g)
{
  check_positive(params.threshold, "threshold");
  check_positive(params.alpha, "alpha");
}

void ComplementaryFilter::integrate(std::span<const Event> events, std::size_t first_index)
{
  std::size_t i = 0;
  try {
    for (; i < events.size(); ++i) {
      const Event & e = events[i];
      PixelState & px = checked_pixel(state_, e);
      px.s = px.s * exp_decay_factor(to_seconds(e.t - px.t), params_.alpha) + e.p * params_.threshold;
      px.t = e.t;
    }
  } catch (const Error & err) {
    rethrow_at(err, first_index + i);
  }
}

void ComplementaryFilter::read_values(Timestamp t, std::span<double> out) const
{
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const PixelState & px = state_[i];
    if (t < px.t) {
      throw Error(Errc::NegativeInterval, "read time precedes last filter update");
    }
    out[i] = px.s == 0.0 ? 0.0 : px.s * exp_decay_factor(to_seconds(t - px.t), params_.alpha);
  }
}

// ---------------------------------------------------------------------------

const std::vector<std::string> & method_names()
{
  static const std::vector<std::string> names{"esi", "naive", "expdecay", "compfilter"};
  return names;
}

std::unique_ptr<Reconstructor> make_reconstructor(
  std::string_view method, const MethodConfig & config, const SensorGeometry & g)
{
  const EsiParams & p = config.esi;
  if (method == "esi") {
    return std::make_unique<EsiReconstructor>(g, p, config.origin);
  }
  if (method == "naive") {
    return std::make_unique<NaiveIntegrator>(
      g, NaiveIntegrator::Params{p.threshold, p.s_min, p.s_max, p.frame_rate}, config.origin);
  }
  if (method == "expdecay") {
    return std::make_unique<ExpDecayAccumulator>(
      g, ExpDecayAccumulator::Params{p.threshold, config.lambda, p.s_min, p.s_max, p.frame_rate},
      config.origin);
  }
  if (method == "compfilter") {
    return std::make_unique<ComplementaryFilter>(
      g, ComplementaryFilter::Params{p.threshold, config.alpha, p.s_min, p.s_max, p.frame_rate},
      config.origin);
  }
  std::string valid;
  for (const auto & n : method_names()) {
    valid += (valid.empty() ? "" : ", ") + n;
  }
  throw Error(
    Errc::InvalidParameter, "unknown method '" + std::string(method) + "' (valid: " + valid + ")");
}

}  // namespace esi
