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

#ifndef ESI_DECAY_HPP
#define ESI_DECAY_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "esi/event.hpp"

namespace esi
{
/// Parameters of the polynomial decay d(t) = max{(1 - k t)^b, 0}.
/// k is in 1/s; a contribution is fully gone after the horizon 1/k.
struct DecayParams
{
  double k{2.5};
  double b{2.0};

  void validate() const;
  double horizon_seconds() const { return 1.0 / k; }
};

/// Residual weight after a gap of `dt` seconds. No argument checking; the
/// caller guarantees dt >= 0 and valid params.
inline double decay_factor_unchecked(double dt, const DecayParams & params)
{
  const double base = 1.0 - params.k * dt;
  if (base <= 0.0) {
    return 0.0;
  }
  // integer exponents are common enough to skip pow()
  if (params.b == 1.0) {
    return base;
  }
  if (params.b == 2.0) {
    return base * base;
  }
  return std::pow(base, params.b);
}

/// d(dt). Throws NegativeInterval for dt < 0 and InvalidParameter for bad params.
double decay_factor(double dt, const DecayParams & params);

/// Per-pixel accumulated value and the time it was last decayed.
struct PixelState
{
  double s{0.0};
  Timestamp t{0};
};

/// The accumulation matrix S and last-decay-time matrix T, stored
/// interleaved so an event touches a single cache line.
class StateMatrices
{
public:
  StateMatrices() = default;
  explicit StateMatrices(const SensorGeometry & g) : geometry_(g), pixels_(g.pixel_count()) {}

  const SensorGeometry & geometry() const { return geometry_; }
  std::size_t size() const { return pixels_.size(); }

  double s(std::uint16_t x, std::uint16_t y) const { return pixels_[geometry_.index(x, y)].s; }
  Timestamp t(std::uint16_t x, std::uint16_t y) const { return pixels_[geometry_.index(x, y)].t; }

  PixelState & operator[](std::size_t i) { return pixels_[i]; }
  const PixelState & operator[](std::size_t i) const { return pixels_[i]; }

  void reset() { std::fill(pixels_.begin(), pixels_.end(), PixelState{}); }

  /// True when every S and T entry is bit-for-bit equal.
  bool bit_identical(const StateMatrices & other) const;

private:
  SensorGeometry geometry_;
  std::vector<PixelState> pixels_;
};

[[noreturn]] void throw_negative_interval(const Event & e, Timestamp last);
[[noreturn]] void throw_invalid_event(const Event & e, Errc code);

/// One step of the lazy update, in this order:
///   S <- S + p*C;  dt <- t - T;  S <- S * d(dt);  T <- t.
/// The incoming contribution is itself decayed by its own arrival gap.
/// Returns a reference to the touched pixel.
inline PixelState & apply_event(
  StateMatrices & state, const Event & e, double threshold, const DecayParams & params)
{
  if (auto err = validate_event(e, state.geometry())) {
    throw_invalid_event(e, *err);
  }
  PixelState & px = state[state.geometry().index(e.x, e.y)];
  if (e.t < px.t) {
    throw_negative_interval(e, px.t);
  }
  px.s += e.p * threshold;
  px.s *= decay_factor_unchecked(to_seconds(e.t - px.t), params);
  px.t = e.t;
  return px;
}

/// S(x,y) * d(t_now - T(x,y)) for every pixel, leaving the state untouched.
/// Throws NegativeInterval if t_now precedes any T.
ValueMatrix peek_decayed(const StateMatrices & state, Timestamp t_now, const DecayParams & params);

/// Same as peek_decayed, writing into a caller-owned buffer of pixel_count() values.
void peek_decayed_into(
  const StateMatrices & state, Timestamp t_now, const DecayParams & params,
  std::span<double> out);

}  // namespace esi

#endif  // ESI_DECAY_HPP
