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

#include "esi/decay.hpp"

#include <bit>
#include <cstdint>

namespace esi
{
void DecayParams::validate() const
{
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(Errc::InvalidParameter, "decay rate k must be > 0, got " + std::to_string(k));
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw Error(Errc::InvalidParameter, "decay exponent b must be > 0, got " + std::to_string(b));
  }
}

double decay_factor(double dt, const DecayParams & params)
{
  if (!(dt >= 0.0)) {
    throw Error(Errc::NegativeInterval, "decay interval " + std::to_string(dt) + " s is negative");
  }
  params.validate();
  return decay_factor_unchecked(dt, params);
}

bool StateMatrices::bit_identical(const StateMatrices & other) const
{
  if (geometry_ != other.geometry_ || pixels_.size() != other.pixels_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (
      std::bit_cast<std::uint64_t>(pixels_[i].s) != std::bit_cast<std::uint64_t>(other.pixels_[i].s) ||
      pixels_[i].t != other.pixels_[i].t) {
      return false;
    }
  }
  return true;
}

void throw_negative_interval(const Event & e, Timestamp last)
{
  throw Error(
    Errc::NegativeInterval, "event at t=" + std::to_string(e.t) + " us precedes last decay time " +
                              std::to_string(last) + " us of pixel (" + std::to_string(e.x) + ", " +
                              std::to_string(e.y) + ")");
}

void throw_invalid_event(const Event & e, Errc code)
{
  throw Error(
    code, "event (t=" + std::to_string(e.t) + ", x=" + std::to_string(e.x) +
            ", y=" + std::to_string(e.y) + ", p=" + std::to_string(e.p) + ")");
}

void peek_decayed_into(
  const StateMatrices & state, Timestamp t_now, const DecayParams & params, std::span<double> out)
{
  if (out.size() != state.size()) {
    throw Error(Errc::GeometryMismatch, "output buffer does not match state size");
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    const PixelState & px = state[i];
    if (t_now < px.t) {
      throw Error(
        Errc::NegativeInterval, "read time " + std::to_string(t_now) +
                                  " us precedes last decay time " + std::to_string(px.t) + " us");
    }
    out[i] = px.s == 0.0 ? 0.0 : px.s * decay_factor_unchecked(to_seconds(t_now - px.t), params);
  }
}

ValueMatrix peek_decayed(const StateMatrices & state, Timestamp t_now, const DecayParams & params)
{
  ValueMatrix m(state.geometry());
  peek_decayed_into(state, t_now, params, m.values);
  return m;
}

}  // namespace esi
