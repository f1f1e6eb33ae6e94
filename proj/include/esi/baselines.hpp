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

#ifndef ESI_BASELINES_HPP
#define ESI_BASELINES_HPP

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "esi/reconstructor.hpp"

namespace esi
{
// Simplified events-only comparison methods. None of them reproduces a
// particular third-party implementation; they isolate the choice of decay
// family against the polynomial decay of EsiReconstructor.

/// Plain running sum S <- S + p*C with no decay. Clamping happens only when
/// rendering, so S itself is unbounded.
class NaiveIntegrator : public Reconstructor
{
public:
  struct Params
  {
    double threshold{0.15};
    double s_min{-1.5};
    double s_max{1.5};
    double frame_rate{100.0};
  };

  NaiveIntegrator(
    const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin = std::nullopt);

  std::string_view name() const override { return "naive"; }
  const ValueMatrix & sum() const { return sum_; }

protected:
  void integrate(std::span<const Event> events, std::size_t first_index) override;
  void read_values(Timestamp t, std::span<double> out) const override;
  void clear_state() override;

private:
  Params params_;
  ValueMatrix sum_;
};

/// exp(-lambda * dt), the residual of a conventional exponential decay.
inline double exp_decay_factor(double dt, double lambda) { return std::exp(-lambda * dt); }

/// Same loop shape as ESI (add, decay by the arrival gap, clamp) with the
/// polynomial replaced by exp(-lambda * dt).
class ExpDecayAccumulator : public Reconstructor
{
public:
  struct Params
  {
    double threshold{0.15};
    double lambda{2.5};
    double s_min{-1.5};
    double s_max{1.5};
    double frame_rate{100.0};
  };

  ExpDecayAccumulator(
    const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin = std::nullopt);

  std::string_view name() const override { return "expdecay"; }
  const StateMatrices & state() const { return state_; }

protected:
  void integrate(std::span<const Event> events, std::size_t first_index) override;
  void read_values(Timestamp t, std::span<double> out) const override;
  void clear_state() override { state_.reset(); }

private:
  Params params_;
  StateMatrices state_;
};

/// Events-only complementary filter with a fixed gain: the estimate relaxes
/// toward 0 between events and each event adds p*C after the relaxation.
class ComplementaryFilter : public Reconstructor
{
public:
  struct Params
  {
    double threshold{0.15};
    double alpha{2.5};
    double s_min{-1.5};
    double s_max{1.5};
    double frame_rate{100.0};
  };

  ComplementaryFilter(
    const SensorGeometry & g, const Params & params, std::optional<Timestamp> origin = std::nullopt);

  std::string_view name() const override { return "compfilter"; }
  const StateMatrices & state() const { return state_; }

protected:
  void integrate(std::span<const Event> events, std::size_t first_index) override;
  void read_values(Timestamp t, std::span<double> out) const override;
  void clear_state() override { state_.reset(); }

private:
  Params params_;
  StateMatrices state_;
};

/// Everything needed to build any of the methods.
struct MethodConfig
{
  EsiParams esi;
  double lambda{2.5};
  double alpha{2.5};
  std::optional<Timestamp> origin;
};

/// Names accepted by make_reconstructor, in display order.
const std::vector<std::string> & method_names();

/// Builds "esi", "naive", "expdecay" or "compfilter". Threshold, bounds and
/// frame rate are shared across methods. Throws InvalidParameter on an
/// unknown name.
std::unique_ptr<Reconstructor> make_reconstructor(
  std::string_view method, const MethodConfig & config, const SensorGeometry & g);

}  // namespace esi

#endif  // ESI_BASELINES_HPP
