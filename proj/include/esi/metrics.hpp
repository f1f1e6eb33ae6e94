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

#ifndef ESI_METRICS_HPP
#define ESI_METRICS_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esi/event.hpp"

namespace esi::metrics
{
/// Scale- and offset-invariant comparison of a frame against a log-intensity
/// field. Both scores are missing when either image is constant.
struct FrameScore
{
  Timestamp t{0};
  std::optional<double> pearson;
  std::optional<double> mse_norm;
};

/// Pearson correlation of two equally sized samples; nullopt if either has
/// zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

/// Mean squared difference after normalizing each sample to zero mean and
/// unit variance; nullopt if either has zero variance.
std::optional<double> normalized_mse(std::span<const double> a, std::span<const double> b);

/// Throws GeometryMismatch when the frame and field shapes differ.
FrameScore score_frame(const Frame & recon, const ValueMatrix & truth);

struct RunSummary
{
  std::size_t scored{0};
  std::size_t missing{0};
  std::optional<double> mean_pearson;
  std::optional<double> min_pearson;
  std::optional<double> mean_mse_norm;
};

struct RunScores
{
  std::vector<FrameScore> frames;
  RunSummary summary;
};

/// Ground-truth log intensity at a frame timestamp.
using TruthProvider = std::function<ValueMatrix(Timestamp)>;

RunScores score_run(std::span<const Frame> frames, const TruthProvider & truth);

/// "t_us,pearson,mse_norm" with an empty field for a missing score.
std::string to_csv(std::span<const FrameScore> scores, bool header = true);

}  // namespace esi::metrics

#endif  // ESI_METRICS_HPP
