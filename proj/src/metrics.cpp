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

#include "esi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace esi::metrics
{
namespace
{
struct Moments
{
  double mean{0.0};
  double sd{0.0};
};

// Two-pass mean / population standard deviation.
Moments moments(std::span<const double> v)
{
  Moments m;
  if (v.empty()) {
    return m;
  }
  double sum = 0.0;
  for (const double x : v) {
    sum += x;
  }
  m.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (const double x : v) {
    ss += (x - m.mean) * (x - m.mean);
  }
  m.sd = std::sqrt(ss / static_cast<double>(v.size()));
  return m;
}

bool degenerate(const Moments & m, std::span<const double> v)
{
  // relative test so that rounding noise on a constant image still counts as constant
  return !(m.sd > 1e-12 * std::max(1.0, std::abs(m.mean))) || v.empty();
}

void check_sizes(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) {
    throw Error(Errc::GeometryMismatch, "samples differ in size");
  }
}

std::string format_optional(const std::optional<double> & v)
{
  if (!v) {
    return "";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", *v);
  return buf;
}
}  // namespace

std::optional<double> pearson(std::span<const double> a, std::span<const double> b)
{
  check_sizes(a, b);
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  if (degenerate(ma, a) || degenerate(mb, b)) {
    return std::nullopt;
  }
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma.mean) * (b[i] - mb.mean);
  }
  cov /= static_cast<double>(a.size());
  return std::clamp(cov / (ma.sd * mb.sd), -1.0, 1.0);
}

std::optional<double> normalized_mse(std::span<const double> a, std::span<const double> b)
{
  check_sizes(a, b);
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  if (degenerate(ma, a) || degenerate(mb, b)) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = (a[i] - ma.mean) / ma.sd - (b[i] - mb.mean) / mb.sd;
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

FrameScore score_frame(const Frame & recon, const ValueMatrix & truth)
{
  if (recon.geometry != truth.geometry || recon.pixels.size() != truth.values.size()) {
    throw Error(Errc::GeometryMismatch, "frame and ground truth have different shapes");
  }
  const std::vector<double> r(recon.pixels.begin(), recon.pixels.end());
  return FrameScore{recon.t_emit, pearson(r, truth.values), normalized_mse(r, truth.values)};
}

RunScores score_run(std::span<const Frame> frames, const TruthProvider & truth)
{
  RunScores out;
  double sum_p = 0.0;
  double sum_mse = 0.0;
  for (const Frame & f : frames) {
    FrameScore s = score_frame(f, truth(f.t_emit));
    if (s.pearson) {
      ++out.summary.scored;
      sum_p += *s.pearson;
      sum_mse += *s.mse_norm;
      out.summary.min_pearson = std::min(out.summary.min_pearson.value_or(1.0), *s.pearson);
    } else {
      ++out.summary.missing;
    }
    out.frames.push_back(s);
  }
  if (out.summary.scored > 0) {
    out.summary.mean_pearson = sum_p / static_cast<double>(out.summary.scored);
    out.summary.mean_mse_norm = sum_mse / static_cast<double>(out.summary.scored);
  }
  return out;
}

std::string to_csv(std::span<const FrameScore> scores, bool header)
{
  std::string out = header ? "t_us,pearson,mse_norm\n" : "";
  for (const auto & s : scores) {
    out += std::to_string(s.t) + "," + format_optional(s.pearson) + "," +
           format_optional(s.mse_norm) + "\n";
  }
  return out;
}

}  // namespace esi::metrics
