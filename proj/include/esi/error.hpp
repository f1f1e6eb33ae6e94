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

#ifndef ESI_ERROR_HPP
#define ESI_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace esi
{
enum class Errc {
  OutOfBounds,
  BadPolarity,
  NegativeInterval,
  InvalidParameter,
  ParseError,
  NonMonotoneTime,
  BadMagic,
  TruncatedFile,
  CountMismatch,
  IoError,
  SamplingTooCoarse,
  NonPositiveIntensity,
  GeometryMismatch,
};

std::string_view to_string(Errc code);

/// Library-wide exception. `position` carries the event index or the
/// 1-based line number when the failure can be pinned to one.
class Error : public std::runtime_error
{
public:
  Error(Errc code, const std::string & what, std::optional<std::size_t> position = std::nullopt)
  : std::runtime_error(std::string(to_string(code)) + ": " + what),
    code_(code),
    detail_(what),
    position_(position)
  {
  }

  Errc code() const noexcept { return code_; }
  const std::string & detail() const noexcept { return detail_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

private:
  Errc code_;
  std::string detail_;
  std::optional<std::size_t> position_;
};

}  // namespace esi

#endif  // ESI_ERROR_HPP
