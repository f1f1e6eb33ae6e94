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

#ifndef ESI_EVIO_HPP
#define ESI_EVIO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "esi/event.hpp"

// File formats
// ------------
// CSV:    optional first line "# width,height", then one "t_us,x,y,p" per line
//         with p in {1, -1}.
// Binary: 20-byte header  magic "EVS1BIN\0" | width u16 | height u16 | count u64
//         then `count` 16-byte records  t u64 | x u16 | y u16 | p i8 | 3 zero bytes.
//         All integers little-endian.
// PGM:    "P5\n<w> <h>\n255\n" followed by w*h row-major bytes.

namespace esi::evio
{
constexpr std::size_t kHeaderSize = 20;
constexpr std::size_t kRecordSize = 16;
constexpr char kMagic[8] = {'E', 'V', 'S', '1', 'B', 'I', 'N', '\0'};

struct CsvReadResult
{
  std::optional<SensorGeometry> geometry;
  EventBatch batch;
  /// Events whose timestamp went backwards (only counted when not strict).
  std::size_t non_monotone{0};
};

/// Parses a CSV event file. With `strict_time`, a timestamp smaller than its
/// predecessor raises NonMonotoneTime; otherwise it is counted and kept.
CsvReadResult read_events_csv(const std::filesystem::path & path, bool strict_time = false);
void write_events_csv(
  const std::filesystem::path & path, const EventBatch & batch,
  std::optional<SensorGeometry> geometry = std::nullopt);

struct BinaryFile
{
  SensorGeometry geometry;
  EventBatch batch;
};

BinaryFile read_events_bin(const std::filesystem::path & path);
void write_events_bin(
  const std::filesystem::path & path, const EventBatch & batch, const SensorGeometry & geometry);

/// Incremental reader over a binary event file.
class BinaryEventReader
{
public:
  explicit BinaryEventReader(const std::filesystem::path & path);

  const SensorGeometry & geometry() const { return geometry_; }
  std::uint64_t event_count() const { return count_; }
  std::uint64_t remaining() const { return count_ - consumed_; }

  /// Up to `max_events` further events; empty once the file is exhausted.
  std::vector<Event> read_chunk(std::size_t max_events);

private:
  std::ifstream in_;
  SensorGeometry geometry_;
  std::uint64_t count_{0};
  std::uint64_t consumed_{0};
};

/// Incremental reader over a CSV event file.
class CsvEventReader
{
public:
  explicit CsvEventReader(const std::filesystem::path & path, bool strict_time = false);

  const std::optional<SensorGeometry> & geometry() const { return geometry_; }
  std::size_t non_monotone() const { return non_monotone_; }
  std::vector<Event> read_chunk(std::size_t max_events);

private:
  std::ifstream in_;
  bool strict_;
  std::optional<SensorGeometry> geometry_;
  std::size_t line_{0};
  std::size_t non_monotone_{0};
  std::optional<Timestamp> last_t_;
  std::optional<std::string> pending_;
};

/// Encodes a frame as binary PGM bytes.
std::string encode_pgm(const Frame & frame);
void write_frame_pgm(const Frame & frame, const std::filesystem::path & path);
/// Reads a binary PGM with maxval 255; t_emit of the result is 0.
Frame read_frame_pgm(const std::filesystem::path & path);

}  // namespace esi::evio

#endif  // ESI_EVIO_HPP
