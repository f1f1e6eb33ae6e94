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

#include "esi/evio.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <sstream>
#include <string_view>

namespace esi::evio
{
namespace
{
// ---------------------------------------------------------------------------
// little-endian helpers

template <typename T>
void put_le(std::string & out, T v)
{
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(u & 0xFF));
    u = static_cast<U>(u >> 8);
  }
}

template <typename T>
T get_le(const unsigned char * p)
{
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u = static_cast<U>(u | (static_cast<U>(p[i]) << (8 * i)));
  }
  return static_cast<T>(u);
}

std::string encode_header(const SensorGeometry & g, std::uint64_t count)
{
  std::string out(kMagic, kMagic + sizeof(kMagic));
  put_le<std::uint16_t>(out, g.width);
  put_le<std::uint16_t>(out, g.height);
  put_le<std::uint64_t>(out, count);
  return out;
}

void encode_record(std::string & out, const Event & e)
{
  put_le<std::uint64_t>(out, e.t);
  put_le<std::uint16_t>(out, e.x);
  put_le<std::uint16_t>(out, e.y);
  put_le<std::int8_t>(out, e.p);
  out.append(3, '\0');
}

Event decode_record(const unsigned char * rec, const SensorGeometry & g, std::size_t index)
{
  Event e{
    get_le<std::uint64_t>(rec), get_le<std::uint16_t>(rec + 8), get_le<std::uint16_t>(rec + 10),
    get_le<std::int8_t>(rec + 12)};
  if (auto err = validate_event(e, g)) {
    throw Error(*err, "record " + std::to_string(index) + " is not a valid event", index);
  }
  return e;
}

struct Header
{
  SensorGeometry geometry;
  std::uint64_t count;
};

Header decode_header(const unsigned char * h)
{
  if (std::memcmp(h, kMagic, sizeof(kMagic)) != 0) {
    throw Error(Errc::BadMagic, "not an EVS1BIN event file");
  }
  Header out{{get_le<std::uint16_t>(h + 8), get_le<std::uint16_t>(h + 10)}, get_le<std::uint64_t>(h + 12)};
  if (!out.geometry.valid()) {
    throw Error(Errc::ParseError, "header declares an empty sensor");
  }
  return out;
}

void check_payload(std::uint64_t payload_bytes, std::uint64_t count)
{
  const std::uint64_t expected = count * kRecordSize;
  if (payload_bytes < expected) {
    throw Error(
      Errc::TruncatedFile, "header declares " + std::to_string(count) + " events but only " +
                             std::to_string(payload_bytes) + " payload bytes follow");
  }
  if (payload_bytes > expected) {
    throw Error(
      Errc::CountMismatch, "header declares " + std::to_string(count) + " events but " +
                             std::to_string(payload_bytes) + " payload bytes follow");
  }
}

std::ofstream open_out(const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open " + path.string());
  }
  return in;
}

void finish_write(std::ofstream & out, const std::filesystem::path & path)
{
  out.flush();
  if (!out) {
    throw Error(Errc::IoError, "write to " + path.string() + " failed");
  }
}

// ---------------------------------------------------------------------------
// CSV helpers

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_int(std::string_view s, T & out)
{
  s = trim(s);
  if (s.empty()) {
    return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_commas(std::string_view s)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      fields.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::optional<SensorGeometry> parse_geometry_comment(std::string_view line)
{
  line = trim(line.substr(1));
  const auto fields = split_commas(line);
  SensorGeometry g;
  if (fields.size() == 2 && parse_int(fields[0], g.width) && parse_int(fields[1], g.height) && g.valid()) {
    return g;
  }
  return std::nullopt;
}

[[noreturn]] void parse_error(std::size_t line, const std::string & why)
{
  throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + why, line);
}

Event parse_event_line(std::string_view line, std::size_t line_no)
{
  const auto fields = split_commas(line);
  if (fields.size() != 4) {
    parse_error(line_no, "expected 4 fields t_us,x,y,p");
  }
  Event e;
  int p = 0;
  if (!parse_int(fields[0], e.t)) {
    parse_error(line_no, "bad timestamp");
  }
  if (!parse_int(fields[1], e.x) || !parse_int(fields[2], e.y)) {
    parse_error(line_no, "bad coordinate");
  }
  if (!parse_int(fields[3], p) || (p != 1 && p != -1)) {
    parse_error(line_no, "polarity must be 1 or -1");
  }
  e.p = static_cast<std::int8_t>(p);
  return e;
}
}  // namespace

// ---------------------------------------------------------------------------
// CSV

CsvEventReader::CsvEventReader(const std::filesystem::path & path, bool strict_time)
: in_(open_in(path)), strict_(strict_time)
{
  std::string first;
  if (std::getline(in_, first)) {
    line_ = 1;
    const std::string_view v = trim(first);
    if (!v.empty() && v.front() == '#') {
      geometry_ = parse_geometry_comment(v);
    } else {
      pending_ = std::move(first);
    }
  }
}

std::vector<Event> CsvEventReader::read_chunk(std::size_t max_events)
{
  std::vector<Event> out;
  std::string line;
  while (out.size() < max_events) {
    std::size_t line_no = 0;
    if (pending_) {
      line = std::move(*pending_);
      pending_.reset();
      line_no = 1;
    } else if (std::getline(in_, line)) {
      line_no = ++line_;
    } else {
      break;
    }
    const std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') {
      continue;
    }
    Event e = parse_event_line(v, line_no);
    if (geometry_ && (e.x >= geometry_->width || e.y >= geometry_->height)) {
      throw Error(
        Errc::OutOfBounds, "line " + std::to_string(line_no) + ": event outside the declared sensor",
        line_no);
    }
    if (last_t_ && e.t < *last_t_) {
      if (strict_) {
        throw Error(
          Errc::NonMonotoneTime,
          "line " + std::to_string(line_no) + ": timestamp " + std::to_string(e.t) +
            " is earlier than " + std::to_string(*last_t_),
          line_no);
      }
      ++non_monotone_;
    }
    last_t_ = e.t;
    out.push_back(e);
  }
  return out;
}

CsvReadResult read_events_csv(const std::filesystem::path & path, bool strict_time)
{
  CsvEventReader reader(path, strict_time);
  CsvReadResult result;
  for (auto chunk = reader.read_chunk(1 << 16); !chunk.empty(); chunk = reader.read_chunk(1 << 16)) {
    result.batch.events.insert(result.batch.events.end(), chunk.begin(), chunk.end());
  }
  result.geometry = reader.geometry();
  result.non_monotone = reader.non_monotone();
  return result;
}

void write_events_csv(
  const std::filesystem::path & path, const EventBatch & batch, std::optional<SensorGeometry> geometry)
{
  std::ofstream out = open_out(path);
  std::string buf;
  if (geometry) {
    buf += "# " + std::to_string(geometry->width) + "," + std::to_string(geometry->height) + "\n";
  }
  for (const Event & e : batch.events) {
    buf += std::to_string(e.t);
    buf += ',';
    buf += std::to_string(e.x);
    buf += ',';
    buf += std::to_string(e.y);
    buf += ',';
    buf += std::to_string(static_cast<int>(e.p));
    buf += '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish_write(out, path);
}

// ---------------------------------------------------------------------------
// binary

void write_events_bin(
  const std::filesystem::path & path, const EventBatch & batch, const SensorGeometry & geometry)
{
  std::string buf = encode_header(geometry, batch.size());
  buf.reserve(kHeaderSize + batch.size() * kRecordSize);
  for (const Event & e : batch.events) {
    encode_record(buf, e);
  }
  std::ofstream out = open_out(path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish_write(out, path);
}

BinaryFile read_events_bin(const std::filesystem::path & path)
{
  std::ifstream in = open_in(path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < kHeaderSize) {
    if (bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
      throw Error(Errc::BadMagic, "not an EVS1BIN event file");
    }
    throw Error(Errc::TruncatedFile, "file shorter than the 20-byte header");
  }
  const auto * data = reinterpret_cast<const unsigned char *>(bytes.data());
  const Header h = decode_header(data);
  check_payload(bytes.size() - kHeaderSize, h.count);
  BinaryFile out{h.geometry, {}};
  out.batch.events.reserve(h.count);
  for (std::uint64_t i = 0; i < h.count; ++i) {
    out.batch.events.push_back(decode_record(data + kHeaderSize + i * kRecordSize, h.geometry, i));
  }
  return out;
}

BinaryEventReader::BinaryEventReader(const std::filesystem::path & path) : in_(open_in(path))
{
  const auto size = std::filesystem::file_size(path);
  std::array<unsigned char, kHeaderSize> header{};
  in_.read(reinterpret_cast<char *>(header.data()), kHeaderSize);
  if (size < kHeaderSize || !in_) {
    throw Error(Errc::TruncatedFile, "file shorter than the 20-byte header");
  }
  const Header h = decode_header(header.data());
  check_payload(size - kHeaderSize, h.count);
  geometry_ = h.geometry;
  count_ = h.count;
}

std::vector<Event> BinaryEventReader::read_chunk(std::size_t max_events)
{
  const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(max_events, remaining()));
  std::vector<unsigned char> raw(n * kRecordSize);
  in_.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in_) {
    throw Error(Errc::TruncatedFile, "unexpected end of event payload");
  }
  std::vector<Event> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(decode_record(raw.data() + i * kRecordSize, geometry_, consumed_ + i));
  }
  consumed_ += n;
  return out;
}

// ---------------------------------------------------------------------------
// PGM

std::string encode_pgm(const Frame & frame)
{
  std::string out = "P5\n" + std::to_string(frame.geometry.width) + " " +
                    std::to_string(frame.geometry.height) + "\n255\n";
  out.append(frame.pixels.begin(), frame.pixels.end());
  return out;
}

void write_frame_pgm(const Frame & frame, const std::filesystem::path & path)
{
  if (frame.pixels.size() != frame.geometry.pixel_count()) {
    throw Error(Errc::InvalidParameter, "frame pixel count does not match its geometry");
  }
  const std::string bytes = encode_pgm(frame);
  std::ofstream out = open_out(path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  finish_write(out, path);
}

Frame read_frame_pgm(const std::filesystem::path & path)
{
  std::ifstream in = open_in(path);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P5" || maxval != 255 || w < 1 || h < 1 || w > 65535 || h > 65535) {
    throw Error(Errc::ParseError, path.string() + " is not an 8-bit binary PGM");
  }
  in.get();  // single whitespace after maxval
  Frame f{0, SensorGeometry{static_cast<std::uint16_t>(w), static_cast<std::uint16_t>(h)}, {}};
  f.pixels.resize(f.geometry.pixel_count());
  in.read(reinterpret_cast<char *>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
  if (!in) {
    throw Error(Errc::TruncatedFile, path.string() + " has a short pixel payload");
  }
  return f;
}

}  // namespace esi::evio
