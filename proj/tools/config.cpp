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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace esi::cli
{
namespace
{
std::string trim(const std::string & s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double to_double(const std::string & key, const std::string & v)
{
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

double to_positive(const std::string & key, const std::string & v)
{
  const double d = to_double(key, v);
  if (!(d > 0.0)) {
    throw ConfigError(key, "must be > 0, got '" + v + "'");
  }
  return d;
}

double to_non_negative(const std::string & key, const std::string & v)
{
  const double d = to_double(key, v);
  if (!(d >= 0.0)) {
    throw ConfigError(key, "must be >= 0, got '" + v + "'");
  }
  return d;
}

std::uint64_t to_uint(const std::string & key, const std::string & v)
{
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint16_t to_dimension(const std::string & key, const std::string & v)
{
  const std::uint64_t d = to_uint(key, v);
  if (d < 1 || d > 65535) {
    throw ConfigError(key, "must be in [1, 65535], got '" + v + "'");
  }
  return static_cast<std::uint16_t>(d);
}

bool to_bool(const std::string & key, const std::string & v)
{
  if (v == "1" || v == "true" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "0" || v == "false" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> to_methods(const std::string & key, const std::string & v)
{
  auto names = split(v, ',');
  for (const auto & n : names) {
    const auto & valid = method_names();
    if (n != "noop" && std::find(valid.begin(), valid.end(), n) == valid.end()) {
      throw ConfigError(key, "unknown method '" + n + "'");
    }
  }
  return names;
}

// "x:y:rate:polarity;x:y:rate:polarity"
std::vector<synth::HotPixel> to_hot_pixels(const std::string & key, const std::string & v)
{
  std::vector<synth::HotPixel> out;
  for (const auto & item : split(v, ';')) {
    const auto f = split(item, ':');
    if (f.size() != 4) {
      throw ConfigError(key, "expected x:y:rate:polarity, got '" + item + "'");
    }
    synth::HotPixel hp;
    const auto x = to_uint(key, f[0]);
    const auto y = to_uint(key, f[1]);
    if (x > 65535 || y > 65535) {
      throw ConfigError(key, "coordinate out of range in '" + item + "'");
    }
    hp.x = static_cast<std::uint16_t>(x);
    hp.y = static_cast<std::uint16_t>(y);
    hp.rate = to_non_negative(key, f[2]);
    const double p = to_double(key, f[3]);
    if (p != 1.0 && p != -1.0) {
      throw ConfigError(key, "hot pixel polarity must be 1 or -1 in '" + item + "'");
    }
    hp.polarity = static_cast<std::int8_t>(p);
    out.push_back(hp);
  }
  return out;
}

using Setter = std::function<void(Config &, const std::string &, const std::string &)>;

const std::map<std::string, Setter> & setters()
{
  static const std::map<std::string, Setter> table{
    {"method",
     [](Config & c, const std::string & k, const std::string & v) {
       const auto & valid = method_names();
       if (std::find(valid.begin(), valid.end(), v) == valid.end()) {
         std::string list;
         for (const auto & n : valid) {
           list += (list.empty() ? "" : "|") + n;
         }
         throw ConfigError(k, "unknown method '" + v + "' (valid: " + list + ")");
       }
       c.method = v;
     }},
    {"methods", [](Config & c, const std::string & k, const std::string & v) { c.methods = to_methods(k, v); }},
    {"fps", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.frame_rate = to_positive(k, v); }},
    {"k", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.decay.k = to_positive(k, v); }},
    {"b", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.decay.b = to_positive(k, v); }},
    {"threshold", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.threshold = to_positive(k, v); }},
    {"smin", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.s_min = to_double(k, v); }},
    {"smax", [](Config & c, const std::string & k, const std::string & v) { c.recon.esi.s_max = to_double(k, v); }},
    {"lambda", [](Config & c, const std::string & k, const std::string & v) { c.recon.lambda = to_positive(k, v); }},
    {"alpha", [](Config & c, const std::string & k, const std::string & v) { c.recon.alpha = to_positive(k, v); }},
    {"origin_us", [](Config & c, const std::string & k, const std::string & v) { c.recon.origin = to_uint(k, v); }},
    {"end_us", [](Config & c, const std::string & k, const std::string & v) { c.end_us = to_uint(k, v); }},
    {"seed", [](Config & c, const std::string & k, const std::string & v) { c.noise.seed = to_uint(k, v); }},
    {"width",
     [](Config & c, const std::string & k, const std::string & v) {
       SensorGeometry g = c.geometry.value_or(c.scene.geometry);
       g.width = to_dimension(k, v);
       c.geometry = g;
       c.scene.geometry = g;
     }},
    {"height",
     [](Config & c, const std::string & k, const std::string & v) {
       SensorGeometry g = c.geometry.value_or(c.scene.geometry);
       g.height = to_dimension(k, v);
       c.geometry = g;
       c.scene.geometry = g;
     }},
    {"duration", [](Config & c, const std::string & k, const std::string & v) { c.scene.duration = to_positive(k, v); }},
    {"lead", [](Config & c, const std::string & k, const std::string & v) { c.scene.stationary_lead = to_non_negative(k, v); }},
    {"dt_sample", [](Config & c, const std::string & k, const std::string & v) { c.dt_sample = to_positive(k, v); }},
    {"contrast", [](Config & c, const std::string & k, const std::string & v) { c.trigger.contrast = to_positive(k, v); }},
    {"ramp_min", [](Config & c, const std::string & k, const std::string & v) { c.scene.ramp_min = to_positive(k, v); }},
    {"ramp_max", [](Config & c, const std::string & k, const std::string & v) { c.scene.ramp_max = to_positive(k, v); }},
    {"radius", [](Config & c, const std::string & k, const std::string & v) { c.scene.circle.radius = to_non_negative(k, v); }},
    {"reflectivity",
     [](Config & c, const std::string & k, const std::string & v) {
       const double r = to_positive(k, v);
       if (r > 1.0) {
         throw ConfigError(k, "must be in (0, 1], got '" + v + "'");
       }
       c.scene.circle.reflectivity = r;
     }},
    {"center_x", [](Config & c, const std::string & k, const std::string & v) { c.scene.circle.center_x = to_double(k, v); }},
    {"center_y", [](Config & c, const std::string & k, const std::string & v) { c.scene.circle.center_y = to_double(k, v); }},
    {"velocity", [](Config & c, const std::string & k, const std::string & v) { c.scene.circle.velocity = to_double(k, v); }},
    {"illumination_rate", [](Config & c, const std::string & k, const std::string & v) { c.scene.illumination_rate = to_double(k, v); }},
    {"noise_rate", [](Config & c, const std::string & k, const std::string & v) { c.noise.background_rate = to_non_negative(k, v); }},
    {"hot_pixels", [](Config & c, const std::string & k, const std::string & v) { c.noise.hot_pixels = to_hot_pixels(k, v); }},
    {"dump_truth", [](Config & c, const std::string & k, const std::string & v) { c.dump_truth = to_bool(k, v); }},
    {"input", [](Config & c, const std::string &, const std::string & v) { c.input = v; }},
    {"scene_config", [](Config & c, const std::string &, const std::string & v) { c.scene_config = v; }},
    {"output_dir", [](Config & c, const std::string &, const std::string & v) { c.output_dir = v; }},
    {"format",
     [](Config & c, const std::string & k, const std::string & v) {
       if (v != "csv" && v != "bin") {
         throw ConfigError(k, "must be csv or bin, got '" + v + "'");
       }
       c.format = v;
     }},
    {"strict_time", [](Config & c, const std::string & k, const std::string & v) { c.strict_time = to_bool(k, v); }},
    {"pipeline", [](Config & c, const std::string & k, const std::string & v) { c.pipeline = to_bool(k, v); }},
    {"bench_events", [](Config & c, const std::string & k, const std::string & v) { c.bench_events = to_uint(k, v); }},
    {"bench_rate", [](Config & c, const std::string & k, const std::string & v) { c.bench_rate = to_positive(k, v); }},
    {"repeats",
     [](Config & c, const std::string & k, const std::string & v) {
       const auto r = to_uint(k, v);
       if (r < 3 || r > 1000) {
         throw ConfigError(k, "must be in [3, 1000], got '" + v + "'");
       }
       c.repeats = static_cast<int>(r);
     }},
    {"fps_list",
     [](Config & c, const std::string & k, const std::string & v) {
       std::vector<double> out;
       for (const auto & item : split(v, ',')) {
         out.push_back(to_positive(k, item));
       }
       if (out.empty()) {
         throw ConfigError(k, "needs at least one frame rate");
       }
       c.fps_list = out;
     }},
  };
  return table;
}
}  // namespace

void apply_setting(Config & config, const std::string & key, const std::string & value)
{
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ConfigError(key, "unknown key");
  }
  it->second(config, key, trim(value));
}

void load_config_file(Config & config, const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open " + path.string());
  }
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(
        "config", path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void validate(const Config & config)
{
  const EsiParams & p = config.recon.esi;
  if (!(p.s_min < p.s_max)) {
    throw ConfigError("smin", "must be below smax");
  }
  if (!(config.scene.ramp_min > 0.0)) {
    throw ConfigError("ramp_min", "must be > 0");
  }
  try {
    p.validate();
    config.scene.validate();
    config.noise.validate(config.scene.geometry);
  } catch (const Error & e) {
    throw ConfigError("scene", e.detail());
  }
}

const std::vector<std::string> & known_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto & [k, _] : setters()) {
      out.push_back(k);
    }
    return out;
  }();
  return keys;
}

}  // namespace esi::cli
