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

#ifndef ESI_TOOLS_CONFIG_HPP
#define ESI_TOOLS_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esi/baselines.hpp"
#include "esi/synth.hpp"

namespace esi::cli
{
/// A rejected configuration entry; `key` names the offending setting.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string key, const std::string & why)
  : std::runtime_error("config key '" + key + "': " + why), key_(std::move(key))
  {
  }
  const std::string & key() const { return key_; }

private:
  std::string key_;
};

struct Config
{
  // reconstruction
  std::string method{"esi"};
  std::vector<std::string> methods;  // compare / bench; empty means all
  MethodConfig recon;
  std::optional<Timestamp> end_us;

  // simulation
  synth::SceneSpec scene;
  synth::TriggerModel trigger;
  synth::NoiseSpec noise;
  double dt_sample{1e-3};
  std::optional<SensorGeometry> geometry;  // width/height given explicitly
  bool dump_truth{false};

  // files
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> scene_config;
  std::filesystem::path output_dir{"out"};
  std::string format{"bin"};
  bool strict_time{false};
  bool pipeline{false};

  // bench
  std::size_t bench_events{10'000'000};
  double bench_rate{12e6};
  int repeats{5};
  std::vector<double> fps_list{25, 50, 100, 200, 400};
};

/// Applies one `key = value` setting. Throws ConfigError.
void apply_setting(Config & config, const std::string & key, const std::string & value);

/// Reads `key = value` lines; '#' starts a comment. Throws ConfigError
/// (key "config" for I/O or syntax problems).
void load_config_file(Config & config, const std::filesystem::path & path);

/// Cross-key checks after all settings are in. Throws ConfigError.
void validate(const Config & config);

/// The documented keys, for help output.
const std::vector<std::string> & known_keys();

}  // namespace esi::cli

#endif  // ESI_TOOLS_CONFIG_HPP
