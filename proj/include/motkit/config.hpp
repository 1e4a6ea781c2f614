#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "motkit/embed.hpp"
#include "motkit/sim.hpp"
#include "motkit/tracker.hpp"

namespace mot {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tracker + mining configuration, loadable from one flat JSON file. Every
/// key has a documented default; unknown keys are rejected.
struct Config {
  TrackerParams tracker;
  MiningParams mining;
};

Config default_config();

/// Loads a flat JSON config. Missing keys keep their defaults; unknown keys
/// throw ConfigError.
Config load_config(const std::filesystem::path& path);

/// Config from an optional file plus "key=value" command-line overrides,
/// applied on top of the file's values.
Config make_config(const std::string& path,
                   const std::vector<std::string>& overrides);

/// One "key  default  description" line per config key, for --help output.
std::string config_documentation();

/// Scenario config for the simulator. The seed key is mandatory.
ScenarioParams load_scenario(const std::filesystem::path& path);

ScenarioParams make_scenario(const std::string& path,
                             const std::vector<std::string>& overrides);

std::string scenario_documentation();

}  // namespace mot
