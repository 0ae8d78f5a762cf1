#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/geometry.hpp"
#include "modsim/scheduling.hpp"

namespace modsim {

struct ScenarioConfig {
  GridWorld world;
  DemandConfig demand;  // demand.seed is the base seed of a sweep
  KinematicsConfig kinematics;
  int fleet_size = 1000;
  double stop_spacing = 80.0;
  double snapshot_time = 3.0 * 3600.0;
  int tortuosity_horizon = 4;
  // Events later than duration + drain_limit are dropped.
  double drain_limit = 4.0 * 3600.0;

  std::vector<double> sweep_spacing{80.0, 200.0, 430.0, 640.0, 860.0};
  std::vector<int> sweep_fleet{500, 1000};
  std::vector<double> sweep_rate{20.0, 40.0, 80.0, 160.0, 320.0};
  int seeds_per_cell = 5;

  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&);
};

// `key = value` lines; `#` starts a comment; lists are comma separated.
// Omitted keys keep their defaults, unknown keys are rejected. Errors carry
// `source:line` and the key.
ScenarioConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
ScenarioConfig parse_config(const std::filesystem::path& path);

// Every key with its resolved value, in a form parse_config_text reads back
// to an identical config.
std::string format_config(const ScenarioConfig& config);

}  // namespace modsim
