#include "modsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "modsim/errors.hpp"

namespace modsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("'{}' is not a valid number", text));
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text) {
  std::vector<T> values;
  while (true) {
    const auto comma = text.find(',');
    values.push_back(parse_number<T>(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

std::string shortest(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += shortest(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

// Speeds are written in km/h; everything else is SI.
struct Field {
  std::function<void(ScenarioConfig&, std::string_view)> read;
  std::function<std::string(const ScenarioConfig&)> write;
};

template <typename T, typename Get>
Field scalar(Get get) {
  return {[get](ScenarioConfig& c, std::string_view v) { get(c) = parse_number<T>(v); },
          [get](const ScenarioConfig& c) {
            const T value = get(c);
            if constexpr (std::is_floating_point_v<T>) {
              return shortest(value);
            } else {
              return std::to_string(value);
            }
          }};
}

template <typename T, typename Get>
Field list(Get get) {
  return {[get](ScenarioConfig& c, std::string_view v) { get(c) = parse_list<T>(v); },
          [get](const ScenarioConfig& c) { return join(get(c)); }};
}

Field speed_kmph(double GridWorld::*member) {
  return {[member](ScenarioConfig& c, std::string_view v) {
            c.world.*member = kmph_to_mps(parse_number<double>(v));
          },
          [member](const ScenarioConfig& c) { return shortest(c.world.*member * 3.6); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"area_width_m", scalar<double>([](auto& c) -> auto& { return c.world.area_width; })},
      {"area_height_m", scalar<double>([](auto& c) -> auto& { return c.world.area_height; })},
      {"ew_road_spacing_m", scalar<double>([](auto& c) -> auto& { return c.world.ew_road_spacing; })},
      {"ns_road_spacing_m", scalar<double>([](auto& c) -> auto& { return c.world.ns_road_spacing; })},
      {"walk_speed_kmph", speed_kmph(&GridWorld::walk_speed)},
      {"cruise_speed_kmph", speed_kmph(&GridWorld::cruise_speed)},
      {"rate_req_per_h_km2", scalar<double>([](auto& c) -> auto& { return c.demand.rate; })},
      {"walk_threshold_m", scalar<double>([](auto& c) -> auto& { return c.demand.walk_threshold; })},
      {"duration_s", scalar<double>([](auto& c) -> auto& { return c.demand.duration; })},
      {"max_extra_time_s", scalar<double>([](auto& c) -> auto& { return c.demand.max_extra_time; })},
      {"seed", scalar<std::uint64_t>([](auto& c) -> auto& { return c.demand.seed; })},
      {"boarding_time_s", scalar<double>([](auto& c) -> auto& { return c.kinematics.boarding_time; })},
      {"alighting_time_s", scalar<double>([](auto& c) -> auto& { return c.kinematics.alighting_time; })},
      {"stop_loss_s", scalar<double>([](auto& c) -> auto& { return c.kinematics.stop_loss; })},
      {"capacity", scalar<int>([](auto& c) -> auto& { return c.kinematics.capacity; })},
      {"fleet_size", scalar<int>([](auto& c) -> auto& { return c.fleet_size; })},
      {"stop_spacing_m", scalar<double>([](auto& c) -> auto& { return c.stop_spacing; })},
      {"snapshot_time_s", scalar<double>([](auto& c) -> auto& { return c.snapshot_time; })},
      {"tortuosity_horizon", scalar<int>([](auto& c) -> auto& { return c.tortuosity_horizon; })},
      {"drain_limit_s", scalar<double>([](auto& c) -> auto& { return c.drain_limit; })},
      {"sweep_spacing_m", list<double>([](auto& c) -> auto& { return c.sweep_spacing; })},
      {"sweep_fleet", list<int>([](auto& c) -> auto& { return c.sweep_fleet; })},
      {"sweep_rate", list<double>([](auto& c) -> auto& { return c.sweep_rate; })},
      {"seeds_per_cell", scalar<int>([](auto& c) -> auto& { return c.seeds_per_cell; })},
  };
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  world.validate();
  demand.validate();
  kinematics.validate();
  if (fleet_size < 1) throw ConfigError(fmt::format("fleet_size must be >= 1, got {}", fleet_size));
  const double max_spacing = std::min(world.area_width, world.area_height);
  auto check_spacing = [&](double d, const char* key) {
    if (!(d > 0.0) || d > max_spacing) {
      throw ConfigError(fmt::format("{} must lie in (0, {}], got {}", key, max_spacing, d));
    }
  };
  check_spacing(stop_spacing, "stop_spacing_m");
  if (snapshot_time < 0.0) throw ConfigError("snapshot_time_s must be >= 0");
  if (tortuosity_horizon < 1) throw ConfigError("tortuosity_horizon must be >= 1");
  if (drain_limit < 0.0) throw ConfigError("drain_limit_s must be >= 0");
  if (sweep_spacing.empty() || sweep_fleet.empty() || sweep_rate.empty()) {
    throw ConfigError("every sweep axis needs at least one value");
  }
  for (double d : sweep_spacing) check_spacing(d, "sweep_spacing_m");
  for (int f : sweep_fleet) {
    if (f < 1) throw ConfigError(fmt::format("sweep_fleet values must be >= 1, got {}", f));
  }
  for (double r : sweep_rate) {
    if (!(r > 0.0)) throw ConfigError(fmt::format("sweep_rate values must be > 0, got {}", r));
  }
  if (seeds_per_cell < 1) throw ConfigError("seeds_per_cell must be >= 1");
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  for (const auto& [key, field] : fields()) {
    if (field.write(a) != field.write(b)) return false;
  }
  return true;
}

ScenarioConfig parse_config_text(std::string_view text, std::string_view source) {
  std::map<std::string, const Field*, std::less<>> lookup;
  for (const auto& [key, field] : fields()) lookup.emplace(key, &field);

  ScenarioConfig config;
  std::size_t line_no = 0;
  std::istringstream lines{std::string(text)};
  std::string raw;
  while (std::getline(lines, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw ConfigError(fmt::format("{}:{}: unknown key '{}'", source, line_no, key));
    }
    try {
      it->second->read(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("{}:{}: {}: {}", source, line_no, key, e.what()));
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string format_config(const ScenarioConfig& config) {
  std::string out = "# resolved scenario configuration\n";
  for (const auto& [key, field] : fields()) {
    out += fmt::format("{} = {}\n", key, field.write(config));
  }
  return out;
}

}  // namespace modsim
