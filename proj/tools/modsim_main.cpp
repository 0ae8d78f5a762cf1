// modsim: stop-consolidation sweeps for the on-demand fleet simulator.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "modsim/config.hpp"
#include "modsim/demand.hpp"
#include "modsim/engine.hpp"
#include "modsim/errors.hpp"
#include "modsim/metrics.hpp"
#include "modsim/sweep.hpp"

namespace {

constexpr const char* kJobsEnv = "MODSIM_JOBS";

unsigned default_jobs() {
  if (const char* env = std::getenv(kJobsEnv)) {
    try {
      const int value = std::stoi(env);
      if (value >= 1) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
    std::cerr << fmt::format("warning: ignoring invalid {}='{}'\n", kJobsEnv, env);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_command(const std::string& config_path, const std::string& out_dir, int seeds, bool emit_events,
                unsigned jobs) {
  auto config = modsim::parse_config(config_path);
  if (seeds > 0) config.seeds_per_cell = seeds;
  config.validate();

  modsim::SweepOptions options;
  options.jobs = jobs;
  if (emit_events) options.event_dir = std::filesystem::path(out_dir) / "events";
  const auto result = modsim::run_sweep(config, options);
  modsim::emit_outputs(result, config, out_dir);

  std::cout << fmt::format("{} cells written to {}\n", result.rows.size(),
                           (std::filesystem::path(out_dir) / "metrics.csv").string());
  for (const auto& failure : result.failures) {
    std::cerr << fmt::format("cell failed [{}]: {}\n", modsim::to_string(failure.key), failure.message);
  }
  return result.failures.empty() ? 0 : 1;
}

int validate_command(const std::string& config_path) {
  const auto config = modsim::parse_config(config_path);
  std::cout << modsim::format_config(config);
  std::cout << fmt::format("# {} sweep cells\n", modsim::sweep_cells(config).size());
  return 0;
}

int demand_command(const std::string& config_path, const std::string& out_file) {
  const auto config = modsim::parse_config(config_path);
  const auto demand = modsim::generate_demand(config.demand, config.world);
  std::ostringstream text;
  modsim::write_demand_csv(text, demand);
  modsim::write_file_atomically(out_file, text.str());
  std::cout << fmt::format("{} requests written to {}\n", demand.size(), out_file);
  return 0;
}

int replay_command(const std::string& config_path, const std::string& demand_file,
                   const std::string& out_dir, bool emit_events) {
  const auto config = modsim::parse_config(config_path);
  std::ifstream in(demand_file);
  if (!in) throw modsim::IoError(fmt::format("cannot open demand file '{}'", demand_file));
  const auto demand = modsim::read_demand_csv(in);
  const auto output = modsim::run_simulation(config, demand);

  modsim::SweepResult result;
  result.keys.push_back({config.stop_spacing, config.fleet_size, config.demand.rate, config.demand.seed});
  result.rows.push_back(modsim::summarize(config, output));
  modsim::emit_outputs(result, config, out_dir);
  if (emit_events) {
    std::ostringstream log;
    modsim::write_event_log(log, output);
    modsim::write_file_atomically(std::filesystem::path(out_dir) / "events.csv", log.str());
  }
  std::cout << modsim::format_metrics_row(result.rows.front()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobility-on-demand simulator with consolidated stop locations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string demand_file;
  int seeds = 0;
  bool emit_events = false;
  unsigned jobs = default_jobs();

  auto* run = app.add_subcommand("run", "Run the configured sweep and write metrics");
  run->add_option("--config", config_path, "Scenario file (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seeds", seeds, "Seeds per cell (overrides the config)")->check(CLI::PositiveNumber);
  run->add_flag("--emit-events", emit_events, "Write one event log per cell");
  run->add_option("--jobs", jobs, fmt::format("Concurrent cells (default: ${} or CPU count)", kJobsEnv))
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Parse a scenario file and print the resolved config");
  validate->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);

  auto* demand = app.add_subcommand("demand", "Export the generated demand of the configured cell");
  demand->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  demand->add_option("--out", out_dir, "Output CSV file")->required();

  auto* replay = app.add_subcommand("replay", "Simulate the configured cell on an imported demand file");
  replay->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  replay->add_option("--demand", demand_file, "Demand CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out_dir, "Output directory")->required();
  replay->add_flag("--emit-events", emit_events, "Write the event log");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, out_dir, seeds, emit_events, jobs);
    if (*validate) return validate_command(config_path);
    if (*demand) return demand_command(config_path, out_dir);
    if (*replay) return replay_command(config_path, demand_file, out_dir, emit_events);
  } catch (const modsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
