#include "modsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/core.h>

#include "modsim/engine.hpp"
#include "modsim/errors.hpp"

namespace modsim {

std::string to_string(const CellKey& key) {
  return fmt::format("spacing={} fleet={} rate={} seed={}", key.spacing, key.fleet, key.rate, key.seed);
}

std::string event_log_name(const CellKey& key) {
  return fmt::format("events_D{}_F{}_r{}_s{}.csv", key.spacing, key.fleet, key.rate, key.seed);
}

std::vector<CellKey> sweep_cells(const ScenarioConfig& config) {
  std::vector<CellKey> cells;
  for (double spacing : config.sweep_spacing) {
    for (int fleet : config.sweep_fleet) {
      for (double rate : config.sweep_rate) {
        for (int k = 0; k < config.seeds_per_cell; ++k) {
          cells.push_back({spacing, fleet, rate, config.demand.seed + static_cast<std::uint64_t>(k)});
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

ScenarioConfig cell_config(const ScenarioConfig& config, const CellKey& key) {
  ScenarioConfig cell = config;
  cell.stop_spacing = key.spacing;
  cell.fleet_size = key.fleet;
  cell.demand.rate = key.rate;
  cell.demand.seed = key.seed;
  return cell;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", tmp.string()));
    out << contents;
    out.flush();
    if (!out) throw IoError(fmt::format("failed writing '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError(fmt::format("cannot rename '{}' to '{}': {}", tmp.string(), path.string(), ec.message()));
}

SweepResult run_sweep(const ScenarioConfig& config, const SweepOptions& options) {
  config.validate();
  const auto cells = sweep_cells(config);
  if (!options.event_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.event_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create '{}': {}", options.event_dir.string(), ec.message()));
  }

  std::vector<std::optional<MetricsRow>> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto cell = cell_config(config, cells[i]);
        const auto output = run_simulation(cell);
        rows[i] = summarize(cell, output);
        if (!options.event_dir.empty()) {
          std::ostringstream log;
          write_event_log(log, output);
          write_file_atomically(options.event_dir / event_log_name(cells[i]), log.str());
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown failure";
      }
    }
  };
  const unsigned jobs = std::clamp<unsigned>(options.jobs, 1u, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }

  SweepResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (rows[i]) {
      result.keys.push_back(cells[i]);
      result.rows.push_back(*rows[i]);
    } else {
      result.failures.push_back({cells[i], errors[i]});
    }
  }
  return result;
}

void emit_outputs(const SweepResult& result, const ScenarioConfig& config,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  std::ostringstream metrics;
  write_metrics_csv(metrics, result.rows);
  write_file_atomically(out_dir / "metrics.csv", metrics.str());
  write_file_atomically(out_dir / "resolved_config.txt", format_config(config));
}

}  // namespace modsim
