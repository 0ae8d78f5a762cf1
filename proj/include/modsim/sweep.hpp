#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "modsim/config.hpp"
#include "modsim/metrics.hpp"

namespace modsim {

struct CellKey {
  double spacing = 0.0;
  int fleet = 0;
  double rate = 0.0;
  std::uint64_t seed = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

std::string to_string(const CellKey& key);

// Cartesian product spacing x fleet x rate x seeds, seeds being
// base_seed + k for k < seeds_per_cell. Sorted by key.
std::vector<CellKey> sweep_cells(const ScenarioConfig& config);

// The single-cell scenario for `key`.
ScenarioConfig cell_config(const ScenarioConfig& config, const CellKey& key);

struct SweepOptions {
  unsigned jobs = 1;
  // When set, each cell writes its event log as events/<cell>.csv below it.
  std::filesystem::path event_dir;
};

struct CellFailure {
  CellKey key;
  std::string message;
};

struct SweepResult {
  std::vector<CellKey> keys;  // parallel to rows, sorted by key
  std::vector<MetricsRow> rows;
  std::vector<CellFailure> failures;
};

SweepResult run_sweep(const ScenarioConfig& config, const SweepOptions& options = {});

// Writes metrics.csv and resolved_config.txt into out_dir, each through a
// temporary file renamed into place. Throws IoError naming the path.
void emit_outputs(const SweepResult& result, const ScenarioConfig& config,
                  const std::filesystem::path& out_dir);

// Atomic replace of `path` with `contents`.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

std::string event_log_name(const CellKey& key);

}  // namespace modsim
