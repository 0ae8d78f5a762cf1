#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modsim/config.hpp"
#include "modsim/engine.hpp"
#include "modsim/geometry.hpp"

namespace modsim {

// Shortest open path from `start` through every point of `others` (any
// order), by enumerating all orderings. Throws std::invalid_argument when
// `others` is empty.
double min_visit_length(Point start, std::span<const Point> others);

// Length of the realised window trajectory[i..i+H] over the shortest way to
// visit the same points from trajectory[i]; 1 when both are zero. `i` is
// 0-based. Throws std::out_of_range when the window does not fit.
double tortuosity_at(std::span<const Point> trajectory, std::size_t i, int horizon);

// Mean of tortuosity_at over every window; nullopt when the trajectory has
// no more than `horizon` points.
std::optional<double> vehicle_tortuosity(std::span<const Point> trajectory, int horizon);

struct TortuosityReport {
  int horizon = 4;
  std::vector<std::optional<double>> per_vehicle;
  std::optional<double> fleet_mean;  // over vehicles with a defined value
};

TortuosityReport tortuosity_report(const SimulationOutput& output, int horizon);

// Fraction of time per occupancy level; index 0 is idle (-1), index k+1 is k
// passengers on board.
struct SharingHistogram {
  std::vector<std::vector<double>> per_vehicle;
  std::vector<double> fleet_mean;

  static int level_of(std::size_t bin) { return static_cast<int>(bin) - 1; }
  double fraction(int level) const;
  double fraction_at_least(int level) const;
};

// Time-weighted over [0, window_end).
SharingHistogram sharing_histogram(std::span<const VehicleTrace> vehicles, double window_end);

struct QoSSummary {
  std::size_t submitted = 0;
  std::size_t served = 0;
  std::size_t rejected = 0;
  // Means over served requests; nullopt when nothing was served.
  std::optional<double> ingress, waiting, onboard, egress, total;
  double max_ingress = 0.0;
  double rejection_fraction = 0.0;
};

QoSSummary qos_summary(const SimulationOutput& output);

struct IngressEstimate {
  double mean_distance = 0.0;  // meters
  double mean_time = 0.0;      // seconds
  double max_time = 0.0;       // seconds
};

// Uniform origins in square Voronoi cells of edge D: E[z] = D/2 in L1, the
// farthest point of a cell is D away.
IngressEstimate analytic_ingress(double spacing, double walk_speed);

struct MetricsRow {
  double spacing = 0.0;
  int fleet = 0;
  double rate = 0.0;
  std::size_t submitted = 0;
  std::size_t assigned_3h = 0;
  std::size_t picked_3h = 0;
  std::size_t dropped_3h = 0;
  std::size_t rejected = 0;
  double km_per_vehicle = 0.0;
  std::optional<double> tortuosity;
  std::optional<double> ingress_s, wait_s, onboard_s, egress_s, total_s;
  double idle_frac = 0.0;
};

// Summary row of one simulated cell. `cell` supplies the cell coordinates,
// the snapshot instant and the tortuosity horizon.
MetricsRow summarize(const ScenarioConfig& cell, const SimulationOutput& output);

std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);

}  // namespace modsim
