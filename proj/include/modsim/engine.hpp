#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "modsim/config.hpp"
#include "modsim/demand.hpp"
#include "modsim/scheduling.hpp"

namespace modsim {

// Same-time events: request arrivals first, then stop completions, then ids.
enum class EventKind : std::uint8_t { request_arrival = 0, stop_served = 1, simulation_end = 2 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::request_arrival;
  std::int64_t subject = 0;    // request id or vehicle id
  std::uint64_t version = 0;   // stale stop_served events carry an old version

  friend bool operator<(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.subject != b.subject) return a.subject < b.subject;
    return a.version < b.version;
  }
  friend bool operator>(const Event& a, const Event& b) { return b < a; }
};

enum class LogKind : std::uint8_t { assignment, rejection, pickup, dropoff };

inline constexpr int kIdle = -1;

struct LogRecord {
  double time = 0.0;
  LogKind kind = LogKind::assignment;
  RequestId request = 0;
  std::optional<VehicleId> vehicle;  // empty for rejections
  Point stop;                        // pickup stop for assignment/rejection
  std::optional<int> occupancy_after;  // kIdle when the vehicle has nothing left to do
};

inline constexpr double kNotReached = std::numeric_limits<double>::quiet_NaN();

struct RequestRecord {
  TripRequest trip;
  StopPoint pickup;
  StopPoint dropoff;
  double ingress_time = 0.0;
  double egress_time = 0.0;
  bool assigned = false;
  std::optional<VehicleId> vehicle;
  double pickup_time = kNotReached;   // completion of boarding
  double dropoff_time = kNotReached;  // completion of alighting

  bool served() const { return dropoff_time == dropoff_time; }
};

struct TrajectoryPoint {
  Point location;
  double time = 0.0;
  bool served_stop = false;  // false: start position or a mid-leg diversion
};

struct OccupancyChange {
  double time = 0.0;
  int level = kIdle;
};

struct VehicleTrace {
  std::vector<TrajectoryPoint> path;
  std::vector<OccupancyChange> occupancy;  // first entry at t = 0
  double distance = 0.0;                   // meters

  std::vector<Point> served_stops() const;
};

struct SimulationOutput {
  double horizon = 0.0;   // end of the demand (measurement) window
  double end_time = 0.0;  // last processed event
  int capacity = 0;
  std::vector<LogRecord> log;
  std::vector<RequestRecord> requests;  // indexed by request id
  std::vector<VehicleTrace> vehicles;   // indexed by vehicle id
};

// Runs one scenario cell: config.stop_spacing, config.fleet_size,
// config.demand.rate and config.demand.seed; sweep axes are ignored.
SimulationOutput run_simulation(const ScenarioConfig& config);

// Same, replaying a given demand instead of generating one.
SimulationOutput run_simulation(const ScenarioConfig& config, std::span<const TripRequest> demand);

struct LoadSnapshot {
  std::size_t submitted = 0;
  std::size_t assigned = 0;
  std::size_t picked_up = 0;
  std::size_t dropped_off = 0;

  friend bool operator==(const LoadSnapshot&, const LoadSnapshot&) = default;
};

LoadSnapshot snapshot_counts(const SimulationOutput& output, double at);

// Re-derives time-window and capacity compliance from the log alone.
struct LogAudit {
  std::size_t pickups_checked = 0;
  std::size_t dropoffs_checked = 0;
  std::size_t window_violations = 0;
  // Count rebuilt from the pickups and dropoffs outside [0, capacity), or
  // different from the logged occupancy_after.
  std::size_t capacity_violations = 0;
  std::size_t order_violations = 0;  // dropoff without an earlier pickup, or duplicates
};
LogAudit audit_log(const SimulationOutput& output);

// Header: time_s,kind,request_id,vehicle_id,stop_x_m,stop_y_m,occupancy_after
void write_event_log(std::ostream& out, const SimulationOutput& output);

const char* to_string(LogKind kind);

}  // namespace modsim
