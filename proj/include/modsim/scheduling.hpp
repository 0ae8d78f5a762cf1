#pragma once

#include <span>
#include <vector>

#include "modsim/demand.hpp"
#include "modsim/geometry.hpp"

namespace modsim {

using VehicleId = std::int32_t;
using Schedule = std::vector<StopPoint>;

struct KinematicsConfig {
  double boarding_time = 5.0;
  double alighting_time = 10.0;
  // Time lost decelerating into and accelerating out of a stop, charged once
  // per leg that actually moves the vehicle.
  double stop_loss = 11.5;
  int capacity = 45;

  void validate() const;
  double service_duration(Action action) const {
    return action == Action::pickup ? boarding_time : alighting_time;
  }
};

// 2 v / a: the time a vehicle loses braking to a halt and regaining cruise
// speed under constant |a|. At 35 km/h and 1.676 m/s^2 this is about 11.6 s.
double stop_loss_from_acceleration(double cruise_speed, double acceleration);

// Bundles what the schedule arithmetic needs; holds references only.
class ServiceModel {
 public:
  ServiceModel(const GridWorld& world, const StopLattice& lattice, const KinematicsConfig& kin)
      : world_(&world), lattice_(&lattice), kin_(kin) {}

  const GridWorld& world() const { return *world_; }
  const StopLattice& lattice() const { return *lattice_; }
  const KinematicsConfig& kinematics() const { return kin_; }

  const Point& location(const StopPoint& sp) const { return lattice_->point(sp.stop); }

  // Driving time plus stop loss; zero when the vehicle does not move.
  double leg_time(Point from, Point to) const {
    if (from == to) return 0.0;
    return rect_distance(from, to) / world_->cruise_speed + kin_.stop_loss;
  }

 private:
  const GridWorld* world_;
  const StopLattice* lattice_;
  KinematicsConfig kin_;
};

// Non-owning snapshot of a vehicle as the dispatcher sees it: at `location`
// at time `clock` with `onboard` passengers and `schedule` still to serve.
struct VehicleView {
  VehicleId id = 0;
  Point location;
  double clock = 0.0;
  int onboard = 0;
  std::span<const StopPoint> schedule;
};

struct VehicleState {
  VehicleId vehicle_id = 0;
  Point location;
  double clock = 0.0;
  int onboard = 0;
  Schedule schedule;

  VehicleView view() const { return {vehicle_id, location, clock, onboard, schedule}; }
};

// Completion time of every stop (boarding/alighting included) when the
// vehicle starts from state.location at state.clock. Only the position,
// clock and passenger count of `state` are used.
std::vector<double> service_times(const VehicleView& state, std::span<const StopPoint> schedule,
                                  const ServiceModel& model);

// Every stop inside its window [t, t + dt) and the running passenger count
// within [0, capacity) after each stop.
bool is_feasible(const VehicleView& state, std::span<const StopPoint> schedule,
                 const ServiceModel& model);

// Time to execute the whole schedule from the current location.
double schedule_cost(const VehicleView& state, std::span<const StopPoint> schedule,
                     const ServiceModel& model);

// Copy of `schedule` with `sp` at 1-based `position` in [1, n+1].
// Throws std::out_of_range otherwise.
Schedule insert(std::span<const StopPoint> schedule, std::size_t position, const StopPoint& sp);

}  // namespace modsim
