#include "modsim/scheduling.hpp"

#include <stdexcept>

#include <fmt/core.h>

#include "modsim/errors.hpp"

namespace modsim {

void KinematicsConfig::validate() const {
  if (boarding_time < 0.0 || alighting_time < 0.0 || stop_loss < 0.0) {
    throw ConfigError("boarding, alighting and stop-loss times must be >= 0");
  }
  if (capacity < 1) throw ConfigError(fmt::format("capacity must be >= 1, got {}", capacity));
}

double stop_loss_from_acceleration(double cruise_speed, double acceleration) {
  if (!(acceleration > 0.0)) throw ConfigError("acceleration must be > 0");
  return 2.0 * cruise_speed / acceleration;
}

std::vector<double> service_times(const VehicleView& state, std::span<const StopPoint> schedule,
                                  const ServiceModel& model) {
  std::vector<double> times;
  times.reserve(schedule.size());
  Point here = state.location;
  double clock = state.clock;
  for (const auto& sp : schedule) {
    const Point next = model.location(sp);
    clock += model.leg_time(here, next) + model.kinematics().service_duration(sp.action);
    times.push_back(clock);
    here = next;
  }
  return times;
}

bool is_feasible(const VehicleView& state, std::span<const StopPoint> schedule,
                 const ServiceModel& model) {
  const auto times = service_times(state, schedule, model);
  int onboard = state.onboard;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& sp = schedule[i];
    if (times[i] < sp.preferred_time || !(times[i] < sp.preferred_time + sp.max_extra_time)) {
      return false;
    }
    onboard += occupancy_delta(sp.action);
    if (onboard < 0 || onboard >= model.kinematics().capacity) return false;
  }
  return true;
}

double schedule_cost(const VehicleView& state, std::span<const StopPoint> schedule,
                     const ServiceModel& model) {
  double cost = 0.0;
  Point here = state.location;
  for (const auto& sp : schedule) {
    const Point next = model.location(sp);
    cost += model.leg_time(here, next) + model.kinematics().service_duration(sp.action);
    here = next;
  }
  return cost;
}

Schedule insert(std::span<const StopPoint> schedule, std::size_t position, const StopPoint& sp) {
  if (position < 1 || position > schedule.size() + 1) {
    throw std::out_of_range(fmt::format("insert position {} outside [1, {}]", position,
                                        schedule.size() + 1));
  }
  Schedule out;
  out.reserve(schedule.size() + 1);
  out.insert(out.end(), schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(position - 1));
  out.push_back(sp);
  out.insert(out.end(), schedule.begin() + static_cast<std::ptrdiff_t>(position - 1), schedule.end());
  return out;
}

}  // namespace modsim
