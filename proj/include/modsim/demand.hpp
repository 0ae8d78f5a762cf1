#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "modsim/geometry.hpp"

namespace modsim {

using RequestId = std::int64_t;

struct TripRequest {
  RequestId id = 0;
  Point origin;
  Point destination;
  double appear_time = 0.0;     // seconds
  double max_extra_time = 0.0;  // seconds
};

enum class Action : std::uint8_t { pickup, dropoff };

// Passenger-count change caused by serving a stop of this kind.
constexpr int occupancy_delta(Action action) { return action == Action::pickup ? 1 : -1; }

// One pick-up or drop-off the dispatcher must place; to be served in
// [preferred_time, preferred_time + max_extra_time).
struct StopPoint {
  StopIndex stop = 0;
  double preferred_time = 0.0;
  double max_extra_time = 0.0;
  Action action = Action::pickup;
  RequestId request = 0;
};

struct DemandConfig {
  double rate = 320.0;  // requests / hour / km^2, before the walk filter
  double walk_threshold = 1600.0;
  double duration = 4.0 * 3600.0;
  double max_extra_time = 1200.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// Optional side channel for statistical checks on the raw arrival stream.
struct DemandTrace {
  std::vector<double> arrival_times;  // every arrival, including filtered ones
};

// Homogeneous Poisson arrivals of intensity rate * area over [0, duration),
// uniform i.i.d. origins and destinations. Trips whose L1 length does not
// exceed the walk threshold consume an arrival but produce no request.
// Request ids are contiguous from 0 in appearance order.
std::vector<TripRequest> generate_demand(const DemandConfig& config, const GridWorld& world,
                                         DemandTrace* trace = nullptr);

struct StopPointPair {
  StopPoint pickup;
  StopPoint dropoff;
  double ingress_time = 0.0;
  double egress_time = 0.0;
};

// The pickup window opens when the user reaches the ingress stop,
// t1 = t + walk(o, phi(o)); the dropoff window opens at the earliest possible
// car arrival at the egress stop, t2 = t1 + drive(phi(o), phi(d)).
StopPointPair to_stop_points(const TripRequest& request, const StopLattice& lattice,
                             const GridWorld& world);

// Header: id,appear_s,ox_m,oy_m,dx_m,dy_m,delta_t_s
void write_demand_csv(std::ostream& out, std::span<const TripRequest> requests);
std::vector<TripRequest> read_demand_csv(std::istream& in);

}  // namespace modsim
