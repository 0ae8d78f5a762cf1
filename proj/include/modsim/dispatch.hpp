#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "modsim/scheduling.hpp"

namespace modsim {

// Costs closer than this are treated as equal; the earlier candidate (lower
// position, lower vehicle id) then wins.
inline constexpr double kCostTieTolerance = 1e-9;

// Best two-phase placement of a request in one vehicle's schedule. Positions
// are 1-based in the final schedule; cost is the full post-insertion
// schedule cost.
struct Insertion {
  double cost = 0.0;
  std::size_t pickup_position = 0;
  std::size_t dropoff_position = 0;
};

struct Assignment {
  VehicleId vehicle_id = 0;
  std::size_t pickup_position = 0;
  std::size_t dropoff_position = 0;
  double cost = 0.0;
  Schedule new_schedule;
};

struct Rejection {
  RequestId request_id = 0;
};

using DispatchDecision = std::variant<Assignment, Rejection>;

// Greedy two-phase insertion. The pickup goes to the position minimising the
// cost of the pickup-only tentative schedule; the dropoff is then placed after
// it at the position minimising the full schedule cost. Returns nullopt when
// either phase has no feasible position. Throws std::invalid_argument for a
// pair that is not (pickup, dropoff) of one request.
std::optional<Insertion> insertion_cost(const VehicleView& vehicle, const StopPoint& pickup,
                                        const StopPoint& dropoff, const ServiceModel& model);

// Lower bound on insertion_cost for the pair, given the cost of the
// vehicle's current schedule. In L1, inserting P between a and b adds twice
// the distance from P to the box spanned by a and b, so no insertion adds
// less driving than P's distance to the bounding box of the route.
double insertion_cost_floor(const VehicleView& vehicle, double current_cost, const StopPoint& pickup,
                            const StopPoint& dropoff, const ServiceModel& model);

// Axis-aligned box; any box containing the vehicle position and its
// scheduled stops yields a valid (if looser) floor.
struct RouteBox {
  Point lo;
  Point hi;

  void include(Point p);
};

RouteBox route_box(const VehicleView& vehicle, const ServiceModel& model);

double insertion_cost_floor(const RouteBox& box, double current_cost, const StopPoint& pickup,
                            const StopPoint& dropoff, const ServiceModel& model);

// v* = argmin over the fleet of insertion_cost, lowest vehicle id on ties.
DispatchDecision assign_request(std::span<const VehicleView> fleet, const StopPoint& pickup,
                                const StopPoint& dropoff, const ServiceModel& model);

// Reusable search state. Each candidate position is checked in O(1) against
// per-stop slack profiles, so a vehicle costs O(n) instead of O(n^2).
class Dispatcher {
 public:
  explicit Dispatcher(const ServiceModel& model) : model_(model) {}

  std::optional<Insertion> evaluate(const VehicleView& vehicle, const StopPoint& pickup,
                                    const StopPoint& dropoff);

  struct Choice {
    std::size_t fleet_index = 0;
    Insertion insertion;
  };

  // `cost_floor`, when given, holds a lower bound on the insertion cost of
  // each vehicle and lets the scan skip vehicles that cannot win. It never
  // changes the result.
  std::optional<Choice> choose(std::span<const VehicleView> fleet, const StopPoint& pickup,
                               const StopPoint& dropoff, std::span<const double> cost_floor = {});

 private:
  struct Profile {
    Point start;
    double start_time = 0.0;
    int start_onboard = 0;
    std::vector<Point> points;
    std::vector<double> times;
    std::vector<int> onboard;
    std::vector<char> prefix_ok;      // [k]: stops 0..k-1 all satisfied
    std::vector<double> min_late;     // suffix min of (t + dt - T)
    std::vector<double> min_early;    // suffix min of (T - t)
    std::vector<int> max_onboard;     // suffix max
    std::vector<int> min_onboard;     // suffix min
  };
  struct Placement {
    double delta = 0.0;
    std::size_t position = 0;
  };

  void build_profile(Profile& profile, Point start, double start_time, int start_onboard,
                     std::span<const StopPoint> stops) const;
  std::optional<Placement> best_placement(const Profile& profile, const StopPoint& sp,
                                          std::size_t first_position) const;

  const ServiceModel& model_;
  Profile base_;
  Profile tentative_;
  Schedule tentative_stops_;
  std::vector<double> floors_;
  std::vector<std::size_t> order_;
};

}  // namespace modsim
