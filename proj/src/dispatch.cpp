#include "modsim/dispatch.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace modsim {

namespace {

// Slack kept when pruning with bounds that are exact in real arithmetic.
constexpr double kPruneMargin = 1e-6;

void require_request_pair(const StopPoint& pickup, const StopPoint& dropoff) {
  if (pickup.action != Action::pickup || dropoff.action != Action::dropoff ||
      pickup.request != dropoff.request) {
    throw std::invalid_argument("expected the pickup and dropoff stop points of one request");
  }
}

bool better(double cost, VehicleId id, double best_cost, VehicleId best_id) {
  if (cost < best_cost - kCostTieTolerance) return true;
  return cost <= best_cost + kCostTieTolerance && id < best_id;
}

double box_distance(Point p, Point lo, Point hi) {
  return std::max({lo.x - p.x, 0.0, p.x - hi.x}) + std::max({lo.y - p.y, 0.0, p.y - hi.y});
}

}  // namespace

void RouteBox::include(Point p) {
  lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
  hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
}

RouteBox route_box(const VehicleView& vehicle, const ServiceModel& model) {
  RouteBox box{vehicle.location, vehicle.location};
  for (const auto& sp : vehicle.schedule) box.include(model.location(sp));
  return box;
}

double insertion_cost_floor(const RouteBox& box, double current_cost, const StopPoint& pickup,
                            const StopPoint& dropoff, const ServiceModel& model) {
  const Point& at_pickup = model.location(pickup);
  const double pickup_detour = box_distance(at_pickup, box.lo, box.hi);
  RouteBox grown = box;
  grown.include(at_pickup);
  const double dropoff_detour = box_distance(model.location(dropoff), grown.lo, grown.hi);
  const auto& kin = model.kinematics();
  return current_cost + kin.boarding_time + kin.alighting_time +
         (pickup_detour + dropoff_detour) / model.world().cruise_speed - kPruneMargin;
}

double insertion_cost_floor(const VehicleView& vehicle, double current_cost, const StopPoint& pickup,
                            const StopPoint& dropoff, const ServiceModel& model) {
  return insertion_cost_floor(route_box(vehicle, model), current_cost, pickup, dropoff, model);
}

void Dispatcher::build_profile(Profile& p, Point start, double start_time, int start_onboard,
                               std::span<const StopPoint> stops) const {
  const auto& kin = model_.kinematics();
  const std::size_t n = stops.size();
  p.start = start;
  p.start_time = start_time;
  p.start_onboard = start_onboard;
  p.points.resize(n);
  p.times.resize(n);
  p.onboard.resize(n);
  p.prefix_ok.resize(n + 1);
  p.min_late.resize(n);
  p.min_early.resize(n);
  p.max_onboard.resize(n);
  p.min_onboard.resize(n);

  Point here = start;
  double clock = start_time;
  int onboard = start_onboard;
  p.prefix_ok[0] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& sp = stops[k];
    p.points[k] = model_.location(sp);
    clock += model_.leg_time(here, p.points[k]) + kin.service_duration(sp.action);
    onboard += occupancy_delta(sp.action);
    p.times[k] = clock;
    p.onboard[k] = onboard;
    const bool ok = clock >= sp.preferred_time && clock < sp.preferred_time + sp.max_extra_time &&
                    onboard >= 0 && onboard < kin.capacity;
    p.prefix_ok[k + 1] = static_cast<char>(p.prefix_ok[k] && ok);
    here = p.points[k];
  }
  double min_late = std::numeric_limits<double>::infinity();
  double min_early = std::numeric_limits<double>::infinity();
  int max_onboard = std::numeric_limits<int>::min();
  int min_onboard = std::numeric_limits<int>::max();
  for (std::size_t k = n; k-- > 0;) {
    const auto& sp = stops[k];
    min_late = std::min(min_late, sp.preferred_time + sp.max_extra_time - p.times[k]);
    min_early = std::min(min_early, p.times[k] - sp.preferred_time);
    max_onboard = std::max(max_onboard, p.onboard[k]);
    min_onboard = std::min(min_onboard, p.onboard[k]);
    p.min_late[k] = min_late;
    p.min_early[k] = min_early;
    p.max_onboard[k] = max_onboard;
    p.min_onboard[k] = min_onboard;
  }
}

// Inserting `sp` before stop k delays every later stop by the same amount,
// so the suffix minima decide feasibility of the tail in O(1).
std::optional<Dispatcher::Placement> Dispatcher::best_placement(const Profile& p,
                                                                const StopPoint& sp,
                                                                std::size_t first_position) const {
  const auto& kin = model_.kinematics();
  const std::size_t n = p.times.size();
  const Point at = model_.location(sp);
  const double service = kin.service_duration(sp.action);
  const int change = occupancy_delta(sp.action);
  const double deadline = sp.preferred_time + sp.max_extra_time;

  std::optional<Placement> best;
  for (std::size_t position = first_position; position <= n + 1; ++position) {
    const std::size_t k = position - 1;
    if (!p.prefix_ok[k]) break;
    const Point prev = k == 0 ? p.start : p.points[k - 1];
    const double prev_time = k == 0 ? p.start_time : p.times[k - 1];
    if (prev_time + service >= deadline) break;  // later positions start even later

    const int onboard_after = (k == 0 ? p.start_onboard : p.onboard[k - 1]) + change;
    if (onboard_after < 0 || onboard_after >= kin.capacity) continue;

    const double lead = model_.leg_time(prev, at) + service;
    const double served = prev_time + lead;
    if (served < sp.preferred_time || !(served < deadline)) continue;

    double delta = lead;
    if (k < n) {
      delta = lead + model_.leg_time(at, p.points[k]) - model_.leg_time(prev, p.points[k]);
      if (!(delta < p.min_late[k]) || p.min_early[k] + delta < 0.0) continue;
      if (p.max_onboard[k] + change >= kin.capacity || p.min_onboard[k] + change < 0) continue;
    }
    if (!best || delta < best->delta - kCostTieTolerance) best = Placement{delta, position};
  }
  return best;
}

std::optional<Insertion> Dispatcher::evaluate(const VehicleView& vehicle, const StopPoint& pickup,
                                              const StopPoint& dropoff) {
  require_request_pair(pickup, dropoff);
  const auto& kin = model_.kinematics();
  // Triangle inequality: the pickup cannot be served earlier than a direct
  // drive from the current position.
  const double earliest_pickup = vehicle.clock + model_.leg_time(vehicle.location,
                                                                 model_.location(pickup)) +
                                 kin.boarding_time;
  if (earliest_pickup >= pickup.preferred_time + pickup.max_extra_time + kPruneMargin) {
    return std::nullopt;
  }

  build_profile(base_, vehicle.location, vehicle.clock, vehicle.onboard, vehicle.schedule);
  const auto first = best_placement(base_, pickup, 1);
  if (!first) return std::nullopt;

  tentative_stops_.assign(vehicle.schedule.begin(), vehicle.schedule.end());
  tentative_stops_.insert(tentative_stops_.begin() + static_cast<std::ptrdiff_t>(first->position - 1),
                          pickup);
  build_profile(tentative_, vehicle.location, vehicle.clock, vehicle.onboard, tentative_stops_);
  const auto second = best_placement(tentative_, dropoff, first->position + 1);
  if (!second) return std::nullopt;

  const double tentative_cost = tentative_.times.back() - vehicle.clock;
  return Insertion{tentative_cost + second->delta, first->position, second->position};
}

std::optional<Dispatcher::Choice> Dispatcher::choose(std::span<const VehicleView> fleet,
                                                     const StopPoint& pickup,
                                                     const StopPoint& dropoff,
                                                     std::span<const double> cost_floor) {
  require_request_pair(pickup, dropoff);
  if (fleet.empty()) return std::nullopt;

  if (cost_floor.empty()) {
    floors_.clear();
    for (const auto& v : fleet) {
      floors_.push_back(
          insertion_cost_floor(v, schedule_cost(v, v.schedule, model_), pickup, dropoff, model_));
    }
    cost_floor = floors_;
  }
  if (cost_floor.size() != fleet.size()) {
    throw std::invalid_argument("cost_floor must be empty or match the fleet size");
  }

  std::optional<Choice> best;
  auto consider = [&](std::size_t index) {
    const auto found = evaluate(fleet[index], pickup, dropoff);
    if (!found) return;
    if (!best || better(found->cost, fleet[index].id, best->insertion.cost,
                        fleet[best->fleet_index].id)) {
      best = Choice{index, *found};
    }
  };

  // Evaluate the lowest floor first, then only vehicles whose floor does not
  // exceed that incumbent, by increasing floor. Once a floor exceeds the
  // incumbent (beyond the tie tolerance) no later vehicle can win or tie.
  const auto seed = static_cast<std::size_t>(
      std::min_element(cost_floor.begin(), cost_floor.end()) - cost_floor.begin());
  consider(seed);
  const double bound = best ? best->insertion.cost + kCostTieTolerance
                            : std::numeric_limits<double>::infinity();
  order_.clear();
  for (std::size_t index = 0; index < fleet.size(); ++index) {
    if (index != seed && cost_floor[index] <= bound) order_.push_back(index);
  }
  // Min-heap on (floor, index); popped lazily since most candidates are cut.
  const auto later = [&](std::size_t a, std::size_t b) {
    return cost_floor[a] > cost_floor[b] || (cost_floor[a] == cost_floor[b] && a > b);
  };
  std::make_heap(order_.begin(), order_.end(), later);
  for (auto end = order_.end(); end != order_.begin(); --end) {
    std::pop_heap(order_.begin(), end, later);
    const std::size_t index = *(end - 1);
    if (best && cost_floor[index] > best->insertion.cost + kCostTieTolerance) break;
    consider(index);
  }
  return best;
}

std::optional<Insertion> insertion_cost(const VehicleView& vehicle, const StopPoint& pickup,
                                        const StopPoint& dropoff, const ServiceModel& model) {
  Dispatcher dispatcher(model);
  return dispatcher.evaluate(vehicle, pickup, dropoff);
}

DispatchDecision assign_request(std::span<const VehicleView> fleet, const StopPoint& pickup,
                                const StopPoint& dropoff, const ServiceModel& model) {
  if (fleet.empty()) throw std::invalid_argument("assign_request needs a nonempty fleet");
  Dispatcher dispatcher(model);
  const auto choice = dispatcher.choose(fleet, pickup, dropoff);
  if (!choice) return Rejection{pickup.request};

  const auto& vehicle = fleet[choice->fleet_index];
  const auto& ins = choice->insertion;
  Schedule with_pickup = insert(vehicle.schedule, ins.pickup_position, pickup);
  return Assignment{vehicle.id, ins.pickup_position, ins.dropoff_position, ins.cost,
                    insert(with_pickup, ins.dropoff_position, dropoff)};
}

}  // namespace modsim
