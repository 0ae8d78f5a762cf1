#include "modsim/engine.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "modsim/dispatch.hpp"

namespace modsim {

namespace {

constexpr std::uint32_t kFleetStream = 0x666c6565;  // "flee"
// A vehicle closer than this to its next stop is treated as already there.
constexpr double kArrivalTolerance = 1e-9;

struct Vehicle {
  // Plan times are measured from the anchor: the last served stop, the
  // parking spot, or the point where the route was last changed mid-leg.
  Point anchor;
  double anchor_time = 0.0;
  int onboard = 0;
  Schedule plan;
  std::vector<double> times;
  std::uint64_t version = 0;
  RouteBox plan_box;  // spans the plan stops; meaningless when the plan is empty
  VehicleTrace trace;

  int level() const { return plan.empty() ? kIdle : onboard; }
};

// How a vehicle can accept new work at a given instant.
enum class Phase { idle, cruising, committed };

struct DispatchSnapshot {
  Phase phase = Phase::idle;
  VehicleView view;
  double cost = 0.0;  // cost of view.schedule from the view's position
};

class Simulator {
 public:
  Simulator(const ScenarioConfig& config, std::span<const TripRequest> demand)
      : config_(config),
        lattice_(build_stop_lattice(config.world, config.stop_spacing)),
        model_(config.world, lattice_, config.kinematics),
        dispatcher_(model_),
        demand_(demand) {}

  SimulationOutput run();

 private:
  DispatchSnapshot snapshot(VehicleId id, double now) const;
  void handle_request(const RequestRecord& record, double now);
  void serve_next_stop(VehicleId id, double now);
  void apply(VehicleId id, const DispatchSnapshot& snap, const Insertion& ins,
             const StopPoint& pickup, const StopPoint& dropoff, double now);
  void replan(Vehicle& v, VehicleId id);
  void refresh_box(Vehicle& v) const;
  void record_level(Vehicle& v, double now);

  const ScenarioConfig& config_;
  StopLattice lattice_;
  ServiceModel model_;
  Dispatcher dispatcher_;
  std::span<const TripRequest> demand_;

  std::vector<Vehicle> fleet_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  SimulationOutput out_;

  std::vector<DispatchSnapshot> snapshots_;
  std::vector<VehicleView> views_;
  std::vector<double> floors_;
};

DispatchSnapshot Simulator::snapshot(VehicleId id, double now) const {
  const Vehicle& v = fleet_[static_cast<std::size_t>(id)];
  DispatchSnapshot snap;
  if (v.plan.empty()) {
    snap.phase = Phase::idle;
    snap.view = {id, v.anchor, std::max(now, v.anchor_time), v.onboard, {}};
    return snap;
  }
  const Point next = model_.location(v.plan.front());
  const double remaining_total = rect_distance(v.anchor, next);
  const double travelled = (now - v.anchor_time) * config_.world.cruise_speed;
  if (remaining_total - travelled > kArrivalTolerance) {
    snap.phase = Phase::cruising;
    snap.view = {id, interpolate_l1(v.anchor, next, std::max(travelled, 0.0)),
                 std::max(now, v.anchor_time), v.onboard, v.plan};
    snap.cost = v.times.back() - snap.view.clock;
    return snap;
  }
  // Decelerating into, or serving, the next stop: that stop is kept and new
  // work can only follow it.
  snap.phase = Phase::committed;
  snap.view = {id, next, v.times.front(), v.onboard + occupancy_delta(v.plan.front().action),
               std::span<const StopPoint>(v.plan).subspan(1)};
  snap.cost = v.times.back() - v.times.front();
  return snap;
}

void Simulator::record_level(Vehicle& v, double now) {
  const int level = v.level();
  if (v.trace.occupancy.back().level == level) return;
  if (v.trace.occupancy.back().time == now) {
    v.trace.occupancy.back().level = level;
    if (v.trace.occupancy.size() >= 2 && v.trace.occupancy[v.trace.occupancy.size() - 2].level == level) {
      v.trace.occupancy.pop_back();
    }
    return;
  }
  v.trace.occupancy.push_back({now, level});
}

void Simulator::refresh_box(Vehicle& v) const {
  if (v.plan.empty()) return;
  v.plan_box = {model_.location(v.plan.front()), model_.location(v.plan.front())};
  for (const auto& sp : v.plan) v.plan_box.include(model_.location(sp));
}

void Simulator::replan(Vehicle& v, VehicleId id) {
  v.times = service_times({id, v.anchor, v.anchor_time, v.onboard, {}}, v.plan, model_);
  refresh_box(v);
  ++v.version;
  if (!v.plan.empty()) {
    events_.push({v.times.front(), EventKind::stop_served, id, v.version});
  }
}

void Simulator::apply(VehicleId id, const DispatchSnapshot& snap, const Insertion& ins,
                      const StopPoint& pickup, const StopPoint& dropoff, double now) {
  Vehicle& v = fleet_[static_cast<std::size_t>(id)];
  Schedule tail = insert(snap.view.schedule, ins.pickup_position, pickup);
  tail = insert(tail, ins.dropoff_position, dropoff);
  if (!is_feasible(snap.view, tail, model_)) {
    throw std::logic_error(
        fmt::format("dispatch produced an infeasible schedule for vehicle {} at t={}", id, now));
  }

  switch (snap.phase) {
    case Phase::idle:
      v.anchor_time = snap.view.clock;
      v.plan = std::move(tail);
      break;
    case Phase::cruising:
      v.trace.distance += rect_distance(v.anchor, snap.view.location);
      v.trace.path.push_back({snap.view.location, now, false});
      v.anchor = snap.view.location;
      v.anchor_time = snap.view.clock;
      v.plan = std::move(tail);
      break;
    case Phase::committed:
      v.plan.resize(1);
      v.plan.insert(v.plan.end(), tail.begin(), tail.end());
      break;
  }
  replan(v, id);
  record_level(v, now);
}

void Simulator::handle_request(const RequestRecord& record, double now) {
  const std::size_t n = fleet_.size();
  snapshots_.resize(n);
  views_.resize(n);
  floors_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    snapshots_[k] = snapshot(static_cast<VehicleId>(k), now);
    views_[k] = snapshots_[k].view;
    const Vehicle& v = fleet_[k];
    RouteBox box{views_[k].location, views_[k].location};
    if (!v.plan.empty()) {
      box.include(v.plan_box.lo);
      box.include(v.plan_box.hi);
    }
    floors_[k] = insertion_cost_floor(box, snapshots_[k].cost, record.pickup, record.dropoff, model_);
  }

  LogRecord entry;
  entry.time = now;
  entry.request = record.trip.id;
  entry.stop = model_.location(record.pickup);
  const auto choice = dispatcher_.choose(views_, record.pickup, record.dropoff, floors_);
  auto& stored = out_.requests[static_cast<std::size_t>(record.trip.id)];
  if (!choice) {
    entry.kind = LogKind::rejection;
    out_.log.push_back(entry);
    return;
  }
  const auto id = static_cast<VehicleId>(choice->fleet_index);
  apply(id, snapshots_[choice->fleet_index], choice->insertion, record.pickup, record.dropoff, now);
  stored.assigned = true;
  stored.vehicle = id;
  entry.kind = LogKind::assignment;
  entry.vehicle = id;
  entry.occupancy_after = fleet_[static_cast<std::size_t>(id)].onboard;
  out_.log.push_back(entry);
}

void Simulator::serve_next_stop(VehicleId id, double now) {
  Vehicle& v = fleet_[static_cast<std::size_t>(id)];
  const StopPoint sp = v.plan.front();
  const Point at = model_.location(sp);
  v.trace.distance += rect_distance(v.anchor, at);
  v.trace.path.push_back({at, now, true});
  v.onboard += occupancy_delta(sp.action);
  v.anchor = at;
  v.anchor_time = now;
  v.plan.erase(v.plan.begin());
  v.times.erase(v.times.begin());
  refresh_box(v);
  ++v.version;
  if (!v.plan.empty()) {
    events_.push({v.times.front(), EventKind::stop_served, id, v.version});
  }
  record_level(v, now);

  auto& request = out_.requests[static_cast<std::size_t>(sp.request)];
  if (sp.action == Action::pickup) {
    request.pickup_time = now;
  } else {
    request.dropoff_time = now;
  }
  out_.log.push_back({now, sp.action == Action::pickup ? LogKind::pickup : LogKind::dropoff,
                      sp.request, id, at, v.level()});
}

SimulationOutput Simulator::run() {
  config_.validate();
  out_.horizon = config_.demand.duration;
  out_.capacity = config_.kinematics.capacity;

  std::seed_seq seq{static_cast<std::uint32_t>(config_.demand.seed),
                    static_cast<std::uint32_t>(config_.demand.seed >> 32), kFleetStream};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> pick_stop(0, lattice_.size() - 1);
  fleet_.resize(static_cast<std::size_t>(config_.fleet_size));
  for (auto& v : fleet_) {
    v.anchor = lattice_.stops()[pick_stop(rng)];
    v.trace.path.push_back({v.anchor, 0.0, false});
    v.trace.occupancy.push_back({0.0, kIdle});
  }

  out_.requests.reserve(demand_.size());
  for (const auto& trip : demand_) {
    if (trip.id != static_cast<RequestId>(out_.requests.size())) {
      throw std::invalid_argument("demand ids must be contiguous from 0 in order");
    }
    const auto pair = to_stop_points(trip, lattice_, config_.world);
    RequestRecord record;
    record.trip = trip;
    record.pickup = pair.pickup;
    record.dropoff = pair.dropoff;
    record.ingress_time = pair.ingress_time;
    record.egress_time = pair.egress_time;
    out_.requests.push_back(record);
  }

  // Requests surface at t1, ordered by (t1, id).
  std::vector<Event> arrivals;
  arrivals.reserve(out_.requests.size());
  for (const auto& r : out_.requests) {
    arrivals.push_back({r.pickup.preferred_time, EventKind::request_arrival, r.trip.id, 0});
  }
  std::sort(arrivals.begin(), arrivals.end());

  const double cap = config_.demand.duration + config_.drain_limit;
  double now = 0.0;
  auto next_arrival = arrivals.begin();
  while (true) {
    const bool have_arrival = next_arrival != arrivals.end();
    const bool have_event = !events_.empty();
    if (!have_arrival && !have_event) break;
    Event e = (have_arrival && (!have_event || !(events_.top() < *next_arrival)))
                  ? *next_arrival++
                  : (events_.top());
    if (e.kind != EventKind::request_arrival) events_.pop();
    if (e.time > cap) break;
    now = e.time;
    if (e.kind == EventKind::request_arrival) {
      handle_request(out_.requests[static_cast<std::size_t>(e.subject)], now);
    } else {
      const auto id = static_cast<VehicleId>(e.subject);
      if (fleet_[static_cast<std::size_t>(id)].version == e.version) serve_next_stop(id, now);
    }
  }
  out_.end_time = now;
  out_.vehicles.reserve(fleet_.size());
  for (auto& v : fleet_) out_.vehicles.push_back(std::move(v.trace));
  return std::move(out_);
}

}  // namespace

std::vector<Point> VehicleTrace::served_stops() const {
  std::vector<Point> stops;
  for (const auto& p : path) {
    if (p.served_stop) stops.push_back(p.location);
  }
  return stops;
}

SimulationOutput run_simulation(const ScenarioConfig& config, std::span<const TripRequest> demand) {
  Simulator sim(config, demand);
  return sim.run();
}

SimulationOutput run_simulation(const ScenarioConfig& config) {
  config.validate();
  const auto demand = generate_demand(config.demand, config.world);
  return run_simulation(config, demand);
}

LoadSnapshot snapshot_counts(const SimulationOutput& output, double at) {
  LoadSnapshot counts;
  for (const auto& entry : output.log) {
    if (entry.time > at) continue;
    switch (entry.kind) {
      case LogKind::assignment:
        ++counts.submitted;
        ++counts.assigned;
        break;
      case LogKind::rejection:
        ++counts.submitted;
        break;
      case LogKind::pickup:
        ++counts.picked_up;
        break;
      case LogKind::dropoff:
        ++counts.dropped_off;
        break;
    }
  }
  return counts;
}

LogAudit audit_log(const SimulationOutput& output) {
  LogAudit audit;
  std::vector<char> state(output.requests.size(), 0);  // 0 none, 1 picked, 2 dropped
  std::vector<int> onboard(output.vehicles.size(), 0);
  auto outside = [](double t, const StopPoint& sp) {
    return t < sp.preferred_time || !(t < sp.preferred_time + sp.max_extra_time);
  };
  for (const auto& entry : output.log) {
    if (entry.kind != LogKind::pickup && entry.kind != LogKind::dropoff) continue;
    const auto index = static_cast<std::size_t>(entry.request);
    const auto& request = output.requests.at(index);
    int& n = onboard.at(static_cast<std::size_t>(entry.vehicle.value()));
    n += entry.kind == LogKind::pickup ? 1 : -1;
    if (n < 0 || n >= output.capacity) ++audit.capacity_violations;
    const int reported = entry.occupancy_after.value_or(kIdle);
    if (reported != n && !(reported == kIdle && n == 0)) ++audit.capacity_violations;
    if (entry.kind == LogKind::pickup) {
      ++audit.pickups_checked;
      if (outside(entry.time, request.pickup)) ++audit.window_violations;
      if (state[index] != 0) ++audit.order_violations;
      state[index] = 1;
    } else {
      ++audit.dropoffs_checked;
      if (outside(entry.time, request.dropoff)) ++audit.window_violations;
      if (state[index] != 1) ++audit.order_violations;
      state[index] = 2;
    }
  }
  return audit;
}

const char* to_string(LogKind kind) {
  switch (kind) {
    case LogKind::assignment: return "assignment";
    case LogKind::rejection: return "rejection";
    case LogKind::pickup: return "pickup";
    case LogKind::dropoff: return "dropoff";
  }
  return "?";
}

void write_event_log(std::ostream& out, const SimulationOutput& output) {
  fmt::print(out, "time_s,kind,request_id,vehicle_id,stop_x_m,stop_y_m,occupancy_after\n");
  for (const auto& e : output.log) {
    fmt::print(out, "{:.6f},{},{},{},{:.3f},{:.3f},{}\n", e.time, to_string(e.kind), e.request,
               e.vehicle ? std::to_string(*e.vehicle) : std::string(), e.stop.x, e.stop.y,
               e.occupancy_after ? std::to_string(*e.occupancy_after) : std::string());
  }
}

}  // namespace modsim
