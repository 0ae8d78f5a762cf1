#include "modsim/demand.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "modsim/errors.hpp"

namespace modsim {

namespace {

constexpr std::uint32_t kDemandStream = 0x64656d61;  // "dema"
constexpr const char* kDemandHeader = "id,appear_s,ox_m,oy_m,dx_m,dy_m,delta_t_s";

}  // namespace

void DemandConfig::validate() const {
  if (!(rate > 0.0)) throw ConfigError(fmt::format("rate must be > 0, got {}", rate));
  if (!(duration > 0.0)) throw ConfigError(fmt::format("duration must be > 0, got {}", duration));
  if (!(max_extra_time > 0.0)) {
    throw ConfigError(fmt::format("max_extra_time must be > 0, got {}", max_extra_time));
  }
  if (walk_threshold < 0.0) {
    throw ConfigError(fmt::format("walk_threshold must be >= 0, got {}", walk_threshold));
  }
}

std::vector<TripRequest> generate_demand(const DemandConfig& config, const GridWorld& world,
                                         DemandTrace* trace) {
  config.validate();
  world.validate();

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), kDemandStream};
  std::mt19937_64 rng(seq);
  const double per_second = config.rate * world.area_km2() / 3600.0;
  std::exponential_distribution<double> gap(per_second);
  std::uniform_real_distribution<double> ux(0.0, world.area_width);
  std::uniform_real_distribution<double> uy(0.0, world.area_height);

  std::vector<TripRequest> requests;
  double now = 0.0;
  while (true) {
    now += gap(rng);
    if (now >= config.duration) break;
    // Always draw both endpoints so filtering is a thinning of one stream.
    const Point origin{ux(rng), uy(rng)};
    const Point destination{ux(rng), uy(rng)};
    if (trace != nullptr) trace->arrival_times.push_back(now);
    if (rect_distance(origin, destination) <= config.walk_threshold) continue;
    requests.push_back({static_cast<RequestId>(requests.size()), origin, destination, now,
                        config.max_extra_time});
  }
  return requests;
}

StopPointPair to_stop_points(const TripRequest& request, const StopLattice& lattice,
                             const GridWorld& world) {
  const StopIndex ingress_stop = nearest_stop(lattice, request.origin);
  const StopIndex egress_stop = nearest_stop(lattice, request.destination);
  const Point ingress_point = lattice.point(ingress_stop);
  const Point egress_point = lattice.point(egress_stop);

  StopPointPair pair;
  pair.ingress_time = travel_time(world, request.origin, ingress_point, TravelMode::walk);
  pair.egress_time = travel_time(world, egress_point, request.destination, TravelMode::walk);
  const double t1 = request.appear_time + pair.ingress_time;
  const double t2 = t1 + travel_time(world, ingress_point, egress_point, TravelMode::drive);
  pair.pickup = {ingress_stop, t1, request.max_extra_time, Action::pickup, request.id};
  pair.dropoff = {egress_stop, t2, request.max_extra_time, Action::dropoff, request.id};
  return pair;
}

void write_demand_csv(std::ostream& out, std::span<const TripRequest> requests) {
  fmt::print(out, "{}\n", kDemandHeader);
  for (const auto& r : requests) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.id, r.appear_time,
               r.origin.x, r.origin.y, r.destination.x, r.destination.y, r.max_extra_time);
  }
}

std::vector<TripRequest> read_demand_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDemandHeader) {
    throw ConfigError(fmt::format("demand file: expected header '{}'", kDemandHeader));
  }
  std::vector<TripRequest> requests;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    TripRequest r;
    char c1, c2, c3, c4, c5, c6;
    fields >> r.id >> c1 >> r.appear_time >> c2 >> r.origin.x >> c3 >> r.origin.y >> c4 >>
        r.destination.x >> c5 >> r.destination.y >> c6 >> r.max_extra_time;
    if (!fields || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',') {
      throw ConfigError(fmt::format("demand file: malformed row at line {}", line_no));
    }
    requests.push_back(r);
  }
  return requests;
}

}  // namespace modsim
