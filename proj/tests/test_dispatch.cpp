#include <doctest.h>

#include <random>
#include <stdexcept>

#include "modsim/dispatch.hpp"
#include "test_support.hpp"

using namespace modsim;
using modsim::testing::InstanceGenerator;
using modsim::testing::SmallWorld;

namespace {

std::vector<VehicleView> views(const std::vector<VehicleState>& fleet) {
  std::vector<VehicleView> out;
  for (const auto& v : fleet) out.push_back(v.view());
  return out;
}

}  // namespace

TEST_CASE("single request into an idle vehicle at the pickup stop") {
  SmallWorld w(10000, 10000, 500);
  const auto model = w.model();
  VehicleState v;
  v.location = w.lattice.point(0);  // (250, 250)
  const StopIndex far = 7;          // (3750, 250), 3500 m away
  REQUIRE(rect_distance(w.lattice.point(0), w.lattice.point(far)) == 3500.0);
  const StopPoint p{0, 0.0, 1200.0, Action::pickup, 7};
  const StopPoint d{far, 0.0, 1200.0, Action::dropoff, 7};
  const auto ins = insertion_cost(v.view(), p, d, model);
  REQUIRE(ins);
  CHECK(ins->pickup_position == 1);
  CHECK(ins->dropoff_position == 2);
  CHECK(ins->cost == doctest::Approx(386.5));
}

TEST_CASE("expired pickup window yields no insertion") {
  SmallWorld w;
  VehicleState v;
  v.location = w.lattice.point(0);
  v.clock = 5000;
  const StopPoint p{0, 0.0, 1200.0, Action::pickup, 1};
  const StopPoint d{5, 0.0, 1200.0, Action::dropoff, 1};
  CHECK(!insertion_cost(v.view(), p, d, w.model()));
}

TEST_CASE("malformed request pair") {
  SmallWorld w;
  VehicleState v;
  const StopPoint p{0, 0.0, 1200.0, Action::pickup, 1};
  const StopPoint d{5, 0.0, 1200.0, Action::dropoff, 2};
  CHECK_THROWS_AS(insertion_cost(v.view(), p, d, w.model()), std::invalid_argument);
  CHECK_THROWS_AS(insertion_cost(v.view(), p, p, w.model()), std::invalid_argument);
  CHECK_THROWS_AS(assign_request({}, p, StopPoint{5, 0, 1200, Action::dropoff, 1}, w.model()),
                  std::invalid_argument);
}

TEST_CASE("insertion_cost matches the exhaustive enumerator") {
  SmallWorld w;
  const auto model = w.model();
  InstanceGenerator gen(w, 77);
  int found = 0, none = 0;
  for (int k = 0; k < 20000; ++k) {
    const auto v = gen.vehicle(0, 100.0, 6);
    const auto [p, d] = gen.request(100.0, 1);
    const auto got = insertion_cost(v.view(), p, d, model);
    const auto want = modsim::testing::oracle_two_phase(v, p, d, w.lattice, w.world, w.kin);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) {
      ++none;
      continue;
    }
    ++found;
    CHECK(got->pickup_position == want->i);
    CHECK(got->dropoff_position == want->j);
    CHECK(std::fabs(got->cost - want->cost) <= 1e-9);
  }
  CHECK(found > 1000);
  CHECK(none > 1000);
}

TEST_CASE("assignment properties") {
  SmallWorld w;
  const auto model = w.model();
  InstanceGenerator gen(w, 4242);
  std::uniform_int_distribution<int> fleet_size(1, 5);
  int assigned = 0;
  for (int k = 0; k < 3000; ++k) {
    std::vector<VehicleState> fleet;
    const int f = fleet_size(gen.rng());
    for (int i = 0; i < f; ++i) fleet.push_back(gen.vehicle(i, 100.0, 6));
    const auto [p, d] = gen.request(100.0, 1);
    const auto fv = views(fleet);
    const auto decision = assign_request(fv, p, d, model);
    if (auto* r = std::get_if<Rejection>(&decision)) {
      CHECK(r->request_id == 1);
      for (const auto& v : fleet) CHECK(!insertion_cost(v.view(), p, d, model));
      continue;
    }
    ++assigned;
    const auto& a = std::get<Assignment>(decision);
    const auto& v = fleet[static_cast<std::size_t>(a.vehicle_id)];
    CHECK(is_feasible(v.view(), a.new_schedule, model));
    CHECK(a.new_schedule.size() == v.schedule.size() + 2);
    CHECK(a.cost == doctest::Approx(schedule_cost(v.view(), a.new_schedule, model)));

    // Removing the two stops gives back the prior schedule.
    auto back = a.new_schedule;
    back.erase(back.begin() + static_cast<std::ptrdiff_t>(a.dropoff_position - 1));
    back.erase(back.begin() + static_cast<std::ptrdiff_t>(a.pickup_position - 1));
    REQUIRE(back.size() == v.schedule.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      CHECK(back[i].stop == v.schedule[i].stop);
      CHECK(back[i].request == v.schedule[i].request);
    }

    // Minimum over vehicles.
    for (const auto& other : fleet) {
      const auto c = insertion_cost(other.view(), p, d, model);
      if (c) CHECK(a.cost <= c->cost + kCostTieTolerance);
    }

    // Adding a vehicle never raises the chosen cost.
    auto bigger = fleet;
    bigger.push_back(gen.vehicle(f, 100.0, 6));
    const auto d2 = assign_request(views(bigger), p, d, model);
    REQUIRE(std::holds_alternative<Assignment>(d2));
    CHECK(std::get<Assignment>(d2).cost <= a.cost + kCostTieTolerance);
  }
  CHECK(assigned > 500);
}

TEST_CASE("co-located idle vehicle wins over a distant one") {
  SmallWorld w(10000, 10000, 1000);
  const auto model = w.model();
  VehicleState near, far;
  near.vehicle_id = 1;
  near.location = w.lattice.point(0);
  far.vehicle_id = 0;
  far.location = {5500, 500};
  const StopPoint p{0, 0.0, 1200.0, Action::pickup, 3};
  const StopPoint d{22, 0.0, 1200.0, Action::dropoff, 3};
  const std::vector<VehicleView> fleet{far.view(), near.view()};
  const auto decision = assign_request(fleet, p, d, model);
  REQUIRE(std::holds_alternative<Assignment>(decision));
  CHECK(std::get<Assignment>(decision).vehicle_id == 1);
}

TEST_CASE("equal costs go to the lower vehicle id") {
  SmallWorld w(10000, 10000, 1000);
  VehicleState a, b;
  a.vehicle_id = 0;
  b.vehicle_id = 1;
  a.location = b.location = w.lattice.point(11);
  const StopPoint p{0, 0.0, 1200.0, Action::pickup, 3};
  const StopPoint d{22, 0.0, 1200.0, Action::dropoff, 3};
  const std::vector<VehicleView> fleet{a.view(), b.view()};
  const auto decision = assign_request(fleet, p, d, w.model());
  REQUIRE(std::holds_alternative<Assignment>(decision));
  CHECK(std::get<Assignment>(decision).vehicle_id == 0);
}

TEST_CASE("rejection when no vehicle can make it") {
  SmallWorld w(10000, 10000, 1000);
  VehicleState v;
  v.location = {9500, 9500};
  const StopPoint p{0, 0.0, 300.0, Action::pickup, 8};
  const StopPoint d{1, 0.0, 300.0, Action::dropoff, 8};
  const std::vector<VehicleView> fleet{v.view()};
  const auto decision = assign_request(fleet, p, d, w.model());
  REQUIRE(std::holds_alternative<Rejection>(decision));
  CHECK(std::get<Rejection>(decision).request_id == 8);
}

TEST_CASE("cost floor never exceeds the insertion cost") {
  SmallWorld w;
  const auto model = w.model();
  InstanceGenerator gen(w, 31337);
  for (int k = 0; k < 20000; ++k) {
    const auto v = gen.vehicle(0, 100.0, 8);
    const auto [p, d] = gen.request(100.0, 1);
    const auto c = insertion_cost(v.view(), p, d, model);
    if (!c) continue;
    const double current = schedule_cost(v.view(), v.schedule, model);
    CHECK(insertion_cost_floor(v.view(), current, p, d, model) <= c->cost);
  }
}

TEST_CASE("Dispatcher::choose agrees with and without floors") {
  SmallWorld w;
  const auto model = w.model();
  InstanceGenerator gen(w, 99);
  Dispatcher dispatcher(model);
  for (int k = 0; k < 2000; ++k) {
    std::vector<VehicleState> fleet;
    for (int i = 0; i < 8; ++i) fleet.push_back(gen.vehicle(i, 100.0, 6));
    const auto fv = views(fleet);
    const auto [p, d] = gen.request(100.0, 1);
    std::vector<double> floors;
    for (const auto& v : fv) floors.push_back(insertion_cost_floor(v, schedule_cost(v, v.schedule, model), p, d, model));
    const auto plain = dispatcher.choose(fv, p, d);
    const auto pruned = dispatcher.choose(fv, p, d, floors);
    REQUIRE(plain.has_value() == pruned.has_value());
    if (!plain) continue;
    CHECK(plain->fleet_index == pruned->fleet_index);
    CHECK(plain->insertion.pickup_position == pruned->insertion.pickup_position);
    CHECK(plain->insertion.dropoff_position == pruned->insertion.dropoff_position);
    CHECK(plain->insertion.cost == pruned->insertion.cost);
  }
}
