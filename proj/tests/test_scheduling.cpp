#include <doctest.h>

#include <random>
#include <stdexcept>

#include "modsim/errors.hpp"
#include "modsim/scheduling.hpp"
#include "test_support.hpp"

using namespace modsim;
using modsim::testing::SmallWorld;

namespace {

// Vehicle 350 m west of the stop at (500, 500).
struct Fixture {
  SmallWorld w{10000, 10000, 1000};
  ServiceModel model = w.model();
  VehicleState vehicle;
  StopPoint pickup{0, 0.0, 1200.0, Action::pickup, 1};
  StopPoint dropoff{0, 0.0, 1200.0, Action::dropoff, 1};

  Fixture() {
    vehicle.location = {150, 500};
    vehicle.clock = 0;
  }
};

}  // namespace

TEST_CASE("kinematics") {
  KinematicsConfig k;
  CHECK(k.service_duration(Action::pickup) == 5.0);
  CHECK(k.service_duration(Action::dropoff) == 10.0);
  CHECK(stop_loss_from_acceleration(kmph_to_mps(35), 1.676) == doctest::Approx(11.6).epsilon(0.005));
  CHECK_NOTHROW(k.validate());
  k.capacity = 0;
  CHECK_THROWS_AS(k.validate(), ConfigError);
}

TEST_CASE("service times") {
  Fixture f;
  CHECK(service_times(f.vehicle.view(), {}, f.model).empty());

  const std::vector<StopPoint> one{f.pickup};
  const auto e1 = service_times(f.vehicle.view(), one, f.model);
  REQUIRE(e1.size() == 1);
  CHECK(e1[0] == doctest::Approx(52.5));

  const std::vector<StopPoint> two{f.pickup, f.dropoff};
  const auto e2 = service_times(f.vehicle.view(), two, f.model);
  CHECK(e2[1] == doctest::Approx(62.5));

  // Already at the stop: no driving, no stop loss.
  f.vehicle.location = {500, 500};
  CHECK(service_times(f.vehicle.view(), one, f.model)[0] == doctest::Approx(5.0));
}

TEST_CASE("feasibility") {
  Fixture f;
  CHECK(is_feasible(f.vehicle.view(), {}, f.model));

  std::vector<StopPoint> s{f.pickup, f.dropoff};
  CHECK(is_feasible(f.vehicle.view(), s, f.model));

  SUBCASE("too early") {
    s[0].preferred_time = 60;
    CHECK(!is_feasible(f.vehicle.view(), s, f.model));
  }
  SUBCASE("window closes before service") {
    s[0].max_extra_time = 52.5;  // half-open: completion at exactly t + dt is late
    CHECK(!is_feasible(f.vehicle.view(), s, f.model));
    s[0].max_extra_time = 52.6;
    CHECK(is_feasible(f.vehicle.view(), s, f.model));
  }
  SUBCASE("capacity is strict") {
    KinematicsConfig k;
    k.capacity = 1;
    const ServiceModel tight(f.w.world, f.w.lattice, k);
    CHECK(!is_feasible(f.vehicle.view(), s, tight));
    k.capacity = 2;
    const ServiceModel roomy(f.w.world, f.w.lattice, k);
    CHECK(is_feasible(f.vehicle.view(), s, roomy));
  }
  SUBCASE("nobody to drop") {
    const std::vector<StopPoint> d{f.dropoff};
    CHECK(!is_feasible(f.vehicle.view(), d, f.model));
    f.vehicle.onboard = 1;
    CHECK(is_feasible(f.vehicle.view(), d, f.model));
  }
}

TEST_CASE("schedule cost") {
  Fixture f;
  CHECK(schedule_cost(f.vehicle.view(), {}, f.model) == 0.0);
  std::vector<StopPoint> s{f.pickup, f.dropoff};
  CHECK(schedule_cost(f.vehicle.view(), s, f.model) == doctest::Approx(62.5));
  // Windows do not enter the cost.
  s[0].preferred_time = 1e6;
  s[1].max_extra_time = 1;
  CHECK(schedule_cost(f.vehicle.view(), s, f.model) == doctest::Approx(62.5));
  f.vehicle.clock = 1000;
  CHECK(schedule_cost(f.vehicle.view(), s, f.model) == doctest::Approx(62.5));
}

TEST_CASE("insert") {
  const StopPoint a{1, 0, 1, Action::pickup, 1}, b{2, 0, 1, Action::dropoff, 1},
      x{3, 0, 1, Action::pickup, 2};
  CHECK(insert({}, 1, x).size() == 1);
  const std::vector<StopPoint> s{a, b};
  CHECK(insert(s, 1, x)[0].stop == 3);
  CHECK(insert(s, 2, x)[1].stop == 3);
  CHECK(insert(s, 3, x)[2].stop == 3);
  CHECK(insert(s, 2, x)[2].stop == 2);
  CHECK_THROWS_AS(insert(s, 0, x), std::out_of_range);
  CHECK_THROWS_AS(insert(s, 4, x), std::out_of_range);
}

TEST_CASE("schedule arithmetic matches a naive recomputation") {
  SmallWorld w;
  const auto model = w.model();
  modsim::testing::InstanceGenerator gen(w, 2024);
  std::uniform_real_distribution<double> jitter(-200.0, 200.0);
  std::bernoulli_distribution coin(0.3);
  int feasible = 0, infeasible = 0;
  for (int k = 0; k < 100000; ++k) {
    auto v = gen.vehicle(0, 100.0, 8);
    // Perturb some windows so both outcomes occur.
    for (auto& sp : v.schedule)
      if (coin(gen.rng())) sp.preferred_time += jitter(gen.rng());
    if (coin(gen.rng())) v.onboard += 1;
    const auto oracle = modsim::testing::naive_evaluate(v.location, v.clock, v.onboard, v.schedule,
                                                        w.lattice, w.world, w.kin);
    const bool got = is_feasible(v.view(), v.schedule, model);
    CHECK(got == oracle.feasible);
    (got ? feasible : infeasible)++;
    const double cost = schedule_cost(v.view(), v.schedule, model);
    CHECK(cost == doctest::Approx(oracle.cost).epsilon(1e-12));
    if (!v.schedule.empty()) {
      const auto e = service_times(v.view(), v.schedule, model);
      CHECK(cost == doctest::Approx(e.back() - v.clock).epsilon(1e-12));
      for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] >= e[i - 1]);
    }
  }
  CHECK(feasible > 1000);
  CHECK(infeasible > 1000);
}

TEST_CASE("matched pairs leave the vehicle empty") {
  SmallWorld w;
  modsim::testing::InstanceGenerator gen(w, 5);
  for (int k = 0; k < 1000; ++k) {
    const auto v = gen.vehicle(0, 0.0, 8);
    int n = v.onboard;
    for (const auto& sp : v.schedule) n += occupancy_delta(sp.action);
    CHECK(n == 0);
  }
}
