#include "modsim/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "modsim/errors.hpp"

namespace modsim {

void GridWorld::validate() const {
  auto positive = [](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ConfigError(fmt::format("{} must be strictly positive, got {}", name, value));
    }
  };
  positive(area_width, "area_width_m");
  positive(area_height, "area_height_m");
  positive(ew_road_spacing, "ew_road_spacing_m");
  positive(ns_road_spacing, "ns_road_spacing_m");
  positive(walk_speed, "walk_speed");
  positive(cruise_speed, "cruise_speed");
}

double rect_distance(Point a, Point b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double travel_time(const GridWorld& world, Point a, Point b, TravelMode mode) {
  const double speed = mode == TravelMode::walk ? world.walk_speed : world.cruise_speed;
  return rect_distance(a, b) / speed;
}

Point interpolate_l1(Point from, Point to, double distance) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (distance <= 0.0) return from;
  if (distance >= std::abs(dx) + std::abs(dy)) return to;
  if (distance < std::abs(dx)) {
    return {from.x + std::copysign(distance, dx), from.y};
  }
  return {to.x, from.y + std::copysign(distance - std::abs(dx), dy)};
}

StopLattice::StopLattice(double spacing, int columns, int rows)
    : StopLattice(spacing, columns, rows, {spacing / 2.0, spacing / 2.0}) {}

StopLattice::StopLattice(double spacing, int columns, int rows, Point origin)
    : spacing_(spacing), columns_(columns), rows_(rows), origin_(origin) {
  stops_.reserve(static_cast<std::size_t>(columns) * static_cast<std::size_t>(rows));
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < columns; ++col) {
      stops_.push_back({origin.x + col * spacing, origin.y + row * spacing});
    }
  }
}

namespace {

struct Axis {
  int count = 0;
  double offset = 0.0;
};

// Enough stops to leave no point farther than D/2 from one. The first sits
// at D/2 unless that would push the last past the edge; then the last sits
// on the edge.
Axis lattice_axis(double extent, double spacing) {
  Axis axis;
  axis.count = std::max(1, static_cast<int>(std::ceil(extent / spacing - 1e-9)));
  const double room = extent - (axis.count - 1) * spacing;
  axis.offset = std::min(spacing / 2.0, room);
  return axis;
}

// Closest lattice coordinate along one axis; ties go to the lower one.
int nearest_axis(double value, double origin, double spacing, int count) {
  const double raw = (value - origin) / spacing;
  int lo = std::clamp(static_cast<int>(std::floor(raw)), 0, count - 1);
  const int hi = std::min(lo + 1, count - 1);
  const double d_lo = std::abs(value - (origin + lo * spacing));
  const double d_hi = std::abs(value - (origin + hi * spacing));
  return d_hi < d_lo ? hi : lo;
}

}  // namespace

StopLattice build_stop_lattice(const GridWorld& world, double spacing) {
  world.validate();
  if (!(spacing > 0.0) || spacing > std::min(world.area_width, world.area_height)) {
    throw ConfigError(fmt::format(
        "stop spacing must lie in (0, {}], got {}", std::min(world.area_width, world.area_height),
        spacing));
  }
  const Axis x = lattice_axis(world.area_width, spacing);
  const Axis y = lattice_axis(world.area_height, spacing);
  return StopLattice(spacing, x.count, y.count, {x.offset, y.offset});
}

StopIndex nearest_stop(const StopLattice& lattice, Point z) {
  if (lattice.empty()) throw ConfigError("nearest_stop on an empty stop lattice");
  // L1 is separable, so the per-axis nearest coordinates give the nearest stop,
  // and lower per-axis picks give the lowest row-major index among ties.
  const int col = nearest_axis(z.x, lattice.origin().x, lattice.spacing(), lattice.columns());
  const int row = nearest_axis(z.y, lattice.origin().y, lattice.spacing(), lattice.rows());
  return static_cast<StopIndex>(row * lattice.columns() + col);
}

}  // namespace modsim
