#pragma once

#include <cstdint>
#include <vector>

namespace modsim {

inline constexpr double kmph_to_mps(double kmph) { return kmph / 3.6; }

struct Point {
  double x = 0.0;  // meters east
  double y = 0.0;  // meters north

  friend bool operator==(const Point&, const Point&) = default;
};

enum class TravelMode { walk, drive };

// Rectilinear road network. Roads run every ew_road_spacing meters
// (east-west roads) and ns_road_spacing meters (north-south roads); with a
// complete grid and constant speeds the shortest path length between two
// points is their L1 distance.
struct GridWorld {
  double area_width = 4000.0;
  double area_height = 15000.0;
  double ew_road_spacing = 80.0;
  double ns_road_spacing = 200.0;
  double walk_speed = kmph_to_mps(3.6);
  double cruise_speed = kmph_to_mps(35.0);

  void validate() const;
  double area_km2() const { return area_width * area_height / 1e6; }
  bool contains(Point p) const {
    return p.x >= 0.0 && p.x <= area_width && p.y >= 0.0 && p.y <= area_height;
  }
};

double rect_distance(Point a, Point b);

// Excludes boarding and acceleration losses.
double travel_time(const GridWorld& world, Point a, Point b, TravelMode mode);

// Position reached after `distance` meters along the L1 route from `from` to
// `to` that covers the x-segment first, then the y-segment.
Point interpolate_l1(Point from, Point to, double distance);

using StopIndex = std::int32_t;

// Square lattice of admitted stops with pitch D: stop (col,row) sits at
// origin + (col*D, row*D). Indices are row-major. The default origin
// (D/2, D/2) makes it cell-centered.
class StopLattice {
 public:
  StopLattice() = default;
  StopLattice(double spacing, int columns, int rows);
  StopLattice(double spacing, int columns, int rows, Point origin);

  double spacing() const { return spacing_; }
  int columns() const { return columns_; }
  int rows() const { return rows_; }
  Point origin() const { return origin_; }
  std::size_t size() const { return stops_.size(); }
  bool empty() const { return stops_.empty(); }
  const std::vector<Point>& stops() const { return stops_; }
  const Point& point(StopIndex index) const { return stops_[static_cast<std::size_t>(index)]; }

 private:
  double spacing_ = 0.0;
  int columns_ = 0;
  int rows_ = 0;
  Point origin_;
  std::vector<Point> stops_;
};

// Cell-centered lattice covering the area: ceil(extent / D) stops per axis,
// all inside the area and no point of the area farther than D/2 per axis
// from a stop. When the last cell would overhang the edge, that axis is
// shifted so its last stop sits on the edge.
StopLattice build_stop_lattice(const GridWorld& world, double spacing);

// phi(z): the stop closest to z in L1, lowest index on ties.
StopIndex nearest_stop(const StopLattice& lattice, Point z);

}  // namespace modsim
