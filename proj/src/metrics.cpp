#include "modsim/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/core.h>
#include <fmt/ostream.h>

namespace modsim {

namespace {

double path_length(Point start, std::span<const Point> points) {
  double length = 0.0;
  Point here = start;
  for (const auto& p : points) {
    length += rect_distance(here, p);
    here = p;
  }
  return length;
}

std::string optional_field(const std::optional<double>& value) {
  return value ? fmt::format("{:.6f}", *value) : std::string();
}

}  // namespace

double min_visit_length(Point start, std::span<const Point> others) {
  if (others.empty()) throw std::invalid_argument("min_visit_length needs at least one point");
  std::vector<std::size_t> order(others.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Point> permuted(others.size());
  double best = std::numeric_limits<double>::infinity();
  do {
    for (std::size_t k = 0; k < order.size(); ++k) permuted[k] = others[order[k]];
    best = std::min(best, path_length(start, permuted));
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

double tortuosity_at(std::span<const Point> trajectory, std::size_t i, int horizon) {
  if (horizon < 1 || i + static_cast<std::size_t>(horizon) >= trajectory.size()) {
    throw std::out_of_range(fmt::format("tortuosity window [{}, {}] exceeds trajectory of {} points",
                                        i, i + static_cast<std::size_t>(std::max(horizon, 0)),
                                        trajectory.size()));
  }
  const auto rest = trajectory.subspan(i + 1, static_cast<std::size_t>(horizon));
  // The realised order is one of the enumerated ones and is summed the same
  // way, so realised >= shortest holds exactly.
  const double realised = path_length(trajectory[i], rest);
  const double shortest = min_visit_length(trajectory[i], rest);
  if (shortest == 0.0) return 1.0;  // every point coincides with the start
  return realised / shortest;
}

std::optional<double> vehicle_tortuosity(std::span<const Point> trajectory, int horizon) {
  if (horizon < 1 || trajectory.size() <= static_cast<std::size_t>(horizon)) return std::nullopt;
  const std::size_t windows = trajectory.size() - static_cast<std::size_t>(horizon);
  double sum = 0.0;
  for (std::size_t i = 0; i < windows; ++i) sum += tortuosity_at(trajectory, i, horizon);
  return sum / static_cast<double>(windows);
}

TortuosityReport tortuosity_report(const SimulationOutput& output, int horizon) {
  TortuosityReport report;
  report.horizon = horizon;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& vehicle : output.vehicles) {
    const auto stops = vehicle.served_stops();
    auto value = vehicle_tortuosity(stops, horizon);
    if (value) {
      sum += *value;
      ++defined;
    }
    report.per_vehicle.push_back(value);
  }
  if (defined > 0) report.fleet_mean = sum / static_cast<double>(defined);
  return report;
}

double SharingHistogram::fraction(int level) const {
  const auto bin = static_cast<std::size_t>(level + 1);
  return bin < fleet_mean.size() ? fleet_mean[bin] : 0.0;
}

double SharingHistogram::fraction_at_least(int level) const {
  double sum = 0.0;
  for (std::size_t bin = static_cast<std::size_t>(std::max(level + 1, 0)); bin < fleet_mean.size(); ++bin) {
    sum += fleet_mean[bin];
  }
  return sum;
}

SharingHistogram sharing_histogram(std::span<const VehicleTrace> vehicles, double window_end) {
  SharingHistogram hist;
  std::size_t bins = 1;
  for (const auto& v : vehicles) {
    std::vector<double> share(1, 0.0);
    const auto& changes = v.occupancy;
    for (std::size_t k = 0; k < changes.size(); ++k) {
      const double begin = std::min(changes[k].time, window_end);
      const double end = k + 1 < changes.size() ? std::min(changes[k + 1].time, window_end) : window_end;
      if (end <= begin) continue;
      const auto bin = static_cast<std::size_t>(changes[k].level + 1);
      if (share.size() <= bin) share.resize(bin + 1, 0.0);
      share[bin] += end - begin;
    }
    // A vehicle without any recorded change is idle the whole window.
    if (changes.empty()) share[0] = window_end;
    const double total = std::accumulate(share.begin(), share.end(), 0.0);
    for (auto& s : share) s = total > 0.0 ? s / total : 0.0;
    if (total <= 0.0) share[0] = 1.0;
    bins = std::max(bins, share.size());
    hist.per_vehicle.push_back(std::move(share));
  }
  hist.fleet_mean.assign(bins, 0.0);
  for (const auto& share : hist.per_vehicle) {
    for (std::size_t b = 0; b < share.size(); ++b) hist.fleet_mean[b] += share[b];
  }
  if (!hist.per_vehicle.empty()) {
    for (auto& f : hist.fleet_mean) f /= static_cast<double>(hist.per_vehicle.size());
  }
  return hist;
}

QoSSummary qos_summary(const SimulationOutput& output) {
  QoSSummary q;
  double ingress = 0.0, waiting = 0.0, onboard = 0.0, egress = 0.0;
  for (const auto& r : output.requests) {
    ++q.submitted;
    if (!r.assigned) {
      ++q.rejected;
      continue;
    }
    if (!r.served()) continue;
    ++q.served;
    ingress += r.ingress_time;
    waiting += r.pickup_time - r.pickup.preferred_time;
    onboard += r.dropoff_time - r.pickup_time;
    egress += r.egress_time;
    q.max_ingress = std::max(q.max_ingress, r.ingress_time);
  }
  if (q.served > 0) {
    const auto n = static_cast<double>(q.served);
    q.ingress = ingress / n;
    q.waiting = waiting / n;
    q.onboard = onboard / n;
    q.egress = egress / n;
    q.total = (ingress + waiting + onboard + egress) / n;
  }
  q.rejection_fraction = q.submitted > 0 ? static_cast<double>(q.rejected) / static_cast<double>(q.submitted) : 0.0;
  return q;
}

IngressEstimate analytic_ingress(double spacing, double walk_speed) {
  if (!(walk_speed > 0.0)) throw std::invalid_argument("walk speed must be > 0");
  if (spacing < 0.0) throw std::invalid_argument("stop spacing must be >= 0");
  return {spacing / 2.0, spacing / 2.0 / walk_speed, spacing / walk_speed};
}

MetricsRow summarize(const ScenarioConfig& cell, const SimulationOutput& output) {
  MetricsRow row;
  row.spacing = cell.stop_spacing;
  row.fleet = cell.fleet_size;
  row.rate = cell.demand.rate;
  const auto snap = snapshot_counts(output, cell.snapshot_time);
  row.assigned_3h = snap.assigned;
  row.picked_3h = snap.picked_up;
  row.dropped_3h = snap.dropped_off;

  const auto qos = qos_summary(output);
  row.submitted = qos.submitted;
  row.rejected = qos.rejected;
  row.ingress_s = qos.ingress;
  row.wait_s = qos.waiting;
  row.onboard_s = qos.onboard;
  row.egress_s = qos.egress;
  row.total_s = qos.total;

  double distance = 0.0;
  for (const auto& v : output.vehicles) distance += v.distance;
  row.km_per_vehicle = output.vehicles.empty() ? 0.0 : distance / 1000.0 / static_cast<double>(output.vehicles.size());
  row.tortuosity = tortuosity_report(output, cell.tortuosity_horizon).fleet_mean;
  row.idle_frac = sharing_histogram(output.vehicles, output.horizon).fraction(kIdle);
  return row;
}

std::string metrics_header() {
  return "spacing_m,fleet,rate,submitted,assigned_3h,picked_3h,dropped_3h,rejected,km_per_vehicle,"
         "tortuosity,ingress_s,wait_s,onboard_s,egress_s,total_s,idle_frac";
}

std::string format_metrics_row(const MetricsRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{:.6f},{},{},{},{},{},{},{:.6f}", r.spacing, r.fleet,
                     r.rate, r.submitted, r.assigned_3h, r.picked_3h, r.dropped_3h, r.rejected,
                     r.km_per_vehicle, optional_field(r.tortuosity), optional_field(r.ingress_s),
                     optional_field(r.wait_s), optional_field(r.onboard_s),
                     optional_field(r.egress_s), optional_field(r.total_s), r.idle_frac);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  fmt::print(out, "{}\n", metrics_header());
  for (const auto& row : rows) fmt::print(out, "{}\n", format_metrics_row(row));
}

}  // namespace modsim
