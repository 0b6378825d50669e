#include "wsnphm/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm {

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double squared_distance(Point a, Point b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

bool Region::contains(Point p) const noexcept {
  return p.x >= 0.0 && p.x <= length && p.y >= 0.0 && p.y <= width;
}

void Region::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width)) {
    throw InvalidRegionError(fmt::format("region must have positive finite sides, got {} x {}", length, width));
  }
  if (!contains(sink)) {
    throw InvalidRegionError(fmt::format("sink ({}, {}) lies outside the region", sink.x, sink.y));
  }
}

double coverage_radius(const Region& region) {
  if (!(region.length > 0.0) || !(region.width > 0.0)) {
    throw InvalidRegionError(fmt::format("non-positive region area {} x {}", region.length, region.width));
  }
  return 0.1 * std::sqrt(region.area() / std::numbers::pi);
}

std::string_view to_string(SensorKind kind) noexcept {
  switch (kind) {
    case SensorKind::Temperature:
      return "temperature";
    case SensorKind::Pressure:
      return "pressure";
    case SensorKind::Humidity:
      return "humidity";
  }
  return "unknown";
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Leaf:
      return "leaf";
    case Role::ClusterHead:
      return "cluster_head";
    case Role::DistributionNode:
      return "distribution";
  }
  return "unknown";
}

Fleet::Fleet(Region region, std::vector<Node> nodes)
    : Fleet(region, std::move(nodes), wsnphm::coverage_radius(region)) {}

Fleet::Fleet(Region region, std::vector<Node> nodes, double coverage_radius)
    : region_(region), coverage_radius_(coverage_radius), nodes_(std::move(nodes)) {
  region_.validate();
  if (!(coverage_radius_ > 0.0)) {
    throw Error(fmt::format("coverage radius must be positive, got {}", coverage_radius_));
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != static_cast<NodeId>(i)) {
      throw Error(fmt::format("node at index {} has id {}", i, nodes_[i].id));
    }
    if (nodes_[i].battery < 0.0) {
      throw Error(fmt::format("node {} has negative battery", i));
    }
  }
}

NodeId Fleet::add_node(SensorKind kind, Point position, Role role, double battery) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, kind, position, role, battery, battery > 0.0 ? Health::Ok : Health::Dead});
  return id;
}

std::size_t Fleet::alive_count() const noexcept {
  return static_cast<std::size_t>(std::ranges::count_if(nodes_, [](const Node& n) { return n.alive(); }));
}

std::size_t Fleet::alive_sensor_count() const noexcept {
  return static_cast<std::size_t>(
      std::ranges::count_if(nodes_, [](const Node& n) { return n.senses() && n.alive(); }));
}

std::size_t Fleet::sensor_count() const noexcept {
  return static_cast<std::size_t>(std::ranges::count_if(nodes_, [](const Node& n) { return n.senses(); }));
}

namespace {

std::vector<Node> draw_positions(const Region& region, const KindCounts& counts, double battery, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, region.length);
  std::uniform_real_distribution<double> uy(0.0, region.width);
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(counts.total()));
  const std::array<int, 3> per_kind{counts.temperature, counts.pressure, counts.humidity};
  for (SensorKind kind : kSensorKinds) {
    for (int i = 0; i < per_kind[index_of(kind)]; ++i) {
      const double x = ux(rng);
      const double y = uy(rng);
      nodes.push_back(Node{static_cast<NodeId>(nodes.size()), kind, {x, y}, Role::Leaf, battery, Health::Ok});
    }
  }
  return nodes;
}

}  // namespace

Fleet deploy(const Region& region, const KindCounts& counts, Rng& rng, const DeployOptions& options) {
  region.validate();
  if (counts.temperature < 0 || counts.pressure < 0 || counts.humidity < 0) {
    throw Error("negative sensor count");
  }
  if (counts.total() == 0) {
    throw EmptyFleetError("cannot deploy an empty fleet");
  }
  if (options.max_attempts < 1) {
    throw Error("deployment needs at least one attempt");
  }

  Fleet best;
  double best_covered = -1.0;
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    // Each attempt uses its own sub-seed so the accepted layout does not
    // depend on how many draws earlier attempts consumed.
    Rng attempt_rng(derive_seed(rng(), static_cast<std::uint64_t>(attempt)));
    Fleet fleet(region, draw_positions(region, counts, options.battery, attempt_rng));
    const double covered = covered_fraction(fleet, options.coverage_grid);
    if (covered > best_covered) {
      best_covered = covered;
      best = std::move(fleet);
    }
    if (best_covered >= options.min_coverage) {
      break;
    }
  }

  const double deficit = std::max(0.0, options.min_coverage - best_covered);
  if (deficit > 0.0 && options.require_coverage) {
    throw CoverageError(fmt::format("best of {} deployments covers {:.4f} of the region, below {:.4f}",
                                    options.max_attempts, best_covered, options.min_coverage));
  }
  best.set_coverage_report(best_covered, deficit);
  return best;
}

double covered_fraction(const Fleet& fleet, int grid_resolution) {
  if (grid_resolution < 2) {
    throw Error(fmt::format("grid resolution must be at least 2, got {}", grid_resolution));
  }
  const Region& region = fleet.region();
  const auto n = static_cast<std::size_t>(grid_resolution);
  const double dx = region.length / static_cast<double>(n - 1);
  const double dy = region.width / static_cast<double>(n - 1);
  const double r = fleet.coverage_radius();
  const double r2 = r * r;

  std::vector<std::uint8_t> covered(n * n, 0);
  auto clamp_index = [n](double v) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  for (const Node& node : fleet.nodes()) {
    if (!node.senses() || !(node.battery > 0.0)) {
      continue;
    }
    const std::size_t i0 = clamp_index(std::floor((node.position.x - r) / dx));
    const std::size_t i1 = clamp_index(std::ceil((node.position.x + r) / dx));
    const std::size_t j0 = clamp_index(std::floor((node.position.y - r) / dy));
    const std::size_t j1 = clamp_index(std::ceil((node.position.y + r) / dy));
    for (std::size_t i = i0; i <= i1; ++i) {
      for (std::size_t j = j0; j <= j1; ++j) {
        const Point p{static_cast<double>(i) * dx, static_cast<double>(j) * dy};
        if (squared_distance(p, node.position) <= r2) {
          covered[i * n + j] = 1;
        }
      }
    }
  }
  const auto hits = std::ranges::count(covered, std::uint8_t{1});
  return static_cast<double>(hits) / static_cast<double>(n * n);
}

}  // namespace wsnphm
