#include "wsnphm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm {

std::string_view to_string(TopologyKind kind) noexcept {
  switch (kind) {
    case TopologyKind::Distributed:
      return "distributed";
    case TopologyKind::Hierarchical:
      return "hierarchical";
    case TopologyKind::Centralized:
      return "centralized";
    case TopologyKind::Decentralized:
      return "decentralized";
  }
  return "unknown";
}

std::optional<TopologyKind> parse_topology(std::string_view name) noexcept {
  for (TopologyKind kind : kTopologyKinds) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

std::string NextHop::to_string() const {
  if (is_sink()) {
    return "sink";
  }
  if (is_disconnected()) {
    return "none";
  }
  return std::to_string(value_);
}

// ---------------------------------------------------------------------------
// K-means

double within_cluster_cost(std::span<const Point> points, std::span<const Point> centroids,
                           std::span<const int> memberships) noexcept {
  double cost = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cost += squared_distance(points[i], centroids[static_cast<std::size_t>(memberships[i])]);
  }
  return cost;
}

namespace {

int nearest_centroid(Point p, std::span<const Point> centroids) noexcept {
  int best = 0;
  double best_d2 = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d2 = squared_distance(p, centroids[c]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

ClusterModel kmeans(std::span<const Point> points, int k, Rng& rng, int max_iterations) {
  if (k < 1) {
    throw ClusteringError(fmt::format("k must be at least 1, got {}", k));
  }
  if (static_cast<std::size_t>(k) > points.size()) {
    throw ClusteringError(fmt::format("k = {} exceeds the {} points", k, points.size()));
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  ClusterModel model;
  model.k = k;
  for (std::size_t idx : order) {
    const Point p = points[idx];
    if (std::ranges::find(model.centroids, p) == model.centroids.end()) {
      model.centroids.push_back(p);
      if (model.centroids.size() == static_cast<std::size_t>(k)) {
        break;
      }
    }
  }
  if (model.centroids.size() < static_cast<std::size_t>(k)) {
    throw ClusteringError(fmt::format("only {} distinct points for k = {}", model.centroids.size(), k));
  }

  model.memberships.assign(points.size(), -1);
  std::vector<double> sum_x(static_cast<std::size_t>(k));
  std::vector<double> sum_y(static_cast<std::size_t>(k));
  std::vector<int> counts(static_cast<std::size_t>(k));

  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int c = nearest_centroid(points[i], model.centroids);
      if (c != model.memberships[i]) {
        model.memberships[i] = c;
        changed = true;
      }
    }
    if (!changed) {
      model.converged = true;
      break;
    }
    ++model.iterations;

    std::ranges::fill(sum_x, 0.0);
    std::ranges::fill(sum_y, 0.0);
    std::ranges::fill(counts, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(model.memberships[i]);
      sum_x[c] += points[i].x;
      sum_y[c] += points[i].y;
      ++counts[c];
    }
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
      // An emptied cluster keeps its previous centroid.
      if (counts[c] > 0) {
        model.centroids[c] = {sum_x[c] / counts[c], sum_y[c] / counts[c]};
      }
    }
    model.cost_history.push_back(within_cluster_cost(points, model.centroids, model.memberships));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Routing

namespace {

bool usable(const Fleet& fleet, const std::vector<std::uint8_t>& dead, NodeId id) {
  return fleet.node(id).alive() && !dead[static_cast<std::size_t>(id)];
}

// Nearest usable node with `role`, within `max_range` of `from`; ties go to
// the lowest id.
std::optional<NodeId> nearest_with_role(const Fleet& fleet, const std::vector<std::uint8_t>& dead, Point from,
                                        Role role, double max_range) {
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Node& n : fleet.nodes()) {
    if (n.role != role || !usable(fleet, dead, n.id)) {
      continue;
    }
    const double d = distance(from, n.position);
    if (d <= max_range && d < best_d) {
      best_d = d;
      best = n.id;
    }
  }
  return best;
}

void route_distributed(RoutingPlan& plan, const Fleet& fleet, const std::vector<std::uint8_t>& dead) {
  const Point sink = fleet.region().sink;
  const double range = plan.radio_range;
  const std::size_t n = fleet.size();
  std::vector<double> to_sink(n);
  for (std::size_t i = 0; i < n; ++i) {
    to_sink[i] = distance(fleet.nodes()[i].position, sink);
  }
  for (const Node& node : fleet.nodes()) {
    const auto i = static_cast<std::size_t>(node.id);
    if (!usable(fleet, dead, node.id)) {
      plan.next_hop[i] = NextHop::disconnected();
      continue;
    }
    if (to_sink[i] <= range) {
      plan.next_hop[i] = NextHop::sink();
      continue;
    }
    std::optional<NodeId> best;
    bool has_neighbor = false;
    for (const Node& other : fleet.nodes()) {
      const auto j = static_cast<std::size_t>(other.id);
      if (j == i || !usable(fleet, dead, other.id) || distance(node.position, other.position) > range) {
        continue;
      }
      has_neighbor = true;
      if (to_sink[j] < to_sink[i] && (!best || to_sink[j] < to_sink[static_cast<std::size_t>(*best)])) {
        best = other.id;
      }
    }
    if (best) {
      plan.next_hop[i] = NextHop::node(*best);
    } else if (has_neighbor) {
      // Closest to the sink in its neighborhood: transmit to the sink
      // directly, whatever the distance.
      plan.next_hop[i] = NextHop::sink();
    } else {
      plan.next_hop[i] = NextHop::disconnected();
    }
  }
}

// Cluster heads forward to the nearest usable head strictly closer to the
// sink, else to the sink.
void route_cluster_heads(RoutingPlan& plan, const Fleet& fleet, const std::vector<std::uint8_t>& dead) {
  const Point sink = fleet.region().sink;
  for (const Node& head : fleet.nodes()) {
    if (head.role != Role::ClusterHead) {
      continue;
    }
    const auto i = static_cast<std::size_t>(head.id);
    if (!usable(fleet, dead, head.id)) {
      plan.next_hop[i] = NextHop::disconnected();
      continue;
    }
    const double own = distance(head.position, sink);
    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Node& other : fleet.nodes()) {
      if (other.role != Role::ClusterHead || other.id == head.id || !usable(fleet, dead, other.id)) {
        continue;
      }
      if (!(distance(other.position, sink) < own)) {
        continue;
      }
      const double d = distance(head.position, other.position);
      if (d < best_d) {
        best_d = d;
        best = other.id;
      }
    }
    plan.next_hop[i] = best ? NextHop::node(*best) : NextHop::sink();
  }
}

// Leaves keep a live parent and otherwise move to the nearest usable node
// with `parent_role`.
void route_leaves_to_parents(RoutingPlan& plan, const Fleet& fleet, const std::vector<std::uint8_t>& dead,
                             Role parent_role) {
  for (const Node& leaf : fleet.nodes()) {
    if (leaf.role != Role::Leaf) {
      continue;
    }
    const auto i = static_cast<std::size_t>(leaf.id);
    if (!usable(fleet, dead, leaf.id)) {
      plan.next_hop[i] = NextHop::disconnected();
      if (plan.kind == TopologyKind::Decentralized) {
        plan.cluster_of[i] = kNoCluster;
      }
      continue;
    }
    const NextHop current = plan.next_hop[i];
    if (current.is_node() && usable(fleet, dead, current.node_id())) {
      continue;
    }
    const auto parent = nearest_with_role(fleet, dead, leaf.position, parent_role, plan.max_link_range);
    plan.next_hop[i] = parent ? NextHop::node(*parent) : NextHop::disconnected();
    if (plan.kind == TopologyKind::Decentralized) {
      plan.cluster_of[i] = parent ? *parent : kNoCluster;
    }
  }
}

void route(RoutingPlan& plan, const Fleet& fleet, const std::vector<std::uint8_t>& dead) {
  switch (plan.kind) {
    case TopologyKind::Centralized:
      for (const Node& node : fleet.nodes()) {
        plan.next_hop[static_cast<std::size_t>(node.id)] =
            usable(fleet, dead, node.id) ? NextHop::sink() : NextHop::disconnected();
      }
      break;
    case TopologyKind::Distributed:
      route_distributed(plan, fleet, dead);
      break;
    case TopologyKind::Hierarchical:
      for (const Node& node : fleet.nodes()) {
        if (node.role == Role::DistributionNode) {
          plan.next_hop[static_cast<std::size_t>(node.id)] =
              usable(fleet, dead, node.id) ? NextHop::sink() : NextHop::disconnected();
        }
      }
      route_leaves_to_parents(plan, fleet, dead, Role::DistributionNode);
      break;
    case TopologyKind::Decentralized:
      route_cluster_heads(plan, fleet, dead);
      route_leaves_to_parents(plan, fleet, dead, Role::ClusterHead);
      break;
  }
}

}  // namespace

Deployment build(TopologyKind kind, const Fleet& sensors, const TopologyConfig& config, Rng& rng) {
  if (sensors.empty()) {
    throw EmptyFleetError("cannot build a topology over an empty fleet");
  }
  Deployment out{sensors, {}};
  Fleet& fleet = out.fleet;
  const Region& region = fleet.region();

  if (kind == TopologyKind::Hierarchical) {
    std::uniform_real_distribution<double> ux(0.0, region.length);
    std::uniform_real_distribution<double> uy(0.0, region.width);
    for (int i = 0; i < config.cluster_count; ++i) {
      const double x = ux(rng);
      const double y = uy(rng);
      fleet.add_node(SensorKind::Temperature, {x, y}, Role::DistributionNode, config.distribution_battery);
    }
  } else if (kind == TopologyKind::Decentralized) {
    std::vector<Point> positions;
    for (const Node& n : sensors.nodes()) {
      if (n.senses()) {
        positions.push_back(n.position);
      }
    }
    const ClusterModel clusters = kmeans(positions, config.cluster_count, rng, config.kmeans_max_iterations);
    for (Point centroid : clusters.centroids) {
      fleet.add_node(SensorKind::Temperature, centroid, Role::ClusterHead, config.cluster_head_battery);
    }
  }

  RoutingPlan& plan = out.plan;
  plan.kind = kind;
  plan.next_hop.assign(fleet.size(), NextHop::disconnected());
  plan.cluster_of.assign(fleet.size(), kNoCluster);
  plan.radio_range = config.radio_range_factor * fleet.coverage_radius();
  plan.max_link_range = config.max_link_range;
  if (kind == TopologyKind::Hierarchical) {
    plan.layer.resize(fleet.size());
    for (const Node& n : fleet.nodes()) {
      plan.layer[static_cast<std::size_t>(n.id)] =
          n.role == Role::DistributionNode ? Layer::Distribution : Layer::Access;
    }
  }

  const std::vector<std::uint8_t> none(fleet.size(), 0);
  route(plan, fleet, none);
  return out;
}

RoutingPlan repair(const RoutingPlan& plan, const Fleet& fleet, std::span<const NodeId> dead) {
  RoutingPlan out = plan;
  std::vector<std::uint8_t> excluded(fleet.size(), 0);
  for (NodeId id : dead) {
    excluded.at(static_cast<std::size_t>(id)) = 1;
  }
  route(out, fleet, excluded);
  return out;
}

std::optional<std::vector<NodeId>> route_to_sink(const RoutingPlan& plan, NodeId origin) {
  std::vector<NodeId> relays;
  NextHop hop = plan.next_hop.at(static_cast<std::size_t>(origin));
  const std::size_t limit = plan.next_hop.size();
  while (hop.is_node()) {
    if (relays.size() >= limit) {
      throw InvariantViolation(fmt::format("routing cycle reached from node {}", origin));
    }
    relays.push_back(hop.node_id());
    hop = plan.next_hop.at(static_cast<std::size_t>(hop.node_id()));
  }
  if (hop.is_disconnected()) {
    return std::nullopt;
  }
  return relays;
}

void write_topology_csv(const Fleet& fleet, const RoutingPlan& plan, std::ostream& out, bool header) {
  if (header) {
    out << "node_id,x,y,role,next_hop,active\n";
  }
  for (const Node& n : fleet.nodes()) {
    out << fmt::format("{},{},{},{},{},{}\n", n.id, n.position.x, n.position.y, to_string(n.role),
                       plan.next_hop[static_cast<std::size_t>(n.id)].to_string(), n.alive() ? 1 : 0);
  }
}

}  // namespace wsnphm
