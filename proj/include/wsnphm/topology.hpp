#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsnphm/rng.hpp"
#include "wsnphm/world.hpp"

namespace wsnphm {

enum class TopologyKind : std::uint8_t { Distributed, Hierarchical, Centralized, Decentralized };
inline constexpr std::array<TopologyKind, 4> kTopologyKinds{TopologyKind::Distributed, TopologyKind::Hierarchical,
                                                            TopologyKind::Centralized, TopologyKind::Decentralized};
std::string_view to_string(TopologyKind kind) noexcept;
std::optional<TopologyKind> parse_topology(std::string_view name) noexcept;

// Where a node forwards its packets: another node, the sink, or nowhere.
class NextHop {
 public:
  constexpr NextHop() = default;
  static constexpr NextHop sink() noexcept { return NextHop(kSink); }
  static constexpr NextHop disconnected() noexcept { return NextHop(kDisconnected); }
  static constexpr NextHop node(NodeId id) noexcept { return NextHop(id); }

  constexpr bool is_sink() const noexcept { return value_ == kSink; }
  constexpr bool is_disconnected() const noexcept { return value_ == kDisconnected; }
  constexpr bool is_node() const noexcept { return value_ >= 0; }
  constexpr NodeId node_id() const noexcept { return value_; }

  std::string to_string() const;

  friend constexpr bool operator==(NextHop, NextHop) = default;

 private:
  static constexpr NodeId kSink = -1;
  static constexpr NodeId kDisconnected = -2;
  constexpr explicit NextHop(NodeId value) noexcept : value_(value) {}
  NodeId value_ = kDisconnected;
};

enum class Layer : std::uint8_t { Core, Distribution, Access };

inline constexpr NodeId kNoCluster = -1;

struct TopologyConfig {
  // Number of cluster heads (Decentralized) or distribution nodes
  // (Hierarchical).
  int cluster_count = 30;
  double cluster_head_battery = 1500.0;
  double distribution_battery = 300.0;
  // Distributed neighbor range, in multiples of the coverage radius.
  double radio_range_factor = 2.0;
  // Upper bound on leaf -> parent links in the two-tier topologies.
  double max_link_range = std::numeric_limits<double>::infinity();
  int kmeans_max_iterations = 100;
};

struct RoutingPlan {
  TopologyKind kind = TopologyKind::Centralized;
  std::vector<NextHop> next_hop;
  // Cluster head serving each leaf (Decentralized only, kNoCluster elsewhere).
  std::vector<NodeId> cluster_of;
  // Hierarchical only; empty for the other kinds.
  std::vector<Layer> layer;
  // Neighbor range used by Distributed routing.
  double radio_range = 0.0;
  double max_link_range = std::numeric_limits<double>::infinity();

  friend bool operator==(const RoutingPlan&, const RoutingPlan&) = default;
};

struct ClusterModel {
  int k = 0;
  std::vector<Point> centroids;
  std::vector<int> memberships;
  int iterations = 0;
  bool converged = false;
  // Within-cluster squared distance after each update step.
  std::vector<double> cost_history;
};

// Lloyd's algorithm with initial centroids drawn from distinct points.
// Throws ClusteringError when k is out of range.
ClusterModel kmeans(std::span<const Point> points, int k, Rng& rng, int max_iterations = 100);

double within_cluster_cost(std::span<const Point> points, std::span<const Point> centroids,
                           std::span<const int> memberships) noexcept;

struct Deployment {
  Fleet fleet;
  RoutingPlan plan;
};

// Adds the infrastructure nodes the kind needs (ids after the sensors) and
// computes the initial routing. Throws EmptyFleetError.
Deployment build(TopologyKind kind, const Fleet& sensors, const TopologyConfig& config, Rng& rng);

// Re-routes around nodes that are dead in `fleet` or listed in `dead`.
RoutingPlan repair(const RoutingPlan& plan, const Fleet& fleet, std::span<const NodeId> dead);

// Relays between `origin` and the sink (origin and sink excluded), or nullopt
// when the packet cannot reach the sink. Throws InvariantViolation on a cycle.
std::optional<std::vector<NodeId>> route_to_sink(const RoutingPlan& plan, NodeId origin);

// node_id,x,y,role,next_hop,active
void write_topology_csv(const Fleet& fleet, const RoutingPlan& plan, std::ostream& out, bool header = true);

}  // namespace wsnphm
