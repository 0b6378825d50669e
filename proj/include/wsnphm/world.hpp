#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "wsnphm/rng.hpp"

namespace wsnphm {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;
double squared_distance(Point a, Point b) noexcept;

// Rectangular monitored area [0, length] x [0, width] with the sink inside.
struct Region {
  double length = 100.0;
  double width = 100.0;
  Point sink{50.0, 50.0};

  double area() const noexcept { return length * width; }
  bool contains(Point p) const noexcept;
  // Throws InvalidRegionError.
  void validate() const;
};

// Radius of a disk covering 1% of the region: (1/10) * sqrt(A / pi).
double coverage_radius(const Region& region);

enum class SensorKind : std::uint8_t { Temperature, Pressure, Humidity };
inline constexpr std::array<SensorKind, 3> kSensorKinds{SensorKind::Temperature, SensorKind::Pressure,
                                                        SensorKind::Humidity};
std::string_view to_string(SensorKind kind) noexcept;
constexpr std::size_t index_of(SensorKind kind) noexcept { return static_cast<std::size_t>(kind); }

enum class Role : std::uint8_t { Leaf, ClusterHead, DistributionNode };
std::string_view to_string(Role role) noexcept;

enum class Health : std::uint8_t { Ok, Broken, Dead };

using NodeId = std::int32_t;

// `kind` is meaningful only for leaves; cluster heads and distribution nodes
// relay but never sense.
struct Node {
  NodeId id = 0;
  SensorKind kind = SensorKind::Temperature;
  Point position;
  Role role = Role::Leaf;
  double battery = 0.0;
  Health health = Health::Ok;

  bool alive() const noexcept { return health != Health::Dead; }
  bool senses() const noexcept { return role == Role::Leaf; }
};

struct KindCounts {
  int temperature = 100;
  int pressure = 100;
  int humidity = 100;

  int total() const noexcept { return temperature + pressure + humidity; }
};

class Fleet {
 public:
  Fleet() = default;
  // Node ids must be 0..n-1 in order.
  Fleet(Region region, std::vector<Node> nodes);
  // Explicit coverage radius instead of the 1%-of-area default.
  Fleet(Region region, std::vector<Node> nodes, double coverage_radius);

  const Region& region() const noexcept { return region_; }
  double coverage_radius() const noexcept { return coverage_radius_; }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<Node> nodes() noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  Node& node(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }

  NodeId add_node(SensorKind kind, Point position, Role role, double battery);

  std::size_t alive_count() const noexcept;
  std::size_t alive_sensor_count() const noexcept;
  std::size_t sensor_count() const noexcept;

  // Covered fraction measured when the fleet was deployed, and how far it
  // fell short of the requested minimum (0 when the minimum was met).
  double initial_coverage() const noexcept { return initial_coverage_; }
  double coverage_deficit() const noexcept { return coverage_deficit_; }
  void set_coverage_report(double covered, double deficit) noexcept {
    initial_coverage_ = covered;
    coverage_deficit_ = deficit;
  }

 private:
  Region region_;
  double coverage_radius_ = 0.0;
  std::vector<Node> nodes_;
  double initial_coverage_ = 1.0;
  double coverage_deficit_ = 0.0;
};

struct DeployOptions {
  double battery = 300.0;
  // Re-draw positions until this much of the region is covered at t = 0.
  double min_coverage = 0.90;
  int max_attempts = 50;
  int coverage_grid = 100;
  // When false a shortfall is recorded on the fleet instead of thrown.
  bool require_coverage = true;
};

// Uniform random deployment; nodes are ordered temperature, pressure,
// humidity. Throws EmptyFleetError, InvalidRegionError, CoverageError.
Fleet deploy(const Region& region, const KindCounts& counts, Rng& rng, const DeployOptions& options = {});

// Fraction of a grid_resolution x grid_resolution lattice (edges included)
// within the coverage radius of a live sensing node.
double covered_fraction(const Fleet& fleet, int grid_resolution);

}  // namespace wsnphm
