#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wsnphm/datagen.hpp"
#include "wsnphm/energy.hpp"
#include "wsnphm/topology.hpp"
#include "wsnphm/world.hpp"

namespace wsnphm {

struct Packet {
  std::vector<NodeId> origins;
  SensorKind kind = SensorKind::Temperature;
  double value = 0.0;
  // Number of readings averaged into `value`; 1 for a raw reading.
  int aggregated_count = 1;
  // Sensor position for raw readings, the aggregator's position otherwise.
  Point position;
};

enum class DeliveryStatus : std::uint8_t { Delivered, LostDisconnected, SilentDead };
std::string_view to_string(DeliveryStatus status) noexcept;

struct SinkSnapshot {
  int t = 0;
  std::vector<Packet> delivered;
  // Indexed by node id over the sensing nodes (ids 0..sensors-1).
  std::vector<DeliveryStatus> status;
  // Ground truth at each sensor location; the sink never sees this, it is
  // kept for scoring.
  std::vector<Label> area_label;

  std::size_t delivered_sensor_count() const noexcept;
};

struct AggregationConfig {
  // Same-kind packets averaged into one at a cluster head.
  int window = 3;
};

struct SensingContext {
  std::uint64_t seed = 0;
  HazardMode hazard_mode = HazardMode::Inverted;
};

struct StepOutput {
  SinkSnapshot snapshot;
  TrafficLedger ledger;
};

// Mean of the readings. Throws EmptyInputError.
double aggregate(std::span<const double> values);

// One sensing round: every live sensor draws its condition and reading and
// sends one packet towards the sink; cluster heads average raw packets per
// kind in windows (a trailing partial window is flushed at the end of the
// step). Sensors that break stay broken, which is the only change made to
// `fleet`. Draws come from per-(seed, t, node) streams, so every topology
// sees the same area states and readings.
StepOutput run_step(Fleet& fleet, const RoutingPlan& plan, int t, const AggregationConfig& aggregation,
                    const SensingContext& sensing);

enum class InstanceMode : std::uint8_t { PerLocation, Global };
enum class ImputePolicy : std::uint8_t { SentinelZero, TrainingMean };

// PerLocation: one instance per sensing node. The node's own kind takes the
// delivered value carrying its reading (raw or aggregate); the other kinds
// take the nearest delivered value by packet position, first delivered on
// ties. Global: one instance with a slot per sensing node.
// Missing slots are filled by `policy`; `training_means` is needed only for
// TrainingMean and must match the instance width.
std::vector<Instance> assemble_instances(const SinkSnapshot& snapshot, const Fleet& fleet, InstanceMode mode,
                                         ImputePolicy policy, std::span<const double> training_means = {});

std::vector<double> impute(std::span<const double> features, std::span<const std::uint8_t> mask, ImputePolicy policy,
                           std::span<const double> training_means = {});

std::vector<double> feature_means(const Dataset& dataset);

// t,node_id,status,kind,value,aggregated_count
void write_snapshot_csv(const SinkSnapshot& snapshot, const Fleet& fleet, std::ostream& out, bool header = true);

}  // namespace wsnphm
