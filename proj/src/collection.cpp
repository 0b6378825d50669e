#include "wsnphm/collection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm {

std::string_view to_string(DeliveryStatus status) noexcept {
  switch (status) {
    case DeliveryStatus::Delivered:
      return "delivered";
    case DeliveryStatus::LostDisconnected:
      return "lost-disconnected";
    case DeliveryStatus::SilentDead:
      return "silent-dead";
  }
  return "unknown";
}

std::size_t SinkSnapshot::delivered_sensor_count() const noexcept {
  return static_cast<std::size_t>(std::ranges::count(status, DeliveryStatus::Delivered));
}

double aggregate(std::span<const double> values) {
  if (values.empty()) {
    throw EmptyInputError("cannot aggregate an empty list of readings");
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

namespace {

Point hop_target(const Fleet& fleet, NextHop hop) {
  return hop.is_sink() ? fleet.region().sink : fleet.node(hop.node_id()).position;
}

// Forwards `packet` from `holder` until it reaches the sink, is dropped, or
// (when `stop_at_aggregator` is set) lands at a cluster head. Returns the
// node now holding it, or -1 once delivered and -2 once lost.
constexpr NodeId kAtSink = -1;
constexpr NodeId kLost = -2;

NodeId forward(const Fleet& fleet, const RoutingPlan& plan, NodeId holder, bool stop_at_aggregator,
               TrafficLedger& ledger) {
  std::size_t hops = 0;
  while (true) {
    const NextHop hop = plan.next_hop[static_cast<std::size_t>(holder)];
    if (hop.is_disconnected()) {
      return kLost;
    }
    if (++hops > plan.next_hop.size()) {
      throw InvariantViolation(fmt::format("routing cycle while forwarding from node {}", holder));
    }
    const Point from = fleet.node(holder).position;
    ledger.record_send(holder, distance(from, hop_target(fleet, hop)));
    if (hop.is_sink()) {
      return kAtSink;
    }
    const NodeId next = hop.node_id();
    ledger.record_receive(next);
    holder = next;
    if (stop_at_aggregator && fleet.node(holder).role == Role::ClusterHead) {
      return holder;
    }
  }
}

}  // namespace

StepOutput run_step(Fleet& fleet, const RoutingPlan& plan, int t, const AggregationConfig& aggregation,
                    const SensingContext& sensing) {
  if (aggregation.window < 1) {
    throw Error(fmt::format("aggregation window must be at least 1, got {}", aggregation.window));
  }
  if (plan.next_hop.size() != fleet.size()) {
    throw Error(fmt::format("plan covers {} nodes, fleet has {}", plan.next_hop.size(), fleet.size()));
  }

  const auto age = static_cast<double>(t);
  const std::size_t sensors = fleet.sensor_count();
  StepOutput out{{}, TrafficLedger(fleet.size())};
  SinkSnapshot& snap = out.snapshot;
  snap.t = t;
  snap.status.assign(sensors, DeliveryStatus::SilentDead);
  snap.area_label.assign(sensors, kLabelNormal);

  const std::uint64_t step_seed = derive_seed(sensing.seed, static_cast<std::uint64_t>(t));

  // Raw packets parked at cluster heads, in sensor id order.
  std::vector<std::vector<Packet>> parked(fleet.size());

  for (std::size_t i = 0; i < sensors; ++i) {
    Node& node = fleet.nodes()[i];
    if (!node.senses()) {
      throw Error(fmt::format("sensing nodes must precede infrastructure nodes (node {})", i));
    }
    SplitMix64 stream(derive_seed(step_seed, i));
    const Condition condition = draw_condition(age, stream, sensing.hazard_mode);
    const bool was_alive = node.alive();
    if (was_alive && condition == Condition::SensorBroken) {
      node.health = Health::Broken;
    }
    // Draw order is fixed whatever the node's state, so area labels stay
    // aligned across topologies even after nodes die or break.
    const double drawn = draw_reading(node.kind, condition, age, stream);
    const double reading = node.health == Health::Broken ? broken_constant(node.kind) : drawn;
    snap.area_label[i] = area_ground_truth(condition, age, stream, sensing.hazard_mode);
    if (!was_alive) {
      continue;
    }
    if (!std::isfinite(reading)) {
      throw InvariantViolation(fmt::format("non-finite reading from node {}", i));
    }

    Packet packet{{node.id}, node.kind, reading, 1, node.position};
    const NodeId holder = forward(fleet, plan, node.id, true, out.ledger);
    if (holder == kAtSink) {
      snap.status[i] = DeliveryStatus::Delivered;
      snap.delivered.push_back(std::move(packet));
    } else if (holder == kLost) {
      snap.status[i] = DeliveryStatus::LostDisconnected;
    } else {
      parked[static_cast<std::size_t>(holder)].push_back(std::move(packet));
    }
  }

  const auto window = static_cast<std::size_t>(aggregation.window);
  std::vector<double> values;
  for (const Node& head : fleet.nodes()) {
    auto& inbox = parked[static_cast<std::size_t>(head.id)];
    if (inbox.empty()) {
      continue;
    }
    for (SensorKind kind : kSensorKinds) {
      std::vector<const Packet*> same_kind;
      for (const Packet& p : inbox) {
        if (p.kind == kind) {
          same_kind.push_back(&p);
        }
      }
      for (std::size_t start = 0; start < same_kind.size(); start += window) {
        const std::size_t end = std::min(start + window, same_kind.size());
        Packet combined;
        combined.kind = kind;
        combined.position = head.position;
        combined.aggregated_count = static_cast<int>(end - start);
        values.clear();
        for (std::size_t j = start; j < end; ++j) {
          values.push_back(same_kind[j]->value);
          combined.origins.push_back(same_kind[j]->origins.front());
        }
        combined.value = aggregate(values);
        if (end - start > 1) {
          out.ledger.record_aggregate(head.id, end - start);
        }
        const NodeId holder = forward(fleet, plan, head.id, false, out.ledger);
        for (NodeId origin : combined.origins) {
          snap.status[static_cast<std::size_t>(origin)] =
              holder == kAtSink ? DeliveryStatus::Delivered : DeliveryStatus::LostDisconnected;
        }
        if (holder == kAtSink) {
          snap.delivered.push_back(std::move(combined));
        }
      }
    }
  }
  return out;
}

std::vector<double> impute(std::span<const double> features, std::span<const std::uint8_t> mask, ImputePolicy policy,
                           std::span<const double> training_means) {
  if (features.size() != mask.size()) {
    throw FeatureLengthError(fmt::format("{} features but {} mask entries", features.size(), mask.size()));
  }
  if (policy == ImputePolicy::TrainingMean && training_means.size() != features.size()) {
    throw FeatureLengthError(
        fmt::format("{} features but {} training means", features.size(), training_means.size()));
  }
  std::vector<double> out(features.begin(), features.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) {
      out[i] = policy == ImputePolicy::SentinelZero ? kMissingSentinel : training_means[i];
    }
  }
  return out;
}

std::vector<double> feature_means(const Dataset& dataset) {
  std::vector<double> sums(dataset.feature_count(), 0.0);
  std::vector<std::size_t> counts(dataset.feature_count(), 0);
  for (const Instance& row : dataset.instances) {
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (!row.missing_mask[i]) {
        sums[i] += row.features[i];
        ++counts[i];
      }
    }
  }
  for (std::size_t i = 0; i < sums.size(); ++i) {
    sums[i] = counts[i] > 0 ? sums[i] / static_cast<double>(counts[i]) : kMissingSentinel;
  }
  return sums;
}

namespace {

void finish_instance(Instance& row, ImputePolicy policy, std::span<const double> training_means) {
  row.features = impute(row.features, row.missing_mask, policy, training_means);
}

}  // namespace

std::vector<Instance> assemble_instances(const SinkSnapshot& snapshot, const Fleet& fleet, InstanceMode mode,
                                         ImputePolicy policy, std::span<const double> training_means) {
  const std::size_t sensors = snapshot.status.size();
  std::vector<Instance> out;

  if (mode == InstanceMode::Global) {
    Instance row;
    row.features.assign(sensors, kMissingSentinel);
    row.missing_mask.assign(sensors, 1);
    for (const Packet& p : snapshot.delivered) {
      for (NodeId origin : p.origins) {
        row.features[static_cast<std::size_t>(origin)] = p.value;
        row.missing_mask[static_cast<std::size_t>(origin)] = 0;
      }
    }
    row.label = std::ranges::any_of(snapshot.area_label, [](Label l) { return l == kLabelFailure; })
                    ? kLabelFailure
                    : kLabelNormal;
    finish_instance(row, policy, training_means);
    out.push_back(std::move(row));
    return out;
  }

  struct Reading {
    Point position;
    double value;
  };
  std::array<std::vector<Reading>, 3> by_kind;
  // The delivered value carrying each sensor's own reading, if any.
  std::vector<const Packet*> own(sensors, nullptr);
  for (const Packet& p : snapshot.delivered) {
    by_kind[index_of(p.kind)].push_back({p.position, p.value});
    for (NodeId origin : p.origins) {
      own[static_cast<std::size_t>(origin)] = &p;
    }
  }

  out.reserve(sensors);
  for (std::size_t i = 0; i < sensors; ++i) {
    const Point location = fleet.nodes()[i].position;
    Instance row;
    row.features.assign(3, kMissingSentinel);
    row.missing_mask.assign(3, 1);
    // Same expansion rule as Global mode: an aggregate stands in for each
    // of its contributors at their own location.
    const std::size_t own_kind = index_of(fleet.nodes()[i].kind);
    if (own[i] != nullptr) {
      row.features[own_kind] = own[i]->value;
      row.missing_mask[own_kind] = 0;
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (k == own_kind && own[i] != nullptr) {
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const Reading& r : by_kind[k]) {
        const double d2 = squared_distance(location, r.position);
        if (d2 < best) {
          best = d2;
          row.features[k] = r.value;
          row.missing_mask[k] = 0;
        }
      }
    }
    row.label = snapshot.area_label[i];
    finish_instance(row, policy, training_means);
    out.push_back(std::move(row));
  }
  return out;
}

void write_snapshot_csv(const SinkSnapshot& snapshot, const Fleet& fleet, std::ostream& out, bool header) {
  if (header) {
    out << "t,node_id,status,kind,value,aggregated_count\n";
  }
  std::vector<const Packet*> carrier(snapshot.status.size(), nullptr);
  for (const Packet& p : snapshot.delivered) {
    for (NodeId origin : p.origins) {
      carrier[static_cast<std::size_t>(origin)] = &p;
    }
  }
  for (std::size_t i = 0; i < snapshot.status.size(); ++i) {
    const Node& node = fleet.nodes()[i];
    if (const Packet* p = carrier[i]) {
      out << fmt::format("{},{},{},{},{},{}\n", snapshot.t, node.id, to_string(snapshot.status[i]),
                         to_string(node.kind), p->value, p->aggregated_count);
    } else {
      out << fmt::format("{},{},{},{},,\n", snapshot.t, node.id, to_string(snapshot.status[i]), to_string(node.kind));
    }
  }
}

}  // namespace wsnphm
