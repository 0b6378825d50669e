#include "wsnphm/energy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "wsnphm/errors.hpp"

namespace wsnphm {

void RadioModel::validate() const {
  for (double v : {e_elec, e_rx, e_amp, e_da}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(
          fmt::format("radio constants must be finite and non-negative ({}, {}, {}, {})", e_elec, e_rx, e_amp, e_da));
    }
  }
}

RadioModel RadioModel::scaled(double factor) const noexcept {
  return {e_elec * factor, e_rx, e_amp * factor, e_da};
}

double tx_cost(const RadioModel& model, double hop_distance) noexcept {
  return model.e_elec + model.e_amp * hop_distance * hop_distance;
}

double rx_cost(const RadioModel& model) noexcept { return model.e_rx; }

double agg_cost(const RadioModel& model, std::size_t packets) noexcept {
  return model.e_da * static_cast<double>(packets);
}

TrafficLedger::TrafficLedger(std::size_t node_count)
    : sent_(node_count), received_(node_count, 0), aggregated_(node_count, 0) {}

void TrafficLedger::record_send(NodeId id, double hop_distance) {
  sent_.at(static_cast<std::size_t>(id)).push_back(hop_distance);
}

void TrafficLedger::record_receive(NodeId id, std::size_t packets) {
  received_.at(static_cast<std::size_t>(id)) += packets;
}

void TrafficLedger::record_aggregate(NodeId id, std::size_t packets) {
  aggregated_.at(static_cast<std::size_t>(id)) += packets;
}

bool TrafficLedger::has_entries(NodeId id) const {
  const auto i = static_cast<std::size_t>(id);
  return !sent_.at(i).empty() || received_[i] > 0 || aggregated_[i] > 0;
}

double TrafficLedger::cost(NodeId id, const RadioModel& model) const {
  const auto i = static_cast<std::size_t>(id);
  double total = 0.0;
  for (double d : sent_.at(i)) {
    total += tx_cost(model, d);
  }
  total += rx_cost(model) * static_cast<double>(received_[i]);
  total += agg_cost(model, aggregated_[i]);
  return total;
}

double TrafficLedger::total_cost(const RadioModel& model) const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    total += cost(static_cast<NodeId>(i), model);
  }
  return total;
}

std::size_t TrafficLedger::total_sent() const noexcept {
  std::size_t total = 0;
  for (const auto& s : sent_) {
    total += s.size();
  }
  return total;
}

std::vector<NodeId> apply_step(Fleet& fleet, const TrafficLedger& ledger, const RadioModel& model) {
  if (ledger.size() != fleet.size()) {
    throw Error(fmt::format("ledger covers {} nodes, fleet has {}", ledger.size(), fleet.size()));
  }
  std::vector<NodeId> newly_dead;
  for (Node& node : fleet.nodes()) {
    if (!node.alive()) {
      if (ledger.has_entries(node.id)) {
        throw InvariantViolation(fmt::format("dead node {} has traffic", node.id));
      }
      continue;
    }
    const double cost = ledger.cost(node.id, model);
    if (cost <= 0.0) {
      continue;
    }
    node.battery = std::max(node.battery - cost, 0.0);
    if (node.battery <= 0.0) {
      node.battery = 0.0;
      node.health = Health::Dead;
      newly_dead.push_back(node.id);
    }
  }
  return newly_dead;
}

}  // namespace wsnphm
