#pragma once

#include <vector>

#include "wsnphm/world.hpp"

namespace wsnphm {

// First-order radio model. All costs are battery units per packet.
struct RadioModel {
  double e_elec = 1.0;    // transmit electronics
  double e_rx = 0.5;      // receive electronics
  double e_amp = 0.005;   // amplifier, per squared distance unit
  double e_da = 0.2;      // aggregation, per input packet

  void validate() const;
  // Scales the transmit terms (e_elec, e_amp); e_rx and e_da are untouched.
  RadioModel scaled(double factor) const noexcept;

  friend bool operator==(const RadioModel&, const RadioModel&) = default;
};

double tx_cost(const RadioModel& model, double hop_distance) noexcept;
double rx_cost(const RadioModel& model) noexcept;
double agg_cost(const RadioModel& model, std::size_t packets) noexcept;

// Traffic handled by each node during one step.
class TrafficLedger {
 public:
  TrafficLedger() = default;
  explicit TrafficLedger(std::size_t node_count);

  std::size_t size() const noexcept { return received_.size(); }

  void record_send(NodeId id, double hop_distance);
  void record_receive(NodeId id, std::size_t packets = 1);
  void record_aggregate(NodeId id, std::size_t packets);

  const std::vector<double>& sent(NodeId id) const { return sent_.at(static_cast<std::size_t>(id)); }
  std::size_t received(NodeId id) const { return received_.at(static_cast<std::size_t>(id)); }
  std::size_t aggregated(NodeId id) const { return aggregated_.at(static_cast<std::size_t>(id)); }
  bool has_entries(NodeId id) const;

  double cost(NodeId id, const RadioModel& model) const;
  double total_cost(const RadioModel& model) const;
  std::size_t total_sent() const noexcept;

 private:
  std::vector<std::vector<double>> sent_;
  std::vector<std::size_t> received_;
  std::vector<std::size_t> aggregated_;
};

// Drains each node by its ledger cost (floored at zero). Nodes reaching zero
// become Dead; their ids are returned in ascending order.
std::vector<NodeId> apply_step(Fleet& fleet, const TrafficLedger& ledger, const RadioModel& model);

}  // namespace wsnphm
