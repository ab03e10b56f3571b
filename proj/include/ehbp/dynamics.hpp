#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehbp/errors.hpp"
#include "ehbp/grid.hpp"
#include "ehbp/policy.hpp"
#include "ehbp/topology.hpp"

namespace ehbp {

struct PacketRecord {
  std::uint64_t id = 0;
  CommodityId commodity = 0;
  long long birth_slot = 0;  // first slot at which the packet sits in a queue

  bool operator==(const PacketRecord&) const = default;
};

struct Delivery {
  std::uint64_t packet_id = 0;
  CommodityId commodity = 0;
  long long birth_slot = 0;
  long long delivery_slot = 0;

  long long delay() const { return delivery_slot - birth_slot; }
  bool operator==(const Delivery&) const = default;
};

// Physical network state: FIFO data queues per (node, commodity) and batteries.
struct PhysicalState {
  NodeCommodityMap<std::deque<PacketRecord>> queues;
  NodeMap<double> battery;
  NodeMap<double> b_max;
  bool tracks_energy = true;

  std::uint64_t next_packet_id = 0;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;

  static PhysicalState make(const Topology& topo, const NodeMap<double>& b_max, const NodeMap<double>& initial_battery,
                            bool tracks_energy) {
    PhysicalState s;
    s.queues = NodeCommodityMap<std::deque<PacketRecord>>(topo.node_count(), topo.commodity_count(), {});
    s.b_max = b_max;
    s.battery = initial_battery;
    s.tracks_energy = tracks_energy;
    for (NodeId i = 1; i <= topo.node_count(); ++i)
      if (!(initial_battery[i] >= 0.0 && initial_battery[i] <= b_max[i]))
        throw ConfigError("initial battery of node " + std::to_string(i) + " must lie in [0, b_max]");
    return s;
  }

  std::size_t queue_length(NodeId i, CommodityId k) const { return queues(i, k).size(); }
};

inline long long total_queued(const PhysicalState& s) {
  long long n = 0;
  for (const auto& q : s.queues.values()) n += static_cast<long long>(q.size());
  return n;
}

inline double total_energy(const PhysicalState& s) {
  double e = 0.0;
  for (double b : s.battery.values()) e += b;
  return e;
}

struct SlotOutcome {
  std::vector<Delivery> deliveries;
  int transmissions = 0;       // decided transmissions, null ones included
  int null_transmissions = 0;  // decided from an empty queue; no packet moved
  long long accepted_arrivals = 0;
  long long dropped_arrivals = 0;
  int negative_battery_events = 0;
};

// Advances the physical state by slot t:
//   1. every decided transmission pops the head of the sender's queue as it
//      stood at the start of the slot (an empty queue makes it a null
//      transmission), then popped packets join the receiver's tail or are
//      delivered if the receiver is their destination;
//   2. fresh arrivals join the tail, anything above the arrival bound is dropped;
//   3. batteries pay one unit per decided transmission, gain the harvest and
//      are clipped to [0, b_max].
// Spending more than the battery holds is a CausalityViolation.
inline SlotOutcome apply_slot(PhysicalState& state, const Topology& topo, std::span<const std::optional<Action>> decisions,
                              const NodeCommodityMap<int>& arrivals, std::span<const double> harvest, long long t) {
  const int n = topo.node_count();
  if (static_cast<int>(decisions.size()) != n || (state.tracks_energy && static_cast<int>(harvest.size()) != n))
    throw std::invalid_argument("apply_slot: per-node inputs must have one entry per node");

  SlotOutcome out;

  if (state.tracks_energy) {
    for (NodeId i = 1; i <= n; ++i) {
      const double spend = decisions[static_cast<std::size_t>(i - 1)] ? 1.0 : 0.0;
      if (spend > state.battery[i])
        throw CausalityViolation("transmission needs " + std::to_string(spend) + " energy but battery holds " +
                                     std::to_string(state.battery[i]),
                                 t, i);
    }
  }

  struct Transfer {
    NodeId to;
    PacketRecord packet;
  };
  std::vector<Transfer> moving;
  for (NodeId i = 1; i <= n; ++i) {
    const auto& decision = decisions[static_cast<std::size_t>(i - 1)];
    if (!decision) continue;
    if (!topo.adjacent(i, decision->neighbor))
      throw SimulationFault("routing decision targets non-neighbor " + std::to_string(decision->neighbor), t, i);
    ++out.transmissions;
    auto& q = state.queues(i, decision->commodity);
    if (q.empty()) {
      ++out.null_transmissions;
      continue;
    }
    moving.push_back({decision->neighbor, q.front()});
    q.pop_front();
  }
  for (const auto& m : moving) {
    if (topo.is_destination(m.to, m.packet.commodity)) {
      out.deliveries.push_back({m.packet.id, m.packet.commodity, m.packet.birth_slot, t + 1});
      ++state.delivered;
    } else {
      state.queues(m.to, m.packet.commodity).push_back(m.packet);
    }
  }

  for (NodeId i = 1; i <= n; ++i) {
    for (CommodityId k = 1; k <= topo.commodity_count(); ++k) {
      const int a = arrivals(i, k);
      if (a <= 0) continue;
      const int bound = topo.source(i, k).bound;
      const int kept = std::min(a, bound);
      out.dropped_arrivals += a - kept;
      state.dropped += static_cast<std::uint64_t>(a - kept);
      for (int p = 0; p < kept; ++p) state.queues(i, k).push_back({state.next_packet_id++, k, t + 1});
      out.accepted_arrivals += kept;
      state.injected += static_cast<std::uint64_t>(kept);
    }
  }

  if (state.tracks_energy) {
    for (NodeId i = 1; i <= n; ++i) {
      const double spend = decisions[static_cast<std::size_t>(i - 1)] ? 1.0 : 0.0;
      const double raw = state.battery[i] - spend + harvest[static_cast<std::size_t>(i - 1)];
      if (raw < 0.0) ++out.negative_battery_events;
      state.battery[i] = std::clamp(raw, 0.0, state.b_max[i]);
    }
  }
  return out;
}

}  // namespace ehbp
