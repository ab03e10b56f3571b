#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ehbp/errors.hpp"
#include "ehbp/grid.hpp"

namespace ehbp {

struct Edge {
  NodeId a = 0;
  NodeId b = 0;

  bool operator==(const Edge&) const = default;
};

struct SourceSpec {
  double rate = 0.0;  // mean packets per slot
  int bound = 1;      // largest packet count in one slot

  bool operator==(const SourceSpec&) const = default;
};

// One flow class: every packet of it is headed to `destination`.
struct CommoditySpec {
  CommodityId id = 0;
  NodeId destination = 0;
  std::map<NodeId, SourceSpec> sources;

  bool operator==(const CommoditySpec&) const = default;
};

// Undirected communication graph plus the commodities routed over it.
// Immutable once constructed; neighbor lists are sorted ascending.
class Topology {
 public:
  Topology(int node_count, std::vector<Edge> edges, std::vector<CommoditySpec> commodities)
      : node_count_(node_count), commodities_(std::move(commodities)) {
    if (node_count_ < 2) throw ConfigError("topology needs at least two nodes");

    for (auto& e : edges) {
      if (e.a < 1 || e.a > node_count_ || e.b < 1 || e.b > node_count_)
        throw ConfigError("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " references an unknown node");
      if (e.a == e.b) throw ConfigError("self-loop at node " + std::to_string(e.a));
      if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
      return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    for (std::size_t n = 1; n < edges.size(); ++n)
      if (edges[n] == edges[n - 1])
        throw ConfigError("duplicate edge " + std::to_string(edges[n].a) + "-" + std::to_string(edges[n].b));
    edges_ = std::move(edges);

    std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(node_count_) + 1);
    for (const auto& e : edges_) {
      adj[static_cast<std::size_t>(e.a)].push_back(e.b);
      adj[static_cast<std::size_t>(e.b)].push_back(e.a);
    }
    arc_offset_.assign(static_cast<std::size_t>(node_count_) + 2, 0);
    for (NodeId i = 1; i <= node_count_; ++i) {
      auto& list = adj[static_cast<std::size_t>(i)];
      if (list.empty()) throw ConfigError("node " + std::to_string(i) + " has no links");
      std::sort(list.begin(), list.end());
      arc_offset_[static_cast<std::size_t>(i) + 1] = arc_offset_[static_cast<std::size_t>(i)] + list.size();
      arc_target_.insert(arc_target_.end(), list.begin(), list.end());
    }

    if (commodities_.empty()) throw ConfigError("at least one commodity is required");
    for (std::size_t n = 0; n < commodities_.size(); ++n) {
      auto& c = commodities_[n];
      c.id = static_cast<CommodityId>(n + 1);
      if (c.destination < 1 || c.destination > node_count_)
        throw ConfigError("commodity " + std::to_string(c.id) + " has unknown destination " +
                          std::to_string(c.destination));
      for (const auto& [node, src] : c.sources) {
        if (node < 1 || node > node_count_)
          throw ConfigError("commodity " + std::to_string(c.id) + " has unknown source node " + std::to_string(node));
        if (node == c.destination && src.rate != 0.0)
          throw ConfigError("commodity " + std::to_string(c.id) + " destination " + std::to_string(node) +
                            " cannot generate its own traffic");
        if (src.bound < 0 || !(src.rate >= 0.0) || src.rate > src.bound)
          throw ConfigError("commodity " + std::to_string(c.id) + " at node " + std::to_string(node) +
                            ": need 0 <= rate <= bound");
      }
    }
  }

  int node_count() const { return node_count_; }
  int commodity_count() const { return static_cast<int>(commodities_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const CommoditySpec> commodities() const { return commodities_; }
  const CommoditySpec& commodity(CommodityId k) const { return commodities_.at(static_cast<std::size_t>(k - 1)); }

  std::span<const NodeId> neighbors(NodeId i) const {
    return std::span<const NodeId>(arc_target_).subspan(arc_offset_[static_cast<std::size_t>(i)], degree(i));
  }
  std::size_t degree(NodeId i) const {
    return arc_offset_[static_cast<std::size_t>(i) + 1] - arc_offset_[static_cast<std::size_t>(i)];
  }
  std::size_t max_degree() const {
    std::size_t d = 0;
    for (NodeId i = 1; i <= node_count_; ++i) d = std::max(d, degree(i));
    return d;
  }

  // Directed arcs i->j are numbered consecutively per sender, in neighbor order.
  std::size_t arc_count() const { return arc_target_.size(); }
  std::size_t first_arc(NodeId i) const { return arc_offset_[static_cast<std::size_t>(i)]; }
  std::optional<std::size_t> arc_index(NodeId i, NodeId j) const {
    auto nb = neighbors(i);
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return std::nullopt;
    return first_arc(i) + static_cast<std::size_t>(it - nb.begin());
  }
  bool adjacent(NodeId i, NodeId j) const { return arc_index(i, j).has_value(); }

  bool is_destination(NodeId i, CommodityId k) const { return commodity(k).destination == i; }

  // Arrival mean and bound of (node, commodity); zero for non-sources.
  SourceSpec source(NodeId i, CommodityId k) const {
    const auto& s = commodity(k).sources;
    auto it = s.find(i);
    return it == s.end() ? SourceSpec{0.0, 0} : it->second;
  }

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<CommoditySpec> commodities_;
  std::vector<std::size_t> arc_offset_;
  std::vector<NodeId> arc_target_;
};

// Shortest path length in edges; nullopt when the destination is unreachable.
inline std::optional<int> hop_distance(const Topology& topo, NodeId from, NodeId to) {
  if (from == to) return 0;
  std::vector<int> dist(static_cast<std::size_t>(topo.node_count()) + 1, -1);
  std::queue<NodeId> frontier;
  dist[static_cast<std::size_t>(from)] = 0;
  frontier.push(from);
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : topo.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] >= 0) continue;
      dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
      if (v == to) return dist[static_cast<std::size_t>(v)];
      frontier.push(v);
    }
  }
  return std::nullopt;
}

// Edge list of the 14-node reference network. Sinks are nodes 1 and 14.
inline std::vector<Edge> default14_edges() {
  return {{1, 2},  {1, 3},  {1, 4},  {2, 5},   {3, 5},   {3, 6},   {4, 6},   {5, 7},   {6, 8},
          {7, 9},  {8, 10}, {9, 11}, {9, 12},  {10, 12}, {10, 13}, {11, 14}, {12, 14}, {13, 14}};
}

// Two sink-rooted commodities: nodes 2..7 send to node 1, nodes 8..13 send to node 14.
inline std::vector<CommoditySpec> default14_commodities(double rate = 0.35, int bound = 1) {
  CommoditySpec west{1, 1, {}};
  CommoditySpec east{2, 14, {}};
  for (NodeId i = 2; i <= 7; ++i) west.sources[i] = {rate, bound};
  for (NodeId i = 8; i <= 13; ++i) east.sources[i] = {rate, bound};
  return {west, east};
}

inline Topology default14(double rate = 0.35, int bound = 1) {
  return Topology(14, default14_edges(), default14_commodities(rate, bound));
}

// Sink nearest to `node` by hop count, ties to the lower sink id.
inline std::optional<NodeId> nearest_sink(const Topology& topo, NodeId node, std::span<const NodeId> sinks) {
  std::optional<NodeId> best;
  int best_dist = 0;
  for (NodeId s : sinks) {
    auto d = hop_distance(topo, node, s);
    if (!d) continue;
    if (!best || *d < best_dist || (*d == best_dist && s < *best)) {
      best = s;
      best_dist = *d;
    }
  }
  return best;
}

enum class CommodityLayout { sink_rooted, per_source };

// Builds commodities for a graph: every non-sink node sources traffic to its
// nearest sink. `sink_rooted` makes one commodity per sink; `per_source` makes
// one commodity per source node.
inline std::vector<CommoditySpec> assign_commodities(int node_count, const std::vector<Edge>& edges,
                                                     std::span<const NodeId> sinks, CommodityLayout layout,
                                                     double rate, int bound) {
  if (sinks.empty()) throw ConfigError("at least one sink is required");
  // A scratch topology with a placeholder commodity is enough for distances.
  Topology scratch(node_count, edges, {CommoditySpec{1, sinks.front(), {}}});
  std::vector<NodeId> sorted_sinks(sinks.begin(), sinks.end());
  std::sort(sorted_sinks.begin(), sorted_sinks.end());

  std::vector<CommoditySpec> out;
  if (layout == CommodityLayout::sink_rooted)
    for (NodeId s : sorted_sinks) out.push_back(CommoditySpec{0, s, {}});

  for (NodeId i = 1; i <= node_count; ++i) {
    if (std::binary_search(sorted_sinks.begin(), sorted_sinks.end(), i)) continue;
    auto sink = nearest_sink(scratch, i, sorted_sinks);
    if (!sink) throw ConfigError("node " + std::to_string(i) + " cannot reach any sink");
    if (layout == CommodityLayout::sink_rooted) {
      auto pos = std::lower_bound(sorted_sinks.begin(), sorted_sinks.end(), *sink) - sorted_sinks.begin();
      out[static_cast<std::size_t>(pos)].sources[i] = {rate, bound};
    } else {
      CommoditySpec c{0, *sink, {}};
      c.sources[i] = {rate, bound};
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace ehbp
