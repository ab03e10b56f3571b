#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ehbp/errors.hpp"
#include "ehbp/grid.hpp"
#include "ehbp/random.hpp"
#include "ehbp/topology.hpp"

namespace ehbp {

enum class PolicyKind { sbp, ssbp, sbp_eh, ssbp_eh };

// How routing enters the multiplier updates of the soft policy: the sampled
// 0/1 action, or the fractional routing vector it was drawn from.
enum class DualUpdateMode { sampled, fractional };

inline constexpr bool is_energy_aware(PolicyKind k) { return k == PolicyKind::sbp_eh || k == PolicyKind::ssbp_eh; }
inline constexpr bool is_soft(PolicyKind k) { return k == PolicyKind::ssbp || k == PolicyKind::ssbp_eh; }

inline std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::sbp: return "SBP";
    case PolicyKind::ssbp: return "SSBP";
    case PolicyKind::sbp_eh: return "SBP-EH";
    case PolicyKind::ssbp_eh: return "SSBP-EH";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view s) {
  if (s == "SBP") return PolicyKind::sbp;
  if (s == "SSBP") return PolicyKind::ssbp;
  if (s == "SBP-EH") return PolicyKind::sbp_eh;
  if (s == "SSBP-EH") return PolicyKind::ssbp_eh;
  return std::nullopt;
}

inline std::string_view to_string(DualUpdateMode m) { return m == DualUpdateMode::sampled ? "sampled" : "fractional"; }

inline std::optional<DualUpdateMode> parse_dual_update_mode(std::string_view s) {
  if (s == "sampled") return DualUpdateMode::sampled;
  if (s == "fractional") return DualUpdateMode::fractional;
  return std::nullopt;
}

// Smallest auxiliary range that keeps every queue multiplier of node i bounded
// by gamma_bar + arrival bound + degree.
inline double min_x_bar(const Topology& topo, NodeId i, CommodityId k, double gamma_bar) {
  return gamma_bar + topo.source(i, k).bound + static_cast<double>(topo.degree(i));
}

struct PolicyParams {
  PolicyKind kind = PolicyKind::ssbp_eh;
  DualUpdateMode dual_update_mode = DualUpdateMode::sampled;
  NodeCommodityMap<double> gamma_bar;
  NodeCommodityMap<double> x_bar;
  std::vector<double> weights;  // per directed arc and commodity: [arc * K + (k - 1)]

  double weight(const Topology& topo, std::size_t arc, CommodityId k) const {
    return weights[arc * static_cast<std::size_t>(topo.commodity_count()) + static_cast<std::size_t>(k - 1)];
  }
  void set_weight(const Topology& topo, NodeId i, NodeId j, CommodityId k, double w) {
    auto arc = topo.arc_index(i, j);
    if (!arc) throw ConfigError("weight on non-link " + std::to_string(i) + "->" + std::to_string(j));
    weights[*arc * static_cast<std::size_t>(topo.commodity_count()) + static_cast<std::size_t>(k - 1)] = w;
  }

  // Uniform gamma_bar and weight; x_bar set to its smallest admissible value.
  static PolicyParams make(const Topology& topo, PolicyKind kind, double gamma_bar = 10.0, double weight = 0.0,
                           DualUpdateMode mode = DualUpdateMode::sampled) {
    if (!(gamma_bar > 0.0)) throw ConfigError("gamma_bar must be positive");
    PolicyParams p;
    p.kind = kind;
    p.dual_update_mode = mode;
    p.gamma_bar = NodeCommodityMap<double>(topo.node_count(), topo.commodity_count(), gamma_bar);
    p.x_bar = NodeCommodityMap<double>(topo.node_count(), topo.commodity_count(), 0.0);
    for (NodeId i = 1; i <= topo.node_count(); ++i)
      for (CommodityId k = 1; k <= topo.commodity_count(); ++k) p.x_bar(i, k) = min_x_bar(topo, i, k, gamma_bar);
    p.weights.assign(topo.arc_count() * static_cast<std::size_t>(topo.commodity_count()), weight);
    return p;
  }
};

// Lagrange multipliers: gamma per (node, commodity) for queue stability,
// beta per node for the average energy constraint.
struct DualState {
  NodeCommodityMap<double> gamma;
  NodeMap<double> beta;

  bool operator==(const DualState&) const = default;
};

// gamma starts at zero; beta mirrors the missing battery charge.
inline DualState init_duals(const Topology& topo, const NodeMap<double>& initial_battery, const NodeMap<double>& b_max) {
  DualState d{NodeCommodityMap<double>(topo.node_count(), topo.commodity_count(), 0.0),
              NodeMap<double>(topo.node_count(), 0.0)};
  for (NodeId i = 1; i <= topo.node_count(); ++i) {
    if (!(initial_battery[i] >= 0.0 && initial_battery[i] <= b_max[i]))
      throw ConfigError("initial battery of node " + std::to_string(i) + " must lie in [0, b_max]");
    d.beta[i] = b_max[i] - initial_battery[i];
  }
  return d;
}

struct Action {
  CommodityId commodity = 0;
  NodeId neighbor = 0;

  bool operator==(const Action&) const = default;
};

struct ActionMass {
  Action action;
  double height = 0.0;  // pressure of this (commodity, neighbor)
  double mass = 0.0;    // fractional routing r = width * [height - level]^+
};

// One node's decision for one slot. For the soft policies `fractional` holds
// every (commodity, neighbor) candidate in lexicographic order; its masses are
// the probabilities the action was drawn with, and `none` takes the rest.
struct RoutingDecision {
  std::optional<Action> action;
  std::vector<ActionMass> fractional;
  double waterlevel = 0.0;

  double total_mass() const {
    double s = 0.0;
    for (const auto& m : fractional) s += m.mass;
    return s;
  }
};

namespace detail {

inline double arc_pressure(const Topology& topo, const PolicyParams& params, const DualState& duals, NodeId i,
                           CommodityId k, NodeId j, std::size_t arc) {
  return params.weight(topo, arc, k) + duals.gamma(i, k) - duals.gamma(j, k) - duals.beta[i];
}

}  // namespace detail

// Pressure w_ij^k + gamma_i^k - gamma_j^k - beta_i of sending commodity k from i to j.
inline double pressure(const Topology& topo, const PolicyParams& params, const DualState& duals, NodeId i,
                       CommodityId k, NodeId j) {
  auto arc = topo.arc_index(i, j);
  if (!arc) throw std::logic_error("pressure: node " + std::to_string(j) + " is not a neighbor of " + std::to_string(i));
  return detail::arc_pressure(topo, params, duals, i, k, j, *arc);
}

// Hard backpressure: the (commodity, neighbor) of largest pressure if that
// pressure is strictly positive. Ties go to the smallest (commodity, neighbor).
inline RoutingDecision sbp_decide(const Topology& topo, const PolicyParams& params, const DualState& duals,
                                  NodeId i) {
  RoutingDecision out;
  double best = 0.0;
  for (CommodityId k = 1; k <= topo.commodity_count(); ++k) {
    std::size_t arc = topo.first_arc(i);
    for (NodeId j : topo.neighbors(i)) {
      const double h = detail::arc_pressure(topo, params, duals, i, k, j, arc++);
      if (h > best) {
        best = h;
        out.action = Action{k, j};
      }
    }
  }
  return out;
}

struct WaterfillResult {
  double level = 0.0;
  std::vector<double> fill;
};

// Inverse waterfilling: the smallest level >= 0 with
// sum_n width * [heights[n] - level]^+ <= budget, found exactly by walking
// the sorted breakpoints of the piecewise-linear fill function.
inline WaterfillResult waterfill(std::span<const double> heights, double width = 0.5, double budget = 1.0) {
  WaterfillResult out;
  out.fill.assign(heights.size(), 0.0);
  if (heights.empty()) return out;

  double unconstrained = 0.0;
  for (double h : heights) unconstrained += width * std::max(h, 0.0);

  if (unconstrained > budget) {
    std::vector<double> sorted(heights.begin(), heights.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // With the top m heights active: width * (sum_m - m * level) = budget.
    double top_sum = 0.0;
    for (std::size_t m = 1; m <= sorted.size(); ++m) {
      top_sum += sorted[m - 1];
      const double level = (top_sum - budget / width) / static_cast<double>(m);
      if (m == sorted.size() || level >= sorted[m]) {
        out.level = level;
        break;
      }
    }
  }
  for (std::size_t n = 0; n < heights.size(); ++n) out.fill[n] = width * std::max(heights[n] - out.level, 0.0);
  return out;
}

// Soft backpressure fractional routing for node i without the draw.
inline RoutingDecision ssbp_fractional(const Topology& topo, const PolicyParams& params, const DualState& duals,
                                       NodeId i) {
  RoutingDecision out;
  std::vector<double> heights;
  for (CommodityId k = 1; k <= topo.commodity_count(); ++k) {
    std::size_t arc = topo.first_arc(i);
    for (NodeId j : topo.neighbors(i)) {
      const double h = detail::arc_pressure(topo, params, duals, i, k, j, arc++);
      out.fractional.push_back(ActionMass{Action{k, j}, h, 0.0});
      heights.push_back(h);
    }
  }
  auto wf = waterfill(heights);
  out.waterlevel = wf.level;
  for (std::size_t n = 0; n < heights.size(); ++n) out.fractional[n].mass = wf.fill[n];
  if (out.total_mass() > 1.0 + 1e-9)
    throw std::logic_error("ssbp: fractional routing of node " + std::to_string(i) + " exceeds one packet");
  return out;
}

// Soft backpressure: draw the action from the fractional routing using the
// uniform variate `u` in [0, 1). Candidates are laid out in lexicographic
// order on [0, 1); the uncovered remainder means no transmission.
inline RoutingDecision ssbp_decide(const Topology& topo, const PolicyParams& params, const DualState& duals, NodeId i,
                                   double u) {
  RoutingDecision out = ssbp_fractional(topo, params, duals, i);
  double cumulative = 0.0;
  for (const auto& m : out.fractional) {
    if (m.mass <= 0.0) continue;
    cumulative += m.mass;
    if (u < cumulative) {
      out.action = m.action;
      break;
    }
  }
  return out;
}

inline RoutingDecision ssbp_decide(const Topology& topo, const PolicyParams& params, const DualState& duals, NodeId i,
                                   const RandomStream& stream, std::uint64_t t) {
  return ssbp_decide(topo, params, duals, i, stream.uniform(t));
}

// Threshold rule for the auxiliary variable: x_bar when gamma exceeds gamma_bar, else 0.
inline double auxiliary(const PolicyParams& params, const DualState& duals, NodeId i, CommodityId k) {
  return duals.gamma(i, k) > params.gamma_bar(i, k) ? params.x_bar(i, k) : 0.0;
}

// Projected queue-multiplier step [gamma + a - x + r_in - r_out]^+.
inline double update_gamma(double gamma, double arrivals, double x, double routed_in, double routed_out) {
  return std::max(0.0, gamma + arrivals - x + routed_in - routed_out);
}

// As above; the multiplier at the commodity's own destination stays 0.
inline double update_gamma(const Topology& topo, const DualState& duals, NodeId i, CommodityId k, double arrivals,
                           double x, double routed_in, double routed_out) {
  if (topo.is_destination(i, k)) return 0.0;
  return update_gamma(duals.gamma(i, k), arrivals, x, routed_in, routed_out);
}

// Projected battery-multiplier step [beta - e + spend]^+.
inline double update_beta(double beta, double harvest, double spend) {
  return std::max(0.0, beta - harvest + spend);
}

}  // namespace ehbp
