#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehbp/grid.hpp"
#include "ehbp/policy.hpp"
#include "ehbp/topology.hpp"

namespace ehbp {

struct CapacityViolation {
  enum class Bound { battery, auxiliary };

  Bound bound = Bound::battery;
  NodeId node = 0;
  CommodityId commodity = 0;
  std::optional<NodeId> neighbor;  // battery bound only: the link needing the most headroom
  double required = 0.0;
  double configured = 0.0;

  std::string describe() const {
    std::ostringstream os;
    if (bound == Bound::battery) {
      os << "node " << node << " commodity " << commodity << ": b_max " << configured << " < required " << required
         << " (w + gamma_bar + arrival bound + degree, via neighbor " << neighbor.value_or(0) << ")";
    } else {
      os << "node " << node << " commodity " << commodity << ": x_bar " << configured << " < required " << required
         << " (gamma_bar + arrival bound + degree)";
    }
    return os.str();
  }
};

// Battery and auxiliary-range conditions under which the energy-aware
// policies never transmit from an empty battery:
//   b_max_i >= w_ij^k + gamma_bar_i^k + abar_i^k + |N_i|   for all k, j
//   x_bar_i^k >= gamma_bar_i^k + abar_i^k + |N_i|          for all k
// Baseline kinds have no battery and always pass.
inline std::vector<CapacityViolation> validate_capacity(const Topology& topo, const PolicyParams& params,
                                                        const NodeMap<double>& b_max) {
  std::vector<CapacityViolation> out;
  if (!is_energy_aware(params.kind)) return out;

  for (NodeId i = 1; i <= topo.node_count(); ++i) {
    const double degree = static_cast<double>(topo.degree(i));
    for (CommodityId k = 1; k <= topo.commodity_count(); ++k) {
      const double base = params.gamma_bar(i, k) + topo.source(i, k).bound + degree;

      if (params.x_bar(i, k) < base)
        out.push_back({CapacityViolation::Bound::auxiliary, i, k, std::nullopt, base, params.x_bar(i, k)});

      std::optional<NodeId> worst;
      double worst_required = 0.0;
      std::size_t arc = topo.first_arc(i);
      for (NodeId j : topo.neighbors(i)) {
        const double required = params.weight(topo, arc++, k) + base;
        if (!worst || required > worst_required) {
          worst = j;
          worst_required = required;
        }
      }
      if (worst && b_max[i] < worst_required)
        out.push_back({CapacityViolation::Bound::battery, i, k, worst, worst_required, b_max[i]});
    }
  }
  return out;
}

}  // namespace ehbp
