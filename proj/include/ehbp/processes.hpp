#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehbp/errors.hpp"
#include "ehbp/grid.hpp"
#include "ehbp/random.hpp"
#include "ehbp/topology.hpp"

namespace ehbp {

enum class ArrivalKind {
  bernoulli,  // {0, 1}, P(1) = rate
  binomial,   // Binomial(bound, rate / bound)
  poisson,    // Poisson(rate), unbounded; excess over the bound is dropped downstream
};

enum class HarvestKind {
  two_point,          // {0, 2 * mean} with equal probability
  deterministic,      // always mean
  truncated_poisson,  // Poisson(mean) clipped at harvest_cap
};

inline constexpr double unlimited_energy = std::numeric_limits<double>::infinity();

inline std::string_view to_string(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::bernoulli: return "bernoulli";
    case ArrivalKind::binomial: return "binomial";
    case ArrivalKind::poisson: return "poisson";
  }
  return "?";
}

inline std::string_view to_string(HarvestKind k) {
  switch (k) {
    case HarvestKind::two_point: return "two-point";
    case HarvestKind::deterministic: return "deterministic";
    case HarvestKind::truncated_poisson: return "truncated-poisson";
  }
  return "?";
}

inline std::optional<ArrivalKind> parse_arrival_kind(std::string_view s) {
  if (s == "bernoulli") return ArrivalKind::bernoulli;
  if (s == "binomial") return ArrivalKind::binomial;
  if (s == "poisson") return ArrivalKind::poisson;
  return std::nullopt;
}

inline std::optional<HarvestKind> parse_harvest_kind(std::string_view s) {
  if (s == "two-point") return HarvestKind::two_point;
  if (s == "deterministic") return HarvestKind::deterministic;
  if (s == "truncated-poisson") return HarvestKind::truncated_poisson;
  return std::nullopt;
}

struct ProcessConfig {
  ArrivalKind arrival_kind = ArrivalKind::bernoulli;
  HarvestKind harvest_kind = HarvestKind::two_point;
  std::vector<double> harvest_mean;  // per node, index node-1; +inf means unlimited supply
  int harvest_cap = 16;              // truncated_poisson only
  std::uint64_t master_seed = 1;
};

namespace detail {

// Inverse-CDF Poisson draw from a single uniform.
inline int poisson_from_uniform(double mean, double u) {
  if (mean <= 0.0) return 0;
  double p = std::exp(-mean);
  double cdf = p;
  int n = 0;
  while (u >= cdf && n < 10000) {
    ++n;
    p *= mean / n;
    cdf += p;
    if (p == 0.0) break;
  }
  return n;
}

}  // namespace detail

// Arrival and harvest sequences a_i^k[t], e_i[t]. Every (node, commodity)
// arrival stream and every node's harvest stream is an independent
// RandomStream derived from the master seed, so draws are reproducible and
// independent of query order.
class Processes {
 public:
  Processes(const Topology& topo, ProcessConfig cfg) : cfg_(std::move(cfg)), topo_(&topo) {
    const int n = topo.node_count();
    if (cfg_.harvest_mean.empty()) cfg_.harvest_mean.assign(static_cast<std::size_t>(n), 1.0);
    if (static_cast<int>(cfg_.harvest_mean.size()) != n)
      throw ConfigError("harvest_mean must list one value per node");
    for (double e : cfg_.harvest_mean)
      if (!(e >= 0.0)) throw ConfigError("harvest_mean must be nonnegative");
    if (cfg_.harvest_cap < 0) throw ConfigError("harvest_cap must be nonnegative");

    arrival_.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(topo.commodity_count()));
    for (NodeId i = 1; i <= n; ++i)
      for (CommodityId k = 1; k <= topo.commodity_count(); ++k)
        arrival_.emplace_back(cfg_.master_seed, "arrival/" + std::to_string(i) + "/" + std::to_string(k));
    for (NodeId i = 1; i <= n; ++i) harvest_.emplace_back(cfg_.master_seed, "harvest/" + std::to_string(i));
  }

  // Packets generated at node i for commodity k in slot t. Zero for non-sources.
  int draw_arrivals(long long t, NodeId i, CommodityId k) const {
    const SourceSpec src = topo_->source(i, k);
    if (src.rate <= 0.0) return 0;
    const RandomStream& s = arrival_[index(i, k)];
    const auto slot = static_cast<std::uint64_t>(t);
    switch (cfg_.arrival_kind) {
      case ArrivalKind::bernoulli:
        return s.uniform(slot) < src.rate ? 1 : 0;
      case ArrivalKind::binomial: {
        if (src.bound <= 0) return 0;
        const double p = src.rate / src.bound;
        int n = 0;
        for (int trial = 0; trial < src.bound; ++trial) n += s.uniform(slot, static_cast<std::uint64_t>(trial)) < p;
        return n;
      }
      case ArrivalKind::poisson:
        return detail::poisson_from_uniform(src.rate, s.uniform(slot));
    }
    return 0;
  }

  double draw_harvest(long long t, NodeId i) const {
    const double mean = cfg_.harvest_mean[static_cast<std::size_t>(i - 1)];
    if (std::isinf(mean)) return unlimited_energy;
    if (mean <= 0.0) return 0.0;
    const double u = harvest_[static_cast<std::size_t>(i - 1)].uniform(static_cast<std::uint64_t>(t));
    switch (cfg_.harvest_kind) {
      case HarvestKind::two_point:
        return u < 0.5 ? 0.0 : 2.0 * mean;
      case HarvestKind::deterministic:
        return mean;
      case HarvestKind::truncated_poisson:
        return std::min(detail::poisson_from_uniform(mean, u), cfg_.harvest_cap);
    }
    return 0.0;
  }

  const ProcessConfig& config() const { return cfg_; }

 private:
  std::size_t index(NodeId i, CommodityId k) const {
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(topo_->commodity_count()) +
           static_cast<std::size_t>(k - 1);
  }

  ProcessConfig cfg_;
  const Topology* topo_;
  std::vector<RandomStream> arrival_;
  std::vector<RandomStream> harvest_;
};

}  // namespace ehbp
