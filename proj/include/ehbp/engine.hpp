#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ehbp/capacity.hpp"
#include "ehbp/dynamics.hpp"
#include "ehbp/errors.hpp"
#include "ehbp/grid.hpp"
#include "ehbp/policy.hpp"
#include "ehbp/processes.hpp"
#include "ehbp/random.hpp"
#include "ehbp/topology.hpp"

namespace ehbp {

struct SimConfig {
  Topology topology;
  ProcessConfig processes;  // master_seed is replaced by the run seed
  PolicyParams policy;
  NodeMap<double> b_max;
  NodeMap<double> initial_battery;
  long long horizon = 5000;
  std::vector<std::uint64_t> seeds{1};

  // Reference setup: 14-node network, Bernoulli(0.35) arrivals, two-point
  // harvesting with mean 1, 15-unit full batteries, gamma_bar 10, zero weights.
  static SimConfig reference(PolicyKind kind, long long horizon = 5000) {
    Topology topo = default14(0.35, 1);
    PolicyParams params = PolicyParams::make(topo, kind, 10.0, 0.0);
    ProcessConfig proc;
    proc.harvest_mean.assign(static_cast<std::size_t>(topo.node_count()), 1.0);
    const int n = topo.node_count();
    return SimConfig{std::move(topo), std::move(proc), std::move(params), NodeMap<double>(n, 15.0),
                     NodeMap<double>(n, 15.0), horizon, {1}};
  }

  // Harvest of +inf at every node: the energy-aware kinds see no energy limit.
  void make_energy_unlimited() {
    processes.harvest_mean.assign(static_cast<std::size_t>(topology.node_count()), unlimited_energy);
  }

  // Throws ConfigError describing every problem found.
  void validate() const {
    if (horizon < 1) throw ConfigError("horizon must be at least 1 slot");
    if (b_max.size() != topology.node_count() || initial_battery.size() != topology.node_count())
      throw ConfigError("battery settings must list one value per node");
    auto violations = validate_capacity(topology, policy, b_max);
    if (!violations.empty()) {
      std::ostringstream os;
      os << "battery/auxiliary capacity too small for energy causality:";
      for (const auto& v : violations) os << "\n  " << v.describe();
      throw ConfigError(os.str());
    }
    for (NodeId i = 1; i <= topology.node_count(); ++i)
      if (!(initial_battery[i] >= 0.0 && initial_battery[i] <= b_max[i]))
        throw ConfigError("initial battery of node " + std::to_string(i) + " must lie in [0, b_max]");
  }
};

struct RunOptions {
  bool fail_on_invariant = true;  // throw SimulationFault when a runtime invariant breaks
  bool record_node_series = true;  // per-slot queue lengths and multipliers
  bool record_decisions = false;
};

// Everything measured in one run. Per-slot series are indexed by slot t and
// describe the network at the end of that slot.
struct MetricsRecord {
  std::string policy;
  std::uint64_t seed = 0;
  long long horizon = 0;
  int node_count = 0;
  int commodity_count = 0;
  bool has_energy = false;

  std::vector<long long> total_queued;
  std::vector<double> total_energy;        // energy-aware kinds only
  std::vector<double> data_balance;        // sum a[t] - deliveries into sinks
  std::vector<double> energy_balance;      // sum e[t] - transmissions; energy-aware kinds only
  std::vector<int> null_transmissions;

  std::vector<int> queue_lengths;          // [t][node][commodity], if recorded
  std::vector<double> gamma_trace;         // [t][node][commodity], if recorded
  std::vector<int> decisions;              // [t][node]: 0 none, else (k-1)*N + j; if recorded

  std::vector<Delivery> deliveries;
  NodeCommodityMap<double> mean_queue;
  NodeCommodityMap<double> mean_gamma;

  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  long long negative_battery_events = 0;
  long long mirror_violations = 0;
  long long gamma_bound_violations = 0;
  double max_gamma_headroom = -std::numeric_limits<double>::infinity();  // max over slots of gamma - bound

  std::size_t node_index(long long t, NodeId i, CommodityId k) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(node_count) + static_cast<std::size_t>(i - 1)) *
               static_cast<std::size_t>(commodity_count) +
           static_cast<std::size_t>(k - 1);
  }
  int queue_length(long long t, NodeId i, CommodityId k) const { return queue_lengths.at(node_index(t, i, k)); }
  double gamma(long long t, NodeId i, CommodityId k) const { return gamma_trace.at(node_index(t, i, k)); }

  bool operator==(const MetricsRecord&) const = default;
};

// Running means: out[t] = mean(values[0..t]).
template <typename T>
std::vector<double> prefix_mean(const std::vector<T>& values) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    sum += static_cast<double>(values[t]);
    out[t] = sum / static_cast<double>(t + 1);
  }
  return out;
}

// Least-squares slope of ys[t] against t over t in [from, to].
template <typename T>
double ls_slope(const std::vector<T>& ys, std::size_t from, std::size_t to) {
  to = std::min(to, ys.size() - 1);
  const double n = static_cast<double>(to - from + 1);
  double sx = 0, sy = 0;
  for (std::size_t t = from; t <= to; ++t) {
    sx += static_cast<double>(t);
    sy += static_cast<double>(ys[t]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t t = from; t <= to; ++t) {
    const double dx = static_cast<double>(t) - mx;
    sxy += dx * (static_cast<double>(ys[t]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// One simulation of `config` under `seed`. Each slot:
//   1. every node decides from the multipliers of slot t,
//   2. arrivals and harvests of slot t are drawn,
//   3. packets move, sinks absorb, batteries update,
//   4. auxiliary variables are computed from gamma[t],
//   5. multipliers step to slot t+1,
//   6. metrics are recorded.
inline MetricsRecord run(const SimConfig& config, std::uint64_t seed, const RunOptions& options = {}) {
  config.validate();
  const Topology& topo = config.topology;
  const PolicyParams& params = config.policy;
  const int n = topo.node_count();
  const int kc = topo.commodity_count();
  const bool eh = is_energy_aware(params.kind);
  const bool soft = is_soft(params.kind);
  const bool fractional_duals = soft && params.dual_update_mode == DualUpdateMode::fractional;

  ProcessConfig pc = config.processes;
  pc.master_seed = seed;
  Processes proc(topo, pc);

  std::vector<bool> unlimited(static_cast<std::size_t>(n) + 1, false);
  for (NodeId i = 1; i <= n; ++i) unlimited[static_cast<std::size_t>(i)] = std::isinf(proc.config().harvest_mean[static_cast<std::size_t>(i - 1)]);

  DualState duals = init_duals(topo, config.initial_battery, config.b_max);
  if (!eh) std::fill(duals.beta.values().begin(), duals.beta.values().end(), 0.0);
  PhysicalState state = PhysicalState::make(topo, config.b_max, config.initial_battery, eh);

  std::vector<RandomStream> route_stream;
  for (NodeId i = 1; i <= n; ++i) route_stream.emplace_back(seed, "route/" + std::to_string(i));

  MetricsRecord rec;
  rec.policy = std::string(to_string(params.kind));
  rec.seed = seed;
  rec.horizon = config.horizon;
  rec.node_count = n;
  rec.commodity_count = kc;
  rec.has_energy = eh;
  const auto horizon = static_cast<std::size_t>(config.horizon);
  rec.total_queued.reserve(horizon);
  rec.data_balance.reserve(horizon);
  rec.null_transmissions.reserve(horizon);
  if (eh) {
    rec.total_energy.reserve(horizon);
    rec.energy_balance.reserve(horizon);
  }
  const std::size_t cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(kc);
  if (options.record_node_series) {
    rec.queue_lengths.reserve(horizon * cells);
    rec.gamma_trace.reserve(horizon * cells);
  }
  if (options.record_decisions) rec.decisions.reserve(horizon * static_cast<std::size_t>(n));
  NodeCommodityMap<double> queue_sum(n, kc, 0.0);
  NodeCommodityMap<double> gamma_sum(n, kc, 0.0);

  std::vector<RoutingDecision> decided(static_cast<std::size_t>(n));
  std::vector<std::optional<Action>> actions(static_cast<std::size_t>(n));
  NodeCommodityMap<int> arrivals(n, kc, 0);
  std::vector<double> harvest(static_cast<std::size_t>(n), 0.0);
  NodeCommodityMap<double> routed_in(n, kc, 0.0);
  NodeCommodityMap<double> routed_out(n, kc, 0.0);
  NodeCommodityMap<double> aux(n, kc, 0.0);
  DualState next = duals;

  for (long long t = 0; t < config.horizon; ++t) {
    // 1. decisions
    for (NodeId i = 1; i <= n; ++i) {
      auto& d = decided[static_cast<std::size_t>(i - 1)];
      d = soft ? ssbp_decide(topo, params, duals, i, route_stream[static_cast<std::size_t>(i - 1)],
                             static_cast<std::uint64_t>(t))
               : sbp_decide(topo, params, duals, i);
      actions[static_cast<std::size_t>(i - 1)] = d.action;
    }

    // 2. exogenous draws
    for (NodeId i = 1; i <= n; ++i)
      for (CommodityId k = 1; k <= kc; ++k) arrivals(i, k) = proc.draw_arrivals(t, i, k);
    double harvested = 0.0;
    if (eh)
      for (NodeId i = 1; i <= n; ++i) {
        harvest[static_cast<std::size_t>(i - 1)] = proc.draw_harvest(t, i);
        harvested += harvest[static_cast<std::size_t>(i - 1)];
      }

    // 3. physical transfer
    SlotOutcome outcome = apply_slot(state, topo, actions, arrivals, harvest, t);
    rec.negative_battery_events += outcome.negative_battery_events;

    // 4. auxiliary variables
    for (NodeId i = 1; i <= n; ++i)
      for (CommodityId k = 1; k <= kc; ++k)
        aux(i, k) = (eh && !unlimited[static_cast<std::size_t>(i)]) ? auxiliary(params, duals, i, k) : 0.0;

    // 5. multiplier updates
    std::fill(routed_in.values().begin(), routed_in.values().end(), 0.0);
    std::fill(routed_out.values().begin(), routed_out.values().end(), 0.0);
    for (NodeId i = 1; i <= n; ++i) {
      const auto& d = decided[static_cast<std::size_t>(i - 1)];
      if (fractional_duals) {
        for (const auto& m : d.fractional) {
          routed_out(i, m.action.commodity) += m.mass;
          routed_in(m.action.neighbor, m.action.commodity) += m.mass;
        }
      } else if (d.action) {
        routed_out(i, d.action->commodity) += 1.0;
        routed_in(d.action->neighbor, d.action->commodity) += 1.0;
      }
    }
    for (NodeId i = 1; i <= n; ++i) {
      double spend = 0.0;
      for (CommodityId k = 1; k <= kc; ++k) {
        const double a = std::min(arrivals(i, k), topo.source(i, k).bound);
        next.gamma(i, k) = update_gamma(topo, duals, i, k, a, aux(i, k), routed_in(i, k), routed_out(i, k));
        spend += routed_out(i, k);
      }
      next.beta[i] = eh ? update_beta(duals.beta[i], harvest[static_cast<std::size_t>(i - 1)], spend) : 0.0;
    }

    // runtime invariants
    if (eh) {
      for (NodeId i = 1; i <= n; ++i) {
        if (!fractional_duals && state.battery[i] != state.b_max[i] - next.beta[i]) {
          ++rec.mirror_violations;
          if (options.fail_on_invariant)
            throw SimulationFault("battery " + std::to_string(state.battery[i]) + " does not mirror multiplier " +
                                      std::to_string(next.beta[i]),
                                  t, i);
        }
        if (unlimited[static_cast<std::size_t>(i)]) continue;
        for (CommodityId k = 1; k <= kc; ++k) {
          const double bound = params.gamma_bar(i, k) + topo.source(i, k).bound + static_cast<double>(topo.degree(i));
          const double headroom = next.gamma(i, k) - bound;
          rec.max_gamma_headroom = std::max(rec.max_gamma_headroom, headroom);
          if (headroom > 0.0) {
            ++rec.gamma_bound_violations;
            if (options.fail_on_invariant)
              throw SimulationFault("queue multiplier " + std::to_string(next.gamma(i, k)) + " exceeds bound " +
                                        std::to_string(bound),
                                    t, i);
          }
        }
      }
    }
    duals = next;

    // 6. metrics
    rec.total_queued.push_back(total_queued(state));
    rec.data_balance.push_back(static_cast<double>(outcome.accepted_arrivals) -
                               static_cast<double>(outcome.deliveries.size()));
    rec.null_transmissions.push_back(outcome.null_transmissions);
    if (eh) {
      rec.total_energy.push_back(total_energy(state));
      rec.energy_balance.push_back(harvested - outcome.transmissions);
    }
    for (NodeId i = 1; i <= n; ++i)
      for (CommodityId k = 1; k <= kc; ++k) {
        const auto q = static_cast<int>(state.queue_length(i, k));
        queue_sum(i, k) += q;
        gamma_sum(i, k) += duals.gamma(i, k);
        if (options.record_node_series) {
          rec.queue_lengths.push_back(q);
          rec.gamma_trace.push_back(duals.gamma(i, k));
        }
      }
    if (options.record_decisions)
      for (const auto& a : actions) rec.decisions.push_back(a ? (a->commodity - 1) * n + a->neighbor : 0);
    rec.deliveries.insert(rec.deliveries.end(), outcome.deliveries.begin(), outcome.deliveries.end());
  }

  rec.mean_queue = NodeCommodityMap<double>(n, kc, 0.0);
  rec.mean_gamma = NodeCommodityMap<double>(n, kc, 0.0);
  for (NodeId i = 1; i <= n; ++i)
    for (CommodityId k = 1; k <= kc; ++k) {
      rec.mean_queue(i, k) = queue_sum(i, k) / static_cast<double>(config.horizon);
      rec.mean_gamma(i, k) = gamma_sum(i, k) / static_cast<double>(config.horizon);
    }
  rec.injected = state.injected;
  rec.delivered = state.delivered;
  rec.dropped = state.dropped;
  return rec;
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for fewer than two values

  bool operator==(const Summary&) const = default;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Cross-seed aggregate. Per-slot series are summarized slot by slot.
struct BatchSummary {
  std::vector<Summary> total_queued;
  std::vector<Summary> total_energy;
  std::vector<Summary> data_balance_avg;
  std::vector<Summary> energy_balance_avg;
  Summary average_queued;  // time average of total_queued
  Summary mean_delay;
  std::size_t runs = 0;
};

struct BatchEntry {
  std::uint64_t seed = 0;
  std::optional<MetricsRecord> record;
  std::string error;  // set when the run faulted
};

struct BatchResult {
  std::vector<BatchEntry> entries;  // in the order of the requested seeds
  BatchSummary summary;             // over successful runs
};

inline double mean_delay(const MetricsRecord& r, long long from_slot = 0) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : r.deliveries)
    if (d.delivery_slot >= from_slot) {
      sum += static_cast<double>(d.delay());
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0.0;
}

inline double average_queued(const MetricsRecord& r) {
  if (r.total_queued.empty()) return 0.0;
  return std::accumulate(r.total_queued.begin(), r.total_queued.end(), 0.0) / static_cast<double>(r.total_queued.size());
}

inline BatchSummary summarize(const std::vector<const MetricsRecord*>& records) {
  BatchSummary s;
  s.runs = records.size();
  if (records.empty()) return s;
  const std::size_t horizon = records.front()->total_queued.size();
  const bool energy = records.front()->has_energy;
  std::vector<std::vector<double>> queued_avg, data_avg, energy_avg;
  for (const auto* r : records) {
    data_avg.push_back(prefix_mean(r->data_balance));
    if (energy) energy_avg.push_back(prefix_mean(r->energy_balance));
  }
  std::vector<double> column(records.size());
  auto per_slot = [&](auto&& value) {
    std::vector<Summary> out(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      for (std::size_t n = 0; n < records.size(); ++n) column[n] = value(n, t);
      out[t] = summarize(column);
    }
    return out;
  };
  s.total_queued = per_slot([&](std::size_t n, std::size_t t) { return static_cast<double>(records[n]->total_queued[t]); });
  s.data_balance_avg = per_slot([&](std::size_t n, std::size_t t) { return data_avg[n][t]; });
  if (energy) {
    s.total_energy = per_slot([&](std::size_t n, std::size_t t) { return records[n]->total_energy[t]; });
    s.energy_balance_avg = per_slot([&](std::size_t n, std::size_t t) { return energy_avg[n][t]; });
  }
  std::vector<double> aq, md;
  for (const auto* r : records) {
    aq.push_back(average_queued(*r));
    md.push_back(mean_delay(*r));
  }
  s.average_queued = summarize(aq);
  s.mean_delay = summarize(md);
  return s;
}

// Runs every seed, up to `workers` at a time. A faulting run is reported in
// its entry and does not stop the others.
inline BatchResult run_batch(const SimConfig& config, const std::vector<std::uint64_t>& seeds, unsigned workers = 0,
                             const RunOptions& options = {}) {
  if (seeds.empty()) throw ConfigError("a batch needs at least one seed");
  config.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(seeds.size()));

  BatchResult result;
  result.entries.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < seeds.size(); n = next++) {
      auto& e = result.entries[n];
      e.seed = seeds[n];
      try {
        e.record = run(config, seeds[n], options);
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();

  std::vector<const MetricsRecord*> ok;
  for (const auto& e : result.entries)
    if (e.record) ok.push_back(&*e.record);
  result.summary = summarize(ok);
  return result;
}

inline bool same_network(const Topology& a, const Topology& b) {
  if (a.node_count() != b.node_count() || a.edges() != b.edges() || a.commodity_count() != b.commodity_count())
    return false;
  for (CommodityId k = 1; k <= a.commodity_count(); ++k)
    if (!(a.commodity(k) == b.commodity(k))) return false;
  return true;
}

// Several configurations over the same network and seeds. Arrival and harvest
// draws depend only on (seed, node, commodity, slot), so every configuration
// sees identical exogenous sequences.
struct CompareResult {
  std::vector<std::string> labels;                     // one per configuration
  std::vector<std::uint64_t> seeds;
  long long horizon = 0;
  std::vector<std::vector<BatchEntry>> runs;           // [config][seed]
};

inline CompareResult compare(const std::vector<SimConfig>& configs, const std::vector<std::uint64_t>& seeds,
                             unsigned workers = 0, const RunOptions& options = {}) {
  if (configs.empty()) throw ConfigError("compare needs at least one configuration");
  for (const auto& c : configs) {
    if (c.horizon != configs.front().horizon) throw ConfigError("compared configurations must share the horizon");
    if (!same_network(c.topology, configs.front().topology))
      throw ConfigError("compared configurations must share the network and commodities");
  }
  CompareResult out;
  out.seeds = seeds;
  out.horizon = configs.front().horizon;
  for (const auto& c : configs) {
    out.labels.emplace_back(to_string(c.policy.kind));
    out.runs.push_back(run_batch(c, seeds, workers, options).entries);
  }
  return out;
}

}  // namespace ehbp
