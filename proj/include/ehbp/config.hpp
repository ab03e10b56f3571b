#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehbp/engine.hpp"
#include "ehbp/report.hpp"

namespace ehbp {

inline constexpr int config_schema_version = 1;

// The document is not well-formed JSON.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

// Well-formed JSON that does not follow the document schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One experiment as described by a config document.
struct Experiment {
  SimConfig sim;
  unsigned workers = 0;  // 0: one per hardware thread
  std::string output_directory = "out";
  std::vector<std::string> figures;
  bool all_figures = false;  // every figure that applies to the policy
  FigureOptions figure_options;
  bool node_series = true;  // record per-slot queue and multiplier traces
};

// Command-line values that replace the corresponding document entries.
struct Overrides {
  std::optional<std::string> policy;
  std::optional<std::uint64_t> seed;
  std::optional<long long> horizon;
  std::optional<double> gamma_bar;
  std::optional<std::string> output_directory;
};

namespace detail {

using nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t n = 0; n < byte && n < text.size(); ++n) {
    if (text[n] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw SchemaError(where + ": unknown key '" + key + "'");
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  return v.get<double>();
}

inline long long integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return v.get<long long>();
}

inline std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": expected a string");
  return v.get<std::string>();
}

// A scalar applied to every node, or an array with one entry per node.
// `unlimited` additionally accepts the string "unlimited" as +inf.
inline std::vector<double> per_node(const json& v, int nodes, const std::string& where, bool unlimited = false) {
  auto one = [&](const json& x, const std::string& w) {
    if (unlimited && x.is_string() && x.get<std::string>() == "unlimited") return unlimited_energy;
    return number(x, w);
  };
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != nodes)
      throw SchemaError(where + ": expected " + std::to_string(nodes) + " entries, got " + std::to_string(v.size()));
    std::vector<double> out;
    for (std::size_t n = 0; n < v.size(); ++n) out.push_back(one(v[n], where + "[" + std::to_string(n) + "]"));
    return out;
  }
  return std::vector<double>(static_cast<std::size_t>(nodes), one(v, where));
}

inline NodeMap<double> to_node_map(const std::vector<double>& v) {
  NodeMap<double> m(static_cast<int>(v.size()), 0.0);
  for (std::size_t n = 0; n < v.size(); ++n) m[static_cast<NodeId>(n + 1)] = v[n];
  return m;
}

struct TopologyPart {
  int nodes = 0;
  std::vector<Edge> edges;
  std::vector<NodeId> sinks;
  bool reference = false;
};

inline TopologyPart parse_topology(const json& v) {
  TopologyPart t;
  if (v.is_string()) {
    if (v.get<std::string>() != "default14") throw SchemaError("topology: unknown preset '" + v.get<std::string>() + "'");
    return {14, default14_edges(), {1, 14}, true};
  }
  allow_keys(v, "topology", {"nodes", "edges", "sinks"});
  if (!v.contains("nodes") || !v.contains("edges")) throw SchemaError("topology: 'nodes' and 'edges' are required");
  t.nodes = static_cast<int>(integer(v["nodes"], "topology.nodes"));
  if (!v["edges"].is_array()) throw SchemaError("topology.edges: expected an array of [a, b] pairs");
  for (std::size_t n = 0; n < v["edges"].size(); ++n) {
    const auto& e = v["edges"][n];
    const std::string w = "topology.edges[" + std::to_string(n) + "]";
    if (!e.is_array() || e.size() != 2) throw SchemaError(w + ": expected [a, b]");
    t.edges.push_back({static_cast<NodeId>(integer(e[0], w)), static_cast<NodeId>(integer(e[1], w))});
  }
  if (v.contains("sinks")) {
    if (!v["sinks"].is_array()) throw SchemaError("topology.sinks: expected an array");
    for (const auto& s : v["sinks"]) t.sinks.push_back(static_cast<NodeId>(integer(s, "topology.sinks")));
  }
  return t;
}

inline std::vector<CommoditySpec> parse_commodities(const json& v, const TopologyPart& topo) {
  if (v.is_object()) {
    allow_keys(v, "commodities", {"layout", "rate", "bound"});
    const std::string layout = v.contains("layout") ? text(v["layout"], "commodities.layout") : "sink-rooted";
    const double rate = v.contains("rate") ? number(v["rate"], "commodities.rate") : 0.35;
    const int bound = v.contains("bound") ? static_cast<int>(integer(v["bound"], "commodities.bound")) : 1;
    if (layout == "reference") {
      if (!topo.reference) throw SchemaError("commodities.layout 'reference' needs the default14 topology");
      return default14_commodities(rate, bound);
    }
    if (topo.sinks.empty()) throw SchemaError("commodities.layout needs topology.sinks");
    if (layout == "sink-rooted")
      return assign_commodities(topo.nodes, topo.edges, topo.sinks, CommodityLayout::sink_rooted, rate, bound);
    if (layout == "per-source")
      return assign_commodities(topo.nodes, topo.edges, topo.sinks, CommodityLayout::per_source, rate, bound);
    throw SchemaError("commodities.layout: expected 'reference', 'sink-rooted' or 'per-source'");
  }
  if (!v.is_array()) throw SchemaError("commodities: expected a layout object or a list of commodities");
  std::vector<CommoditySpec> out;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const std::string w = "commodities[" + std::to_string(n) + "]";
    allow_keys(v[n], w, {"destination", "sources"});
    if (!v[n].contains("destination") || !v[n].contains("sources"))
      throw SchemaError(w + ": 'destination' and 'sources' are required");
    CommoditySpec c{0, static_cast<NodeId>(integer(v[n]["destination"], w + ".destination")), {}};
    const auto& sources = v[n]["sources"];
    if (!sources.is_array()) throw SchemaError(w + ".sources: expected an array");
    for (std::size_t m = 0; m < sources.size(); ++m) {
      const std::string ws = w + ".sources[" + std::to_string(m) + "]";
      allow_keys(sources[m], ws, {"node", "rate", "bound"});
      if (!sources[m].contains("node") || !sources[m].contains("rate")) throw SchemaError(ws + ": 'node' and 'rate' are required");
      const auto node = static_cast<NodeId>(integer(sources[m]["node"], ws + ".node"));
      if (c.sources.count(node)) throw SchemaError(ws + ": node " + std::to_string(node) + " listed twice");
      c.sources[node] = {number(sources[m]["rate"], ws + ".rate"),
                         sources[m].contains("bound") ? static_cast<int>(integer(sources[m]["bound"], ws + ".bound")) : 1};
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline json number_or_unlimited(double v) { return std::isinf(v) ? json("unlimited") : json(v); }

}  // namespace detail

// Parses JSON text; syntax errors carry the line and column.
inline nlohmann::json parse_document(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigParseError(msg, line, col);
  }
}

inline nlohmann::json read_document(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open config", path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_document(ss.str());
}

// Writes command-line overrides into the document, replacing what it says.
inline void apply_overrides(nlohmann::json& doc, const Overrides& o) {
  if (!doc.is_object()) throw SchemaError("document: expected an object");
  auto section = [&](const char* name) -> nlohmann::json& {
    if (!doc.contains(name)) doc[name] = nlohmann::json::object();
    if (!doc[name].is_object()) throw SchemaError(std::string(name) + ": expected an object");
    return doc[name];
  };
  if (o.policy) section("policy")["kind"] = *o.policy;
  if (o.gamma_bar) section("policy")["gamma_bar"] = *o.gamma_bar;
  if (o.seed) section("simulation")["seeds"] = nlohmann::json::array({*o.seed});
  if (o.horizon) section("simulation")["horizon"] = *o.horizon;
  if (o.output_directory) section("output")["directory"] = *o.output_directory;
}

// Builds an experiment from a document. Without "preset": "paper-defaults",
// the topology and the policy kind must be given explicitly; every other
// entry falls back to the reference parameter set.
inline Experiment build_experiment(const nlohmann::json& doc) {
  using detail::integer;
  using detail::number;
  using detail::text;
  detail::allow_keys(doc, "document",
                     {"version", "preset", "topology", "commodities", "processes", "energy", "policy", "simulation", "output"});
  if (doc.contains("version") && integer(doc["version"], "version") != config_schema_version)
    throw SchemaError("version: this build reads schema version " + std::to_string(config_schema_version));
  bool preset = false;
  if (doc.contains("preset")) {
    if (text(doc["preset"], "preset") != "paper-defaults")
      throw SchemaError("preset: only 'paper-defaults' is known");
    preset = true;
  }

  const nlohmann::json empty = nlohmann::json::object();
  auto section = [&](const char* name) -> const nlohmann::json& { return doc.contains(name) ? doc[name] : empty; };

  // topology and commodities
  if (!preset && !doc.contains("topology")) throw SchemaError("topology: required unless preset is 'paper-defaults'");
  auto topo_part = detail::parse_topology(doc.contains("topology") ? doc["topology"] : nlohmann::json("default14"));
  std::vector<CommoditySpec> commodities;
  if (doc.contains("commodities"))
    commodities = detail::parse_commodities(doc["commodities"], topo_part);
  else if (topo_part.reference)
    commodities = default14_commodities(0.35, 1);
  else
    commodities = detail::parse_commodities(nlohmann::json::object(), topo_part);
  Topology topo(topo_part.nodes, topo_part.edges, std::move(commodities));
  const int n = topo.node_count();

  // processes
  const auto& p = section("processes");
  detail::allow_keys(p, "processes", {"arrival_kind", "harvest_kind", "harvest_mean", "harvest_cap"});
  ProcessConfig proc;
  if (p.contains("arrival_kind")) {
    auto k = parse_arrival_kind(text(p["arrival_kind"], "processes.arrival_kind"));
    if (!k) throw SchemaError("processes.arrival_kind: expected bernoulli, binomial or poisson");
    proc.arrival_kind = *k;
  }
  if (p.contains("harvest_kind")) {
    auto k = parse_harvest_kind(text(p["harvest_kind"], "processes.harvest_kind"));
    if (!k) throw SchemaError("processes.harvest_kind: expected two-point, deterministic or truncated-poisson");
    proc.harvest_kind = *k;
  }
  proc.harvest_mean = p.contains("harvest_mean") ? detail::per_node(p["harvest_mean"], n, "processes.harvest_mean", true)
                                                 : std::vector<double>(static_cast<std::size_t>(n), 1.0);
  if (p.contains("harvest_cap")) proc.harvest_cap = static_cast<int>(integer(p["harvest_cap"], "processes.harvest_cap"));

  // energy
  const auto& e = section("energy");
  detail::allow_keys(e, "energy", {"b_max", "initial_battery"});
  auto b_max = e.contains("b_max") ? detail::per_node(e["b_max"], n, "energy.b_max")
                                   : std::vector<double>(static_cast<std::size_t>(n), 15.0);
  std::vector<double> b0 = b_max;
  if (e.contains("initial_battery") && !(e["initial_battery"].is_string() && e["initial_battery"] == "full"))
    b0 = detail::per_node(e["initial_battery"], n, "energy.initial_battery");

  // policy
  const auto& pol = section("policy");
  detail::allow_keys(pol, "policy", {"kind", "gamma_bar", "weight", "x_bar", "dual_update_mode"});
  if (!preset && !pol.contains("kind")) throw SchemaError("policy.kind: required unless preset is 'paper-defaults'");
  PolicyKind kind = PolicyKind::ssbp_eh;
  if (pol.contains("kind")) {
    auto k = parse_policy_kind(text(pol["kind"], "policy.kind"));
    if (!k) throw SchemaError("policy.kind: expected SBP, SSBP, SBP-EH or SSBP-EH");
    kind = *k;
  }
  DualUpdateMode mode = DualUpdateMode::sampled;
  if (pol.contains("dual_update_mode")) {
    auto m = parse_dual_update_mode(text(pol["dual_update_mode"], "policy.dual_update_mode"));
    if (!m) throw SchemaError("policy.dual_update_mode: expected sampled or fractional");
    mode = *m;
  }
  const double gamma_bar = pol.contains("gamma_bar") ? number(pol["gamma_bar"], "policy.gamma_bar") : 10.0;
  const double weight = pol.contains("weight") ? number(pol["weight"], "policy.weight") : 0.0;
  PolicyParams params = PolicyParams::make(topo, kind, gamma_bar, weight, mode);
  if (pol.contains("x_bar") && !(pol["x_bar"].is_string() && pol["x_bar"] == "minimal")) {
    const double x = number(pol["x_bar"], "policy.x_bar");
    std::fill(params.x_bar.values().begin(), params.x_bar.values().end(), x);
  }

  // simulation
  const auto& s = section("simulation");
  detail::allow_keys(s, "simulation", {"horizon", "seeds", "workers"});
  Experiment ex{SimConfig{std::move(topo), std::move(proc), std::move(params), detail::to_node_map(b_max),
                          detail::to_node_map(b0), 5000, {1}},
                0, "out", {}, false, {}, true};
  if (s.contains("horizon")) ex.sim.horizon = integer(s["horizon"], "simulation.horizon");
  if (s.contains("seeds")) {
    const auto& seeds = s["seeds"];
    ex.sim.seeds.clear();
    if (seeds.is_array()) {
      for (const auto& x : seeds) {
        if (!x.is_number_unsigned()) throw SchemaError("simulation.seeds: expected nonnegative integers");
        ex.sim.seeds.push_back(x.get<std::uint64_t>());
      }
    } else {
      detail::allow_keys(seeds, "simulation.seeds", {"first", "count"});
      const auto first = integer(seeds.value("first", nlohmann::json(1)), "simulation.seeds.first");
      const auto count = integer(seeds.value("count", nlohmann::json(1)), "simulation.seeds.count");
      if (first < 0 || count < 1) throw SchemaError("simulation.seeds: need first >= 0 and count >= 1");
      for (long long k = 0; k < count; ++k) ex.sim.seeds.push_back(static_cast<std::uint64_t>(first + k));
    }
    if (ex.sim.seeds.empty()) throw SchemaError("simulation.seeds: at least one seed is required");
  }
  if (s.contains("workers")) {
    const auto w = integer(s["workers"], "simulation.workers");
    if (w < 0) throw SchemaError("simulation.workers: must be nonnegative");
    ex.workers = static_cast<unsigned>(w);
  }

  // output
  const auto& o = section("output");
  detail::allow_keys(o, "output", {"directory", "figures", "multiplier_node", "node_series"});
  if (o.contains("directory")) ex.output_directory = text(o["directory"], "output.directory");
  if (o.contains("figures")) {
    const auto& f = o["figures"];
    if (f.is_string() && f == "all") {
      ex.figures = figure_ids();
      ex.all_figures = true;
    } else if (f.is_string() && f == "none") {
      ex.figures.clear();
    } else if (f.is_array()) {
      for (const auto& id : f) {
        auto name = text(id, "output.figures");
        if (std::find(figure_ids().begin(), figure_ids().end(), name) == figure_ids().end())
          throw SchemaError("output.figures: unknown figure '" + name + "'");
        ex.figures.push_back(name);
      }
    } else {
      throw SchemaError("output.figures: expected \"all\", \"none\" or a list of figure ids");
    }
  } else {
    ex.figures = {"queued"};
  }
  if (o.contains("multiplier_node"))
    ex.figure_options.multiplier_node = static_cast<NodeId>(integer(o["multiplier_node"], "output.multiplier_node"));
  if (o.contains("node_series")) {
    if (!o["node_series"].is_boolean()) throw SchemaError("output.node_series: expected true or false");
    ex.node_series = o["node_series"].get<bool>();
  }
  if (std::count(ex.figures.begin(), ex.figures.end(), "multipliers") && !ex.node_series)
    throw SchemaError("output.figures: 'multipliers' needs output.node_series = true");
  return ex;
}

// Fully expanded form of an experiment. Feeding it back to build_experiment
// yields the same experiment; its serialization is what the manifest hashes.
inline nlohmann::json effective_document(const Experiment& ex) {
  using nlohmann::json;
  const auto& sim = ex.sim;
  const auto& topo = sim.topology;
  json edges = json::array();
  for (const auto& e : topo.edges()) edges.push_back({e.a, e.b});
  json commodities = json::array();
  for (const auto& c : topo.commodities()) {
    json sources = json::array();
    for (const auto& [node, src] : c.sources) sources.push_back({{"node", node}, {"rate", src.rate}, {"bound", src.bound}});
    commodities.push_back({{"destination", c.destination}, {"sources", sources}});
  }
  json harvest = json::array();
  for (double v : sim.processes.harvest_mean) harvest.push_back(detail::number_or_unlimited(v));
  json b_max = json::array(), b0 = json::array();
  for (double v : sim.b_max.values()) b_max.push_back(v);
  for (double v : sim.initial_battery.values()) b0.push_back(v);

  // Uniform parameters are written as scalars; anything else is rejected
  // because the document has no per-node policy syntax.
  auto uniform = [](std::span<const double> xs, const char* what) {
    for (double x : xs)
      if (x != xs.front()) throw SchemaError(std::string(what) + " is not uniform and cannot be written to a document");
    return xs.empty() ? 0.0 : xs.front();
  };

  return json{
      {"version", config_schema_version},
      {"topology", {{"nodes", topo.node_count()}, {"edges", edges}}},
      {"commodities", commodities},
      {"processes",
       {{"arrival_kind", std::string(to_string(sim.processes.arrival_kind))},
        {"harvest_kind", std::string(to_string(sim.processes.harvest_kind))},
        {"harvest_mean", harvest},
        {"harvest_cap", sim.processes.harvest_cap}}},
      {"energy", {{"b_max", b_max}, {"initial_battery", b0}}},
      {"policy",
       {{"kind", std::string(to_string(sim.policy.kind))},
        {"gamma_bar", uniform(sim.policy.gamma_bar.values(), "gamma_bar")},
        {"weight", uniform(sim.policy.weights, "weight")},
        {"x_bar", [&] {
           // x_bar varies per node when minimal, so "minimal" is kept symbolic.
           PolicyParams minimal = PolicyParams::make(topo, sim.policy.kind, uniform(sim.policy.gamma_bar.values(), "gamma_bar"));
           if (minimal.x_bar == sim.policy.x_bar) return json("minimal");
           return json(uniform(sim.policy.x_bar.values(), "x_bar"));
         }()},
        {"dual_update_mode", std::string(to_string(sim.policy.dual_update_mode))}}},
      {"simulation", {{"horizon", sim.horizon}, {"seeds", sim.seeds}, {"workers", ex.workers}}},
      {"output",
       {{"directory", ex.output_directory},
        {"figures", ex.all_figures ? json("all") : json(ex.figures)},
        {"multiplier_node", ex.figure_options.multiplier_node},
        {"node_series", ex.node_series}}},
  };
}

// Hash of the canonical effective document, leaving out the output
// directory and worker count, which do not change any result.
inline std::uint64_t config_hash(const Experiment& ex) {
  auto doc = effective_document(ex);
  doc["output"].erase("directory");
  doc["simulation"].erase("workers");
  return fnv1a64(doc.dump());
}

}  // namespace ehbp
