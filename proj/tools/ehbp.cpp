// Command-line runner for energy-harvesting backpressure experiments.
//
// Exit codes: 0 success, 1 usage or file I/O, 2 document parse/schema error,
// 3 configuration rejected by validation, 4 simulation fault.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehbp/config.hpp"
#include "ehbp/engine.hpp"
#include "ehbp/report.hpp"

namespace fs = std::filesystem;
using namespace ehbp;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_parse = 2;
constexpr int exit_validation = 3;
constexpr int exit_fault = 4;

constexpr const char* format_version = "1";

struct Args {
  std::string config;
  Overrides overrides;
  std::vector<std::string> policies{"SBP", "SSBP", "SBP-EH", "SSBP-EH"};
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Experiment load(const Args& a) {
  auto doc = read_document(a.config);
  apply_overrides(doc, a.overrides);
  return build_experiment(doc);
}

// Figures to draw for one policy: an explicit list is taken literally, "all"
// skips the energy figures for policies that have no battery.
std::vector<std::string> figures_for(const Experiment& ex, PolicyKind kind) {
  std::vector<std::string> out;
  for (const auto& id : ex.figures) {
    if (figure_needs_energy(id) && !is_energy_aware(kind)) {
      if (ex.all_figures) continue;
      throw ConfigError("figure '" + id + "' needs energy series, which " + std::string(to_string(kind)) +
                        " runs do not have");
    }
    out.push_back(id);
  }
  return out;
}

fs::path prepare_output(const Experiment& ex) {
  fs::path dir = ex.output_directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory", dir.string());
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const Experiment& ex,
                    const std::vector<std::string>& policies, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  nlohmann::json m{{"format_version", format_version},
                   {"schema_version", config_schema_version},
                   {"command", command},
                   {"config_hash", hex(config_hash(ex))},
                   {"seeds", ex.sim.seeds},
                   {"policies", policies},
                   {"config", effective_document(ex)},
                   {"files", files}};
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

RunOptions run_options(const Experiment& ex) {
  RunOptions o;
  o.record_node_series = ex.node_series;
  return o;
}

void append(std::vector<std::string>& files, const CsvFiles& c) {
  for (const auto& p : {c.per_slot, c.per_node, c.delay}) files.push_back(p.filename().string());
}

void print_validation(const Experiment& ex) {
  auto violations = validate_capacity(ex.sim.topology, ex.sim.policy, ex.sim.b_max);
  for (const auto& v : violations) std::cout << v.describe() << '\n';
  if (!violations.empty()) throw ConfigError(std::to_string(violations.size()) + " capacity violation(s)");
  ex.sim.validate();
}

int cmd_validate(const Args& a) {
  auto ex = load(a);
  print_validation(ex);
  std::cout << "ok: " << to_string(ex.sim.policy.kind) << ", " << ex.sim.topology.node_count() << " nodes, "
            << ex.sim.topology.commodity_count() << " commodities, horizon " << ex.sim.horizon << ", "
            << ex.sim.seeds.size() << " seed(s)\n";
  return exit_ok;
}

int cmd_run(const Args& a) {
  auto ex = load(a);
  ex.sim.seeds.resize(1);
  ex.sim.validate();
  auto figures = figures_for(ex, ex.sim.policy.kind);
  auto dir = prepare_output(ex);
  auto rec = run(ex.sim, ex.sim.seeds.front(), run_options(ex));

  std::vector<std::string> files;
  append(files, emit_csv({&rec}, (dir / "").string()));
  for (const auto& id : figures) files.push_back(render_figure(rec, id, dir, ex.figure_options).filename().string());
  write_manifest(dir, "run", ex, {rec.policy}, files);
  std::cout << rec.policy << " seed " << rec.seed << ": average queued " << average_queued(rec) << ", mean delay "
            << mean_delay(rec) << ", delivered " << rec.delivered << '\n';
  return exit_ok;
}

void write_summary(std::ostream& os, const std::vector<BatchEntry>& entries, std::string_view policy) {
  os << "policy,seed,average_queued,mean_delay,delivered,final_energy_balance_avg,null_tx,error\n";
  for (const auto& e : entries) {
    os << policy << ',' << e.seed << ',';
    if (e.record) {
      const auto& r = *e.record;
      long long nulls = 0;
      for (int n : r.null_transmissions) nulls += n;
      os << format_number(average_queued(r)) << ',' << format_number(mean_delay(r)) << ',' << r.delivered << ','
         << (r.has_energy ? format_number(prefix_mean(r.energy_balance).back()) : "") << ',' << nulls << ",\n";
    } else {
      std::string msg = e.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << ",,,,," << msg << '\n';
    }
  }
}

int report_errors(const std::vector<BatchEntry>& entries, std::string_view policy) {
  int failed = 0;
  for (const auto& e : entries)
    if (!e.record) {
      std::cerr << "error: " << policy << " seed " << e.seed << ": " << e.error << '\n';
      ++failed;
    }
  return failed;
}

int cmd_batch(const Args& a) {
  auto ex = load(a);
  ex.sim.validate();
  auto figures = figures_for(ex, ex.sim.policy.kind);
  auto dir = prepare_output(ex);
  auto result = run_batch(ex.sim, ex.sim.seeds, ex.workers, run_options(ex));
  const std::string policy(to_string(ex.sim.policy.kind));

  std::vector<const MetricsRecord*> ok;
  for (const auto& e : result.entries)
    if (e.record) ok.push_back(&*e.record);
  std::vector<std::string> files;
  append(files, emit_csv(ok, (dir / "").string()));
  for (const auto* r : ok)
    for (const auto& id : figures) files.push_back(render_figure(*r, id, dir, ex.figure_options).filename().string());
  std::ostringstream summary;
  write_summary(summary, result.entries, policy);
  write_text_file(dir / "summary.csv", summary.str());
  files.push_back("summary.csv");
  write_manifest(dir, "batch", ex, {policy}, files);

  std::cout << policy << " over " << ok.size() << " seed(s): average queued " << result.summary.average_queued.mean
            << " (sd " << result.summary.average_queued.stddev << "), mean delay " << result.summary.mean_delay.mean
            << '\n';
  return report_errors(result.entries, policy) ? exit_fault : exit_ok;
}

int cmd_compare(const Args& a) {
  auto ex = load(a);
  std::vector<SimConfig> configs;
  for (const auto& name : a.policies) {
    auto kind = parse_policy_kind(name);
    if (!kind) throw SchemaError("--policies: unknown policy '" + name + "'");
    Overrides o = a.overrides;
    o.policy = name;
    Args one = a;
    one.overrides = o;
    auto e = load(one);
    e.sim.validate();
    figures_for(e, *kind);
    configs.push_back(std::move(e.sim));
  }
  auto dir = prepare_output(ex);
  auto cmp = compare(configs, ex.sim.seeds, ex.workers, run_options(ex));

  std::vector<const MetricsRecord*> ok;
  std::vector<std::string> files;
  std::ostringstream summary;
  int failed = 0;
  for (std::size_t c = 0; c < cmp.labels.size(); ++c) {
    for (const auto& e : cmp.runs[c])
      if (e.record) ok.push_back(&*e.record);
    std::ostringstream part;
    write_summary(part, cmp.runs[c], cmp.labels[c]);
    auto text = part.str();
    summary << (c == 0 ? text : text.substr(text.find('\n') + 1));
    failed += report_errors(cmp.runs[c], cmp.labels[c]);
  }
  append(files, emit_csv(ok, (dir / "").string()));
  std::ostringstream aligned;
  write_compare_csv(aligned, cmp);
  write_text_file(dir / "compare_queued.csv", aligned.str());
  write_text_file(dir / "summary.csv", summary.str());
  files.push_back("compare_queued.csv");
  files.push_back("summary.csv");
  for (const auto& p : render_compare(cmp, dir)) files.push_back(p.filename().string());
  for (const auto* r : ok) {
    Experiment per = ex;
    for (const auto& id : figures_for(per, *parse_policy_kind(r->policy)))
      files.push_back(render_figure(*r, id, dir, ex.figure_options).filename().string());
  }
  write_manifest(dir, "compare", ex, cmp.labels, files);

  for (std::size_t c = 0; c < cmp.labels.size(); ++c) {
    std::vector<double> aq;
    for (const auto& e : cmp.runs[c])
      if (e.record) aq.push_back(average_queued(*e.record));
    std::cout << cmp.labels[c] << ": average queued " << summarize(aq).mean << '\n';
  }
  return failed ? exit_fault : exit_ok;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return exit_parse;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return exit_parse;
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return exit_validation;
  } catch (const SimulationFault& e) {
    std::cerr << "simulation fault: " << e.what() << '\n';
    return exit_fault;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const ReportError& e) {
    std::cerr << "report error: " << e.what() << '\n';
    return exit_validation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting backpressure simulator"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&](CLI::App* sub, bool run_like) {
    sub->add_option("config", args.config, "experiment document (JSON)")->required();
    sub->add_option_function<std::string>("--policy", [&](const std::string& v) { args.overrides.policy = v; },
                                          "policy kind: SBP, SSBP, SBP-EH or SSBP-EH");
    sub->add_option_function<long long>("--horizon", [&](const long long& v) { args.overrides.horizon = v; },
                                        "number of slots");
    sub->add_option_function<double>("--tbar", [&](const double& v) { args.overrides.gamma_bar = v; },
                                      "multiplier threshold gamma_bar (x_bar follows when minimal)");
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { args.overrides.seed = v; },
                                            "run this single seed");
    if (run_like)
      sub->add_option_function<std::string>("--out", [&](const std::string& v) { args.overrides.output_directory = v; },
                                            "output directory");
  };

  auto* validate = app.add_subcommand("validate", "check a document and the battery capacity conditions");
  add_common(validate, false);
  auto* run_cmd = app.add_subcommand("run", "simulate the first seed");
  add_common(run_cmd, true);
  auto* batch = app.add_subcommand("batch", "simulate every seed");
  add_common(batch, true);
  auto* cmp = app.add_subcommand("compare", "simulate several policies on the same network and seeds");
  add_common(cmp, true);
  cmp->add_option("--policies", args.policies, "policies to compare")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_io;
  }

  if (*validate) return guarded([&] { return cmd_validate(args); });
  if (*run_cmd) return guarded([&] { return cmd_run(args); });
  if (*batch) return guarded([&] { return cmd_batch(args); });
  return guarded([&] { return cmd_compare(args); });
}
