#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ehbp/engine.hpp"
#include "ehbp/errors.hpp"

namespace ehbp {

// Malformed CSV input or a figure whose data is missing from the record.
class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string run_id(const MetricsRecord& r) { return r.policy + "_" + std::to_string(r.seed); }

// ---------------------------------------------------------------------------
// CSV tables

struct PerSlotRow {
  std::string run_id;
  std::string policy;
  std::uint64_t seed = 0;
  long long t = 0;
  long long total_queued = 0;
  std::optional<double> total_energy;
  double data_balance_avg = 0.0;
  std::optional<double> energy_balance_avg;
  int null_tx = 0;

  bool operator==(const PerSlotRow&) const = default;
};

struct PerNodeRow {
  std::string run_id;
  NodeId node = 0;
  CommodityId commodity = 0;
  double mean_queue = 0.0;
  double mean_gamma = 0.0;

  bool operator==(const PerNodeRow&) const = default;
};

struct DelayRow {
  std::string run_id;
  std::uint64_t packet_id = 0;
  CommodityId commodity = 0;
  long long birth_slot = 0;
  long long delivery_slot = 0;
  long long delay = 0;

  bool operator==(const DelayRow&) const = default;
};

inline constexpr std::string_view per_slot_header =
    "run_id,policy,seed,t,total_queued,total_energy,data_balance_avg,energy_balance_avg,null_tx";
inline constexpr std::string_view per_node_header = "run_id,node,commodity,mean_queue,mean_gamma";
inline constexpr std::string_view delay_header = "run_id,packet_id,commodity,birth_slot,delivery_slot,delay";

inline std::vector<PerSlotRow> per_slot_rows(const MetricsRecord& r) {
  std::vector<PerSlotRow> out;
  const auto data_avg = prefix_mean(r.data_balance);
  const auto energy_avg = r.has_energy ? prefix_mean(r.energy_balance) : std::vector<double>{};
  const std::string id = run_id(r);
  for (std::size_t t = 0; t < r.total_queued.size(); ++t) {
    PerSlotRow row{id, r.policy, r.seed, static_cast<long long>(t), r.total_queued[t], std::nullopt, data_avg[t],
                   std::nullopt, r.null_transmissions[t]};
    if (r.has_energy) {
      row.total_energy = r.total_energy[t];
      row.energy_balance_avg = energy_avg[t];
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<PerNodeRow> per_node_rows(const MetricsRecord& r) {
  std::vector<PerNodeRow> out;
  for (NodeId i = 1; i <= r.node_count; ++i)
    for (CommodityId k = 1; k <= r.commodity_count; ++k)
      out.push_back({run_id(r), i, k, r.mean_queue(i, k), r.mean_gamma(i, k)});
  return out;
}

inline std::vector<DelayRow> delay_rows(const MetricsRecord& r) {
  std::vector<DelayRow> out;
  for (const auto& d : r.deliveries)
    out.push_back({run_id(r), d.packet_id, d.commodity, d.birth_slot, d.delivery_slot, d.delay()});
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<PerSlotRow>& rows) {
  os << per_slot_header << '\n';
  for (const auto& r : rows) {
    os << r.run_id << ',' << r.policy << ',' << r.seed << ',' << r.t << ',' << r.total_queued << ','
       << (r.total_energy ? format_number(*r.total_energy) : "") << ',' << format_number(r.data_balance_avg) << ','
       << (r.energy_balance_avg ? format_number(*r.energy_balance_avg) : "") << ',' << r.null_tx << '\n';
  }
}

inline void write_csv(std::ostream& os, const std::vector<PerNodeRow>& rows) {
  os << per_node_header << '\n';
  for (const auto& r : rows)
    os << r.run_id << ',' << r.node << ',' << r.commodity << ',' << format_number(r.mean_queue) << ','
       << format_number(r.mean_gamma) << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<DelayRow>& rows) {
  os << delay_header << '\n';
  for (const auto& r : rows)
    os << r.run_id << ',' << r.packet_id << ',' << r.commodity << ',' << r.birth_slot << ',' << r.delivery_slot << ','
       << r.delay << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ReportError("csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::optional<double> parse_optional(std::string_view s, std::size_t line) {
  if (s.empty()) return std::nullopt;
  return parse_field<double>(s, line);
}

// Calls `row(fields, line_number)` for every data line after checking the header.
template <typename F>
void read_table(std::istream& is, std::string_view header, F&& row) {
  std::string line;
  if (!std::getline(is, line) || line != header) throw ReportError("csv header mismatch, expected: " + std::string(header));
  const std::size_t width = split_fields(header).size();
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    auto fields = split_fields(line);
    if (fields.size() != width)
      throw ReportError("csv line " + std::to_string(n) + ": expected " + std::to_string(width) + " fields");
    row(fields, n);
  }
}

}  // namespace detail

inline std::vector<PerSlotRow> read_per_slot_csv(std::istream& is) {
  std::vector<PerSlotRow> out;
  detail::read_table(is, per_slot_header, [&](const auto& f, std::size_t n) {
    using detail::parse_field;
    out.push_back({std::string(f[0]), std::string(f[1]), parse_field<std::uint64_t>(f[2], n),
                   parse_field<long long>(f[3], n), parse_field<long long>(f[4], n), detail::parse_optional(f[5], n),
                   parse_field<double>(f[6], n), detail::parse_optional(f[7], n), parse_field<int>(f[8], n)});
  });
  return out;
}

inline std::vector<PerNodeRow> read_per_node_csv(std::istream& is) {
  std::vector<PerNodeRow> out;
  detail::read_table(is, per_node_header, [&](const auto& f, std::size_t n) {
    using detail::parse_field;
    out.push_back({std::string(f[0]), parse_field<int>(f[1], n), parse_field<int>(f[2], n),
                   parse_field<double>(f[3], n), parse_field<double>(f[4], n)});
  });
  return out;
}

inline std::vector<DelayRow> read_delay_csv(std::istream& is) {
  std::vector<DelayRow> out;
  detail::read_table(is, delay_header, [&](const auto& f, std::size_t n) {
    using detail::parse_field;
    out.push_back({std::string(f[0]), parse_field<std::uint64_t>(f[1], n), parse_field<int>(f[2], n),
                   parse_field<long long>(f[3], n), parse_field<long long>(f[4], n), parse_field<long long>(f[5], n)});
  });
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing", path.string());
  os << content;
  os.close();
  if (!os) throw IoError("write failed", path.string());
}

struct CsvFiles {
  std::filesystem::path per_slot;
  std::filesystem::path per_node;
  std::filesystem::path delay;
};

// Writes the three tables for `records` as <prefix>per_slot.csv,
// <prefix>per_node.csv and <prefix>delay.csv.
inline CsvFiles emit_csv(const std::vector<const MetricsRecord*>& records, const std::string& prefix) {
  std::vector<PerSlotRow> slots;
  std::vector<PerNodeRow> nodes;
  std::vector<DelayRow> delays;
  for (const auto* r : records) {
    auto s = per_slot_rows(*r);
    slots.insert(slots.end(), s.begin(), s.end());
    auto n = per_node_rows(*r);
    nodes.insert(nodes.end(), n.begin(), n.end());
    auto d = delay_rows(*r);
    delays.insert(delays.end(), d.begin(), d.end());
  }
  CsvFiles files{prefix + "per_slot.csv", prefix + "per_node.csv", prefix + "delay.csv"};
  std::ostringstream a, b, c;
  write_csv(a, slots);
  write_csv(b, nodes);
  write_csv(c, delays);
  write_text_file(files.per_slot, a.str());
  write_text_file(files.per_node, b.str());
  write_text_file(files.delay, c.str());
  return files;
}

// Per-slot total queued of every compared policy side by side, one block per seed.
inline void write_compare_csv(std::ostream& os, const CompareResult& cmp) {
  os << "seed,t";
  for (const auto& l : cmp.labels) os << ',' << l;
  os << '\n';
  for (std::size_t s = 0; s < cmp.seeds.size(); ++s)
    for (long long t = 0; t < cmp.horizon; ++t) {
      os << cmp.seeds[s] << ',' << t;
      for (const auto& runs : cmp.runs) {
        os << ',';
        if (runs[s].record) os << runs[s].record->total_queued[static_cast<std::size_t>(t)];
      }
      os << '\n';
    }
}

// ---------------------------------------------------------------------------
// Figures

inline std::map<long long, std::size_t> delay_histogram(const std::vector<Delivery>& deliveries, long long from_slot = 0) {
  std::map<long long, std::size_t> bins;
  for (const auto& d : deliveries)
    if (d.delivery_slot >= from_slot) ++bins[d.delay()];
  return bins;
}

struct LineSeries {
  std::string label;
  std::vector<double> y;  // plotted against x = 0, 1, 2, ...
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per category
  std::string color = "#1f77b4";
};

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors;
}

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline double nice_step(double span, int target_ticks = 5) {
  if (!(span > 0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double m = r < 1.5 ? 1 : r < 3 ? 2 : r < 7 ? 5 : 10;
  return m * mag;
}

// Plot frame with axes, ticks and labels; maps data to pixels.
struct Frame {
  static constexpr double width = 720, height = 440, left = 70, right = 20, top = 40, bottom = 60;
  double x0, x1, y0, y1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }

  static Frame fit(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    const double ys = nice_step(y1 - y0);
    return Frame{x0, x1, std::floor(y0 / ys) * ys, std::ceil(y1 / ys) * ys};
  }

  void open(std::ostringstream& os, std::string_view title, std::string_view xlabel, std::string_view ylabel) const {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
       << "</text>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << escape_xml(xlabel)
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << height / 2
       << ")\">" << escape_xml(ylabel) << "</text>\n";
    os << "<g stroke=\"#ccc\" stroke-width=\"0.5\">\n";
    const double ys = nice_step(y1 - y0);
    for (double y = y0; y <= y1 + ys * 1e-9; y += ys)
      os << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(py(y)) << "\" x2=\"" << fmt2(width - right) << "\" y2=\""
         << fmt2(py(y)) << "\"/>\n";
    os << "</g>\n<g text-anchor=\"end\">\n";
    for (double y = y0; y <= y1 + ys * 1e-9; y += ys)
      os << "<text x=\"" << fmt2(left - 6) << "\" y=\"" << fmt2(py(y) + 4) << "\">" << format_number(std::round(y / ys) * ys)
         << "</text>\n";
    os << "</g>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
       << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  }

  void x_ticks(std::ostringstream& os) const {
    const double xs = nice_step(x1 - x0);
    os << "<g text-anchor=\"middle\">\n";
    for (double x = std::ceil(x0 / xs) * xs; x <= x1 + xs * 1e-9; x += xs)
      os << "<text x=\"" << fmt2(px(x)) << "\" y=\"" << fmt2(height - bottom + 16) << "\">"
         << format_number(std::round(x / xs) * xs) << "</text>\n";
    os << "</g>\n";
  }
};

inline void legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::vector<bool>& dashed = {}) {
  double y = Frame::top + 14;
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const double x = Frame::width - Frame::right - 150;
    os << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 20 << "\" y2=\"" << y - 4 << "\" stroke=\""
       << entries[n].second << "\" stroke-width=\"2\"" << (n < dashed.size() && dashed[n] ? " stroke-dasharray=\"6 4\"" : "")
       << "/>\n";
    os << "<text x=\"" << x + 26 << "\" y=\"" << y << "\">" << escape_xml(entries[n].first) << "</text>\n";
    y += 16;
  }
}

}  // namespace detail

inline std::string line_chart_svg(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                                  const std::vector<LineSeries>& series) {
  double xmax = 1, ymin = 0, ymax = 0;
  for (const auto& s : series) {
    xmax = std::max(xmax, static_cast<double>(s.y.size()) - 1);
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  auto frame = detail::Frame::fit(0, xmax, ymin, ymax);
  std::ostringstream os;
  frame.open(os, title, xlabel, ylabel);
  frame.x_ticks(os);
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<bool> dashed;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << (s.dashed ? "1.5" : "1") << "\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (std::size_t t = 0; t < s.y.size(); ++t)
      os << (t ? " " : "") << detail::fmt2(frame.px(static_cast<double>(t))) << ',' << detail::fmt2(frame.py(s.y[t]));
    os << "\"/>\n";
    entries.emplace_back(s.label, s.color);
    dashed.push_back(s.dashed);
  }
  detail::legend(os, entries, dashed);
  os << "</svg>\n";
  return os.str();
}

inline std::string bar_chart_svg(std::string_view title, std::string_view xlabel, std::string_view ylabel,
                                 const std::vector<std::string>& categories, const std::vector<BarGroup>& groups) {
  double ymax = 0;
  for (const auto& g : groups)
    for (double v : g.values) ymax = std::max(ymax, v);
  const double slots = static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  auto frame = detail::Frame::fit(0, slots, 0, ymax);
  std::ostringstream os;
  frame.open(os, title, xlabel, ylabel);
  const double slot_px = frame.px(1) - frame.px(0);
  const double bar_px = slot_px * 0.8 / static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  os << "<g text-anchor=\"middle\">\n";
  for (std::size_t c = 0; c < categories.size(); ++c)
    os << "<text x=\"" << detail::fmt2(frame.px(static_cast<double>(c) + 0.5)) << "\" y=\""
       << detail::fmt2(detail::Frame::height - detail::Frame::bottom + 16) << "\">" << detail::escape_xml(categories[c])
       << "</text>\n";
  os << "</g>\n";
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    os << "<g fill=\"" << groups[g].color << "\">\n";
    for (std::size_t c = 0; c < groups[g].values.size() && c < categories.size(); ++c) {
      const double x = frame.px(static_cast<double>(c)) + slot_px * 0.1 + bar_px * static_cast<double>(g);
      const double y = frame.py(groups[g].values[c]);
      os << "<rect x=\"" << detail::fmt2(x) << "\" y=\"" << detail::fmt2(y) << "\" width=\"" << detail::fmt2(bar_px)
         << "\" height=\"" << detail::fmt2(frame.py(0) - y) << "\"/>\n";
    }
    os << "</g>\n";
    entries.emplace_back(groups[g].label, groups[g].color);
  }
  if (groups.size() > 1) detail::legend(os, entries);
  os << "</svg>\n";
  return os.str();
}

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"queued",         "node-queues",     "energy", "data-balance",
                                            "energy-balance", "multipliers", "delay-histogram"};
  return ids;
}

inline bool figure_needs_energy(std::string_view id) { return id == "energy" || id == "energy-balance"; }

struct FigureOptions {
  NodeId multiplier_node = 5;  // node whose multiplier averages are drawn
  long long delay_from_slot = 0;
};

// SVG text of one figure for one run.
inline std::string figure_svg(const MetricsRecord& r, std::string_view id, const FigureOptions& opt = {}) {
  const auto& colors = palette();
  auto need_energy = [&] {
    if (!r.has_energy)
      throw ReportError("figure '" + std::string(id) + "' needs energy series, which " + r.policy + " runs do not have");
  };
  const std::string tag = " (" + r.policy + ", seed " + std::to_string(r.seed) + ")";

  if (id == "queued") {
    std::vector<double> q(r.total_queued.begin(), r.total_queued.end());
    return line_chart_svg("Total packets queued" + tag, "slot", "packets",
                          {{"queued", q, colors[0], false}, {"prefix mean", prefix_mean(r.total_queued), colors[1], true}});
  }
  if (id == "node-queues") {
    std::vector<std::string> cats;
    for (NodeId i = 1; i <= r.node_count; ++i) cats.push_back(std::to_string(i));
    std::vector<BarGroup> groups;
    for (CommodityId k = 1; k <= r.commodity_count; ++k) {
      BarGroup g{"commodity " + std::to_string(k), {}, colors[static_cast<std::size_t>(k - 1) % colors.size()]};
      for (NodeId i = 1; i <= r.node_count; ++i) g.values.push_back(r.mean_queue(i, k));
      groups.push_back(std::move(g));
    }
    return bar_chart_svg("Average queue per node" + tag, "node", "packets", cats, groups);
  }
  if (id == "energy") {
    need_energy();
    return line_chart_svg("Total stored energy" + tag, "slot", "energy units", {{"energy", r.total_energy, colors[2], false}});
  }
  if (id == "data-balance") {
    return line_chart_svg("Average data balance" + tag, "slot", "packets / slot",
                          {{"data balance", prefix_mean(r.data_balance), colors[0], false}});
  }
  if (id == "energy-balance") {
    need_energy();
    return line_chart_svg("Average energy balance" + tag, "slot", "energy units / slot",
                          {{"energy balance", prefix_mean(r.energy_balance), colors[2], false}});
  }
  if (id == "multipliers") {
    if (r.gamma_trace.empty()) throw ReportError("figure 'multipliers' needs the per-slot multiplier trace");
    if (opt.multiplier_node < 1 || opt.multiplier_node > r.node_count)
      throw ReportError("figure 'multipliers': node " + std::to_string(opt.multiplier_node) + " does not exist");
    std::vector<LineSeries> series;
    for (CommodityId k = 1; k <= r.commodity_count; ++k) {
      std::vector<double> g;
      for (long long t = 0; t < static_cast<long long>(r.total_queued.size()); ++t) g.push_back(r.gamma(t, opt.multiplier_node, k));
      series.push_back({"commodity " + std::to_string(k), prefix_mean(g), colors[static_cast<std::size_t>(k - 1) % colors.size()], false});
    }
    return line_chart_svg("Average queue multipliers at node " + std::to_string(opt.multiplier_node) + tag, "slot",
                          "time-averaged multiplier", series);
  }
  if (id == "delay-histogram") {
    auto bins = delay_histogram(r.deliveries, opt.delay_from_slot);
    std::vector<std::string> cats;
    BarGroup g{"packets", {}, colors[0]};
    if (!bins.empty())
      for (long long d = bins.begin()->first; d <= bins.rbegin()->first; ++d) {
        cats.push_back(std::to_string(d));
        auto it = bins.find(d);
        g.values.push_back(it == bins.end() ? 0.0 : static_cast<double>(it->second));
      }
    return bar_chart_svg("Packet delay" + tag, "delay (slots)", "packets", cats, {g});
  }
  throw ReportError("unknown figure '" + std::string(id) + "'");
}

// Writes <dir>/<figure-id>_<policy>_<seed>.svg and returns its path.
inline std::filesystem::path render_figure(const MetricsRecord& r, std::string_view id, const std::filesystem::path& dir,
                                           const FigureOptions& opt = {}) {
  auto path = dir / (std::string(id) + "_" + r.policy + "_" + std::to_string(r.seed) + ".svg");
  write_text_file(path, figure_svg(r, id, opt));
  return path;
}

// Four-policy style overlay of total queued packets with dashed prefix means, one file per seed.
inline std::vector<std::filesystem::path> render_compare(const CompareResult& cmp, const std::filesystem::path& dir) {
  const auto& colors = palette();
  std::vector<std::filesystem::path> out;
  for (std::size_t s = 0; s < cmp.seeds.size(); ++s) {
    std::vector<LineSeries> series;
    for (std::size_t c = 0; c < cmp.labels.size(); ++c) {
      const auto& e = cmp.runs[c][s];
      if (!e.record) continue;
      const auto& color = colors[c % colors.size()];
      series.push_back({cmp.labels[c], std::vector<double>(e.record->total_queued.begin(), e.record->total_queued.end()),
                        color, false});
      series.push_back({cmp.labels[c] + " mean", prefix_mean(e.record->total_queued), color, true});
    }
    auto path = dir / ("queued-compare_all_" + std::to_string(cmp.seeds[s]) + ".svg");
    write_text_file(path, line_chart_svg("Total packets queued, seed " + std::to_string(cmp.seeds[s]), "slot", "packets", series));
    out.push_back(path);
  }
  return out;
}

}  // namespace ehbp
