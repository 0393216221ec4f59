#include "sdnft/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace sdnft {
namespace {

std::string metadata(const RunResult& run) {
  std::string out;
  out += fmt::format("# case: {}\n", run.case_name);
  out += fmt::format("# seed: {}\n", run.seed);
  out += fmt::format("# events: {}\n", run.events);
  out += fmt::format("# violations: {}\n", run.violations.size());
  const NetworkCounters& n = run.network;
  out += fmt::format(
      "# counters: packets_created={} packets_consumed={} drops_queue={} drops_cut={} "
      "drops_no_route={} drops_flushed={} bfd_dropped={} bfd_transitions={} reroutes={} "
      "restorations={} flow_mods={} group_mods={} bucket_reorders={} dash_retransmissions={}\n",
      n.created, n.consumed, n.drops[0], n.drops[1], n.drops[2], n.drops[3],
      run.bfd_packets_dropped, run.bfd_transitions.size(), run.reroutes.size(),
      run.controller.restorations, run.controller.flow_mods, run.controller.group_mods,
      run.controller.bucket_reorders, run.dash_retransmissions);
  out += fmt::format("# scenario: {}\n", scenario_to_json(run.config).dump());
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

std::string optional_number(const std::optional<double>& v) {
  return v ? number(*v) : std::string("NA");
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(values.size());
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kPanelWidth = 760;
constexpr int kPanelHeight = 280;
constexpr int kLeft = 70;
constexpr int kRight = 190;
constexpr int kTop = 36;
constexpr int kBottom = 46;

// Rounds the span up to a 1/2/5 step so ticks land on readable values.
double nice_step(double span, int ticks) {
  if (span <= 0) return 1;
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

struct Axis {
  double lo = 0;
  double hi = 1;
  double step = 0.2;
};

Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    hi = lo + 1;
  }
  Axis a;
  a.step = nice_step(hi - lo, 5);
  a.lo = std::floor(lo / a.step) * a.step;
  a.hi = std::ceil(hi / a.step) * a.step;
  return a;
}

std::string tick_label(double v) {
  if (std::abs(v) >= 1e6) return fmt::format("{:.3g}", v);
  return fmt::format("{:.4g}", v);
}

void axes(std::string& out, int y0, const Axis& xa, const Axis& ya, const std::string& title,
          const std::string& x_label, const std::string& y_label, bool x_ticks) {
  const int pw = kPanelWidth - kLeft - kRight;
  const int ph = kPanelHeight - kTop - kBottom;
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-size=\"14\" font-weight=\"bold\">{}</text>\n", kLeft,
      y0 + 22, xml_escape(title));
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
      kLeft, y0 + kTop, pw, ph);
  for (double v = ya.lo; v <= ya.hi + ya.step * 1e-9; v += ya.step) {
    const double y = y0 + kTop + ph - (v - ya.lo) / (ya.hi - ya.lo) * ph;
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        kLeft, y, kLeft + pw, y, kLeft - 4, y + 3, tick_label(v));
  }
  if (x_ticks) {
    for (double v = xa.lo; v <= xa.hi + xa.step * 1e-9; v += xa.step) {
      const double x = kLeft + (v - xa.lo) / (xa.hi - xa.lo) * pw;
      out += fmt::format(
          "<text x=\"{:.2f}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n", x,
          y0 + kTop + ph + 14, tick_label(v));
    }
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
      kLeft + pw / 2, y0 + kPanelHeight - 8, xml_escape(x_label));
  out += fmt::format(
      "<text x=\"14\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 14 {})\">{}</text>\n",
      y0 + kTop + ph / 2, y0 + kTop + ph / 2, xml_escape(y_label));
}

std::string svg_open(const std::string& title, size_t panels) {
  const int height = 30 + static_cast<int>(panels) * kPanelHeight;
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"20\" font-size=\"16\" font-weight=\"bold\">{}</text>\n",
      kPanelWidth, height, kPanelWidth, height, kLeft, xml_escape(title));
}

}  // namespace

std::string series_csv(const RunResult& run) {
  std::string out = metadata(run);
  out += "t_us,metric,entity,value\n";
  for (const SeriesRow& r : run.series) {
    out += fmt::format("{},{},{},{}\n", r.t.us(), r.metric, r.entity, number(r.value));
  }
  return out;
}

std::string qoe_csv(const RunResult& run) {
  std::string out = metadata(run);
  out += "t_us,client,bitrate_kbps,quality,latency_us,switch\n";
  for (const QoeRow& r : run.qoe) {
    out += fmt::format("{},{},{},{},{},{}\n", r.sample.t.us(), r.client, r.sample.bitrate_kbps,
                       number(r.sample.quality), r.sample.latency.us(),
                       r.sample.switched ? 1 : 0);
  }
  return out;
}

std::vector<SummaryRow> summarize(const Sweep& sweep, const std::vector<RunResult>& runs) {
  std::vector<SummaryRow> rows;
  for (const SweepCase& c : sweep.cases) {
    SummaryRow row;
    row.case_name = c.name;
    std::vector<std::optional<double>> bitrate, quality, latency, switches, loss, gap;
    for (const RunResult& r : runs) {
      if (r.case_name != c.name) continue;
      ++row.seed_count;
      if (r.qoe_report) {
        bitrate.push_back(r.qoe_report->avg_bitrate_kbps);
        quality.push_back(r.qoe_report->avg_quality);
        latency.push_back(r.qoe_report->avg_latency_us);
        switches.push_back(r.qoe_report->avg_switch_count);
      }
      if (const FlowResult* f = r.measured_flow(); f != nullptr && !r.config.metrics.measured_flow.empty()) {
        loss.push_back(f->loss);
        if (r.failure_at) {
          gap.push_back(f->recovery_gap ? std::optional<double>(static_cast<double>(f->recovery_gap->us()))
                                        : std::nullopt);
        }
      }
    }
    row.avg_bitrate_kbps = mean_of(bitrate);
    row.avg_quality = mean_of(quality);
    row.avg_latency_us = mean_of(latency);
    row.avg_switch_count = mean_of(switches);
    row.packet_loss = mean_of(loss);
    row.recovery_gap_us = mean_of(gap);
    rows.push_back(row);
  }
  return rows;
}

std::string summary_csv(const Sweep& sweep, const std::vector<SummaryRow>& rows) {
  std::string out = fmt::format("# preset: {}\n# seeds: {}\n", sweep.preset,
                                fmt::join(sweep.seeds, " "));
  out +=
      "case,seed_count,avg_bitrate_kbps,avg_quality,avg_latency_us,avg_switch_count,"
      "packet_loss,recovery_gap_us\n";
  for (const SummaryRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.case_name, r.seed_count,
                       optional_number(r.avg_bitrate_kbps), optional_number(r.avg_quality),
                       optional_number(r.avg_latency_us), optional_number(r.avg_switch_count),
                       optional_number(r.packet_loss), optional_number(r.recovery_gap_us));
  }
  return out;
}

std::string file_stem(const std::string& case_name) {
  std::string out;
  for (char c : case_name) {
    if (c == '/') {
      out += "__";
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
      out += c;
    } else {
      out += '_';
    }
  }
  return out.empty() ? std::string("run") : out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::string> write_run_csvs(const RunResult& run, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + file_stem(run.case_name.empty() ? run.config.name
                                                                      : run.case_name) +
                           ".seed" + std::to_string(run.seed);
  std::vector<std::string> paths{base + ".series.csv"};
  write_text_file(paths.back(), series_csv(run));
  if (run.config.dash) {
    paths.push_back(base + ".qoe.csv");
    write_text_file(paths.back(), qoe_csv(run));
  }
  return paths;
}

std::string svg_line_chart(const std::string& title, const std::vector<LinePanel>& panels) {
  std::string out = svg_open(title, panels.size());
  const int pw = kPanelWidth - kLeft - kRight;
  const int ph = kPanelHeight - kTop - kBottom;
  for (size_t p = 0; p < panels.size(); ++p) {
    const LinePanel& panel = panels[p];
    const int y0 = 30 + static_cast<int>(p) * kPanelHeight;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const ChartSeries& s : panel.series) {
      for (const auto& [x, y] : s.points) {
        if (first) {
          xmin = xmax = x;
          ymin = std::min(0.0, y);
          ymax = y;
          first = false;
        }
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    const Axis xa = make_axis(xmin, xmax);
    const Axis ya = make_axis(ymin, ymax);
    axes(out, y0, xa, ya, panel.title, panel.x_label, panel.y_label, true);
    for (size_t i = 0; i < panel.series.size(); ++i) {
      const ChartSeries& s = panel.series[i];
      const char* color = kPalette[i % std::size(kPalette)];
      std::string pts;
      for (const auto& [x, y] : s.points) {
        pts += fmt::format("{:.2f},{:.2f} ", kLeft + (x - xa.lo) / (xa.hi - xa.lo) * pw,
                           y0 + kTop + ph - (y - ya.lo) / (ya.hi - ya.lo) * ph);
      }
      out += fmt::format(
          "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", color,
          pts);
      const int ly = y0 + kTop + 12 + static_cast<int>(i) * 14;
      out += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n"
          "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
          kLeft + pw + 10, ly - 9, color, kLeft + pw + 24, ly, xml_escape(s.name));
    }
  }
  out += "</svg>\n";
  return out;
}

std::string svg_bar_chart(const std::string& title, const std::vector<BarPanel>& panels) {
  std::string out = svg_open(title, panels.size());
  const int pw = kPanelWidth - kLeft - kRight;
  const int ph = kPanelHeight - kTop - kBottom;
  for (size_t p = 0; p < panels.size(); ++p) {
    const BarPanel& panel = panels[p];
    const int y0 = 30 + static_cast<int>(p) * kPanelHeight;
    double ymax = 0;
    for (const auto& [name, v] : panel.bars) ymax = std::max(ymax, v);
    const Axis ya = make_axis(0, ymax);
    axes(out, y0, Axis{}, ya, panel.title, "", panel.y_label, false);
    const double slot = panel.bars.empty() ? pw : static_cast<double>(pw) / panel.bars.size();
    for (size_t i = 0; i < panel.bars.size(); ++i) {
      const auto& [name, v] = panel.bars[i];
      const double h = (v - ya.lo) / (ya.hi - ya.lo) * ph;
      const double x = kLeft + i * slot + slot * 0.15;
      const char* color = kPalette[i % std::size(kPalette)];
      out += fmt::format(
          "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\">"
          "<title>{}: {}</title></rect>\n",
          x, y0 + kTop + ph - h, slot * 0.7, h, color, xml_escape(name), tick_label(v));
      const int ly = y0 + kTop + 12 + static_cast<int>(i) * 14;
      out += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n"
          "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
          kLeft + pw + 10, ly - 9, color, kLeft + pw + 24, ly, xml_escape(name));
    }
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> sweep_charts(
    const Sweep& sweep, const std::vector<RunResult>& runs, const std::vector<SummaryRow>& rows) {
  std::vector<std::pair<std::string, std::string>> charts;
  const bool has_measured = !sweep.cases.empty() &&
                            !sweep.cases.front().config.metrics.measured_flow.empty();
  const bool has_dash = !sweep.cases.empty() && sweep.cases.front().config.dash.has_value();

  if (has_measured) {
    // Seed-averaged throughput of the measured flow, one series per case.
    std::vector<ChartSeries> series;
    for (const SweepCase& c : sweep.cases) {
      std::map<int64_t, std::pair<double, int>> acc;
      for (const RunResult& r : runs) {
        if (r.case_name != c.name) continue;
        for (const SeriesRow& row : r.series) {
          if (row.metric == "throughput_bps" && row.entity == c.config.metrics.measured_flow) {
            auto& [sum, n] = acc[row.t.us()];
            sum += row.value;
            ++n;
          }
        }
      }
      ChartSeries s{c.name, {}};
      for (const auto& [t, v] : acc) {
        s.points.emplace_back(static_cast<double>(t) / 1e6, v.first / v.second / 1e6);
      }
      series.push_back(std::move(s));
    }
    std::vector<LinePanel> panels;
    if (series.size() <= 4) {
      panels.push_back(LinePanel{"Throughput of the measured flow", "time (s)", "Mb/s", series});
    } else {
      for (ChartSeries& s : series) {
        panels.push_back(LinePanel{s.name, "time (s)", "Mb/s", {s}});
      }
    }
    charts.emplace_back("throughput.svg", svg_line_chart(sweep.preset + ": throughput", panels));
    BarPanel loss{"Packet loss of the measured flow", "loss ratio", {}};
    for (const SummaryRow& r : rows) {
      loss.bars.emplace_back(r.case_name, r.packet_loss.value_or(0));
    }
    charts.emplace_back("packet_loss.svg", svg_bar_chart(sweep.preset + ": packet loss", {loss}));
  }

  if (has_dash) {
    // Four panels per case over time (first seed, one series per client).
    for (const SweepCase& c : sweep.cases) {
      const RunResult* first = nullptr;
      for (const RunResult& r : runs) {
        if (r.case_name == c.name) {
          first = &r;
          break;
        }
      }
      if (first == nullptr) continue;
      std::vector<LinePanel> panels{
          {"Bitrate", "time (s)", "kb/s", {}},
          {"Quality", "time (s)", "quality", {}},
          {"Segment latency", "time (s)", "ms", {}},
          {"Cumulative quality switches", "time (s)", "switches", {}},
      };
      for (const ClientResult& cl : first->clients) {
        ChartSeries b{cl.id, {}}, q{cl.id, {}}, l{cl.id, {}}, s{cl.id, {}};
        int switches = 0;
        for (const QoeSample& sample : cl.samples) {
          const double t = sample.t.seconds();
          b.points.emplace_back(t, sample.bitrate_kbps);
          q.points.emplace_back(t, sample.quality);
          l.points.emplace_back(t, sample.latency.us() / 1000.0);
          switches += sample.switched ? 1 : 0;
          s.points.emplace_back(t, switches);
        }
        panels[0].series.push_back(std::move(b));
        panels[1].series.push_back(std::move(q));
        panels[2].series.push_back(std::move(l));
        panels[3].series.push_back(std::move(s));
      }
      charts.emplace_back("qoe_" + file_stem(c.name) + ".svg",
                          svg_line_chart(sweep.preset + ": " + c.name + " (seed " +
                                             std::to_string(first->seed) + ")",
                                         panels));
    }
    std::vector<BarPanel> bars{{"Average bitrate", "kb/s", {}},
                               {"Average quality", "quality", {}},
                               {"Average segment latency", "ms", {}},
                               {"Average quality switch count", "switches", {}}};
    for (const SummaryRow& r : rows) {
      bars[0].bars.emplace_back(r.case_name, r.avg_bitrate_kbps.value_or(0));
      bars[1].bars.emplace_back(r.case_name, r.avg_quality.value_or(0));
      bars[2].bars.emplace_back(r.case_name, r.avg_latency_us.value_or(0) / 1000.0);
      bars[3].bars.emplace_back(r.case_name, r.avg_switch_count.value_or(0));
    }
    charts.emplace_back("qoe_summary.svg", svg_bar_chart(sweep.preset + ": QoE", bars));
  }
  return charts;
}

void write_sweep_outputs(const Sweep& sweep, const std::vector<RunResult>& runs,
                         const std::string& dir, bool svg) {
  std::filesystem::create_directories(dir + "/runs");
  for (const RunResult& r : runs) write_run_csvs(r, dir + "/runs");
  const std::vector<SummaryRow> rows = summarize(sweep, runs);
  write_text_file(dir + "/summary.csv", summary_csv(sweep, rows));
  write_text_file(dir + "/sweep.json", sweep_to_json(sweep).dump(2) + "\n");
  if (svg) {
    for (const auto& [name, content] : sweep_charts(sweep, runs, rows)) {
      write_text_file(dir + "/" + name, content);
    }
  }
}

}  // namespace sdnft
