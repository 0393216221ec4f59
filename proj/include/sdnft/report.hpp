// Result emission: per-run CSVs, per-sweep summary CSV and SVG charts.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdnft/presets.hpp"
#include "sdnft/runner.hpp"

namespace sdnft {

// Lines starting with '#' carry run metadata, including the fully resolved
// scenario as a single-line JSON document.
std::string series_csv(const RunResult& run);
std::string qoe_csv(const RunResult& run);

struct SummaryRow {
  std::string case_name;
  size_t seed_count = 0;
  // Absent when the quantity does not apply to the case (no DASH clients, no
  // measured flow) or, for the recovery gap, when some seed never recovered.
  std::optional<double> avg_bitrate_kbps;
  std::optional<double> avg_quality;
  std::optional<double> avg_latency_us;
  std::optional<double> avg_switch_count;
  std::optional<double> packet_loss;
  std::optional<double> recovery_gap_us;
};

// Arithmetic means over the seeds of each case, in case order.
std::vector<SummaryRow> summarize(const Sweep& sweep, const std::vector<RunResult>& runs);
std::string summary_csv(const Sweep& sweep, const std::vector<SummaryRow>& rows);

// File-system safe rendition of a case name ("a/b" -> "a__b").
std::string file_stem(const std::string& case_name);

// Writes <dir>/<case>.seed<N>.series.csv and .qoe.csv; returns the paths.
// Throws std::runtime_error when a file cannot be written.
std::vector<std::string> write_run_csvs(const RunResult& run, const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);

// SVG charts.
struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct LinePanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
};

struct BarPanel {
  std::string title;
  std::string y_label;
  std::vector<std::pair<std::string, double>> bars;
};

std::string svg_line_chart(const std::string& title, const std::vector<LinePanel>& panels);
std::string svg_bar_chart(const std::string& title, const std::vector<BarPanel>& panels);

// Preset-specific figure layouts; returns (file name, svg) pairs.
std::vector<std::pair<std::string, std::string>> sweep_charts(
    const Sweep& sweep, const std::vector<RunResult>& runs, const std::vector<SummaryRow>& rows);

// Writes run CSVs, summary.csv, sweep.json and (optionally) charts into dir.
void write_sweep_outputs(const Sweep& sweep, const std::vector<RunResult>& runs,
                         const std::string& dir, bool svg);

}  // namespace sdnft
