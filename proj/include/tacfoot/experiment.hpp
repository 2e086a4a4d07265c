#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tacfoot/controller.hpp"

namespace tacfoot {

// A full experiment description: one RunContext plus seeds and output
// location. Loadable from a JSON file whose sections mirror the parameter
// structs; absent sections fall back to terrain-specific defaults.
struct ExperimentConfig {
  RunContext ctx;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  std::string terrain_kind = "beam";  // beam | table
};

ExperimentConfig beam_defaults();
ExperimentConfig table_defaults();

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config_file(const std::string& path);

// JSON-lines serialization of one run: header record, init record, one
// record per step, end record.
std::vector<std::string> log_to_jsonl(const TrajectoryLog& log, std::uint64_t seed,
                                      const ExperimentConfig& cfg);

struct RunMetrics {
  std::uint64_t seed = 0;
  bool completed = false;
  std::string end_reason;
  int footholds = 0;
  double mean_abs_displacement_mm = 0.0;
  double max_abs_displacement_mm = 0.0;
  std::int64_t total_taps = 0;
  int arcs_collected = 0;
  bool search_used = false;
  double coverage_deg = 0.0;  // table runs: rim angle swept by the footholds
  std::vector<double> signed_edge_mm;  // per foothold, chronological
};

struct MetricsReport {
  std::vector<RunMetrics> runs;
  double success_rate = 0.0;
  double mean_abs_displacement_mm = 0.0;  // over completed runs
  double max_abs_displacement_mm = 0.0;   // over completed runs
  double median_total_taps = 0.0;         // over completed runs
  double median_arcs_collected = 0.0;     // over completed runs
};

nlohmann::json metrics_to_json(const MetricsReport& report);

// Executes one controller run per seed, writes per-seed JSONL logs, foothold
// and dissimilarity CSVs, and the aggregate metrics report.
MetricsReport run_experiment(const ExperimentConfig& cfg);

// Derives metrics from serialized logs alone. Throws ParseError with the
// offending line number.
MetricsReport compute_metrics(const std::vector<std::string>& log_paths);

enum class PlotKind { trajectory, dissimilarity, displacement_bar };

// One CSV per input log; returns the written paths.
std::vector<std::string> emit_plot_data(const std::vector<std::string>& log_paths, PlotKind kind,
                                        const std::string& out_dir);

}  // namespace tacfoot
