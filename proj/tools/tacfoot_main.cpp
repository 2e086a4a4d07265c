#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tacfoot/errors.hpp"
#include "tacfoot/experiment.hpp"

using namespace tacfoot;

namespace {

ExperimentConfig build_config(const std::string& config_path, const std::string& terrain,
                              const std::vector<std::uint64_t>& seeds, bool disable_sensing,
                              bool use_image_pipeline, const std::string& out_dir) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = load_config_file(config_path);
    if (!terrain.empty() && terrain != cfg.terrain_kind)
      throw ConfigError("terrain", "--terrain " + terrain + " conflicts with config file (" +
                                       cfg.terrain_kind + "); edit the file instead");
  } else {
    cfg = (terrain == "table") ? table_defaults() : beam_defaults();
  }
  if (!seeds.empty()) cfg.seeds = seeds;
  if (disable_sensing) cfg.ctx.ctrl.disable_sensing = true;
  if (use_image_pipeline) cfg.ctx.ctrl.use_image_pipeline = true;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

void print_report(const MetricsReport& report) {
  std::printf("%-8s %-10s %-9s %-12s %-12s %-6s %-5s %-7s %s\n", "seed", "result", "footholds",
              "mean_disp", "max_disp", "taps", "arcs", "search", "coverage");
  for (const RunMetrics& r : report.runs) {
    std::printf("%-8llu %-10s %-9d %-12.2f %-12.2f %-6lld %-5d %-7s %.1f\n",
                static_cast<unsigned long long>(r.seed), r.end_reason.c_str(), r.footholds,
                r.mean_abs_displacement_mm, r.max_abs_displacement_mm,
                static_cast<long long>(r.total_taps), r.arcs_collected,
                r.search_used ? "yes" : "no", r.coverage_deg);
  }
  std::printf("success rate %.0f%%, mean |disp| %.2f mm, max %.2f mm, "
              "median taps %.0f, median arcs %.0f\n",
              100.0 * report.success_rate, report.mean_abs_displacement_mm,
              report.max_abs_displacement_mm, report.median_total_taps,
              report.median_arcs_collected);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tacfoot: tactile-foot edge following simulator"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run an experiment and write logs/metrics");
  std::string config_path, terrain, out_dir;
  std::vector<std::uint64_t> seeds;
  bool disable_sensing = false, use_image_pipeline = false;
  run_cmd->add_option("--config", config_path, "experiment config JSON");
  run_cmd->add_option("--seed", seeds, "seed (repeatable; overrides config seeds)");
  run_cmd->add_option("--terrain", terrain, "beam|table (default beam)")
      ->check(CLI::IsMember({"beam", "table"}));
  run_cmd->add_flag("--disable-sensing", disable_sensing, "walk straight without the sensor");
  run_cmd->add_flag("--use-image-pipeline", use_image_pipeline,
                    "route taps through render/detect/match");
  run_cmd->add_option("--out", out_dir, "output directory");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "recompute metrics from JSONL logs");
  std::vector<std::string> metric_logs;
  metrics_cmd->add_option("logs", metric_logs, "log files")->required();

  // plotdata
  auto* plot_cmd = app.add_subcommand("plotdata", "emit plot-ready CSV from JSONL logs");
  std::vector<std::string> plot_logs;
  std::string kind = "trajectory", plot_out = ".";
  plot_cmd->add_option("--kind", kind, "trajectory|dissimilarity|displacement-bar")
      ->check(CLI::IsMember({"trajectory", "dissimilarity", "displacement-bar"}));
  plot_cmd->add_option("--out", plot_out, "output directory");
  plot_cmd->add_option("logs", plot_logs, "log files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ExperimentConfig cfg = build_config(config_path, terrain, seeds, disable_sensing,
                                                use_image_pipeline, out_dir);
      const MetricsReport report = run_experiment(cfg);
      print_report(report);
      std::printf("logs written to %s\n", cfg.out_dir.c_str());
      const bool any_ok =
          std::any_of(report.runs.begin(), report.runs.end(), [](const RunMetrics& r) {
            return r.completed;
          });
      return any_ok ? 0 : 3;
    }
    if (metrics_cmd->parsed()) {
      const MetricsReport report = compute_metrics(metric_logs);
      std::printf("%s\n", metrics_to_json(report).dump(2).c_str());
      print_report(report);
      return 0;
    }
    if (plot_cmd->parsed()) {
      PlotKind pk = PlotKind::trajectory;
      if (kind == "dissimilarity") pk = PlotKind::dissimilarity;
      if (kind == "displacement-bar") pk = PlotKind::displacement_bar;
      for (const std::string& path : emit_plot_data(plot_logs, pk, plot_out))
        std::printf("%s\n", path.c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
