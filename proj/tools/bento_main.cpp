#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bento/config.hpp"
#include "bento/csv.hpp"
#include "bento/pipeline.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = ".";
};

bento::PipelineConfig load(const GlobalArgs& args) {
  bento::PipelineConfig cfg =
      args.config_path.empty() ? bento::PipelineConfig{} : bento::load_config(args.config_path);
  if (args.seed_override) cfg.seed = *args.seed_override;
  return cfg;
}

std::string out_path(const GlobalArgs& args, const std::string& name) {
  return args.out_dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark task reduction via in-context transferability"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--config", global.config_path, "Pipeline configuration JSON file");
  app.add_option("--seed", global.seed_override, "Override the config's root seed");
  app.add_option("--out-dir", global.out_dir, "Directory for output artifacts");

  // collect
  auto* collect = app.add_subcommand("collect", "Run transfer-ICL over the task grid");
  bool rank_only = false;
  collect->add_flag("--rank-tasks", rank_only,
                    "Only ask the endpoint for a task ranking (writes ranking.json)");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "Aggregate records into the ICT matrix");
  std::string records_path;
  matrix->add_option("--records", records_path, "records.jsonl from collect")->required();

  // select
  auto* select = app.add_subcommand("select", "Select the representative task subset");
  std::string matrix_path;
  select->add_option("--matrix", matrix_path, "ICT matrix CSV (unused for bm25 methods)");
  std::string method_override;
  select->add_option("--method", method_override, "Override config method");
  int k_override = 0;
  select->add_option("-k,--k", k_override, "Override config k");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a selection against a performance table");
  std::string performance_path, selection_path;
  evaluate->add_option("--performance", performance_path, "Per-model per-task CSV")->required();
  evaluate->add_option("--selection", selection_path, "selection.json from select")->required();

  // chord
  auto* chord = app.add_subcommand("chord", "Export the top-ICT arc graph with clusters");
  std::string chord_matrix_path;
  chord->add_option("--matrix", chord_matrix_path, "ICT matrix CSV")->required();
  int k_clusters_override = 0;
  chord->add_option("--clusters", k_clusters_override, "Number of spectral clusters (required)");
  double top_fraction_override = 0.0;
  chord->add_option("--top-fraction", top_fraction_override, "Fraction of arcs to keep");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Per-k NRMSE grid over selection methods");
  std::string sweep_matrix_path, sweep_performance_path;
  sweep->add_option("--matrix", sweep_matrix_path, "ICT matrix CSV");
  sweep->add_option("--performance", sweep_performance_path, "Per-model per-task CSV")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    bento::PipelineConfig cfg = load(global);

    if (collect->parsed()) {
      if (rank_only) {
        const auto ranking = bento::cmd_rank(cfg, out_path(global, "ranking.json"));
        std::cout << "ranked " << ranking.size() << " tasks -> "
                  << out_path(global, "ranking.json") << "\n";
        return 0;
      }
      const auto summary = bento::cmd_collect(cfg, global.out_dir);
      std::cout << "cells: " << summary.cells_completed << " new, " << summary.cells_resumed
                << " resumed, " << summary.failed_cells.size() << " failed; requests: "
                << summary.requests << ", cache hits: " << summary.cache_hits << "\n";
      for (const auto& w : summary.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& f : summary.failed_cells) std::cerr << "missing: " << f << "\n";
      return summary.failed_cells.empty() ? 0 : 2;
    }

    if (matrix->parsed()) {
      const auto m = bento::cmd_matrix(cfg, records_path, out_path(global, "matrix.csv"));
      std::cout << "wrote " << m.size() << "x" << m.size() << " "
                << bento::to_string(m.normalization) << " matrix -> "
                << out_path(global, "matrix.csv") << "\n";
      return 0;
    }

    if (select->parsed()) {
      if (!method_override.empty()) cfg.method = method_override;
      if (k_override > 0) cfg.k = k_override;
      const auto result =
          bento::cmd_select(cfg, matrix_path, out_path(global, "selection.json"));
      std::cout << bento::to_string(result.method) << " k=" << result.k << ":";
      for (const auto& t : result.selected) std::cout << " " << t;
      if (!result.objective_trace.empty()) {
        std::cout << " (f = " << bento::format_double(result.objective_trace.back()) << ")";
      }
      std::cout << "\n";
      return 0;
    }

    if (evaluate->parsed()) {
      const auto report = bento::cmd_evaluate(cfg, performance_path, selection_path,
                                              out_path(global, "report.json"));
      for (std::size_t i = 0; i < report.models.size(); ++i) {
        std::cout << report.models[i] << ": predicted "
                  << report.predicted(static_cast<Eigen::Index>(i)) << ", full "
                  << report.full(static_cast<Eigen::Index>(i)) << "\n";
      }
      std::cout << "NRMSE " << report.nrmse_value << " (bootstrap " << report.bootstrap_mean
                << " +/- " << report.bootstrap_std << ")\n";
      return 0;
    }

    if (chord->parsed()) {
      if (k_clusters_override > 0) cfg.k_clusters = k_clusters_override;
      if (top_fraction_override > 0.0) cfg.top_fraction = top_fraction_override;
      const auto graph =
          bento::cmd_chord(cfg, chord_matrix_path, out_path(global, "chord"));
      std::cout << graph.tasks.size() << " nodes, " << graph.arcs.size() << " arcs -> "
                << out_path(global, "chord.{json,dot}") << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      const auto result = bento::cmd_sweep(cfg, sweep_matrix_path, sweep_performance_path,
                                           out_path(global, "sweep.json"));
      std::cout << bento::render_sweep_table(result);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
