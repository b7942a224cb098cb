#pragma once

#include <string>
#include <vector>

#include "bento/collector.hpp"
#include "bento/config.hpp"
#include "bento/embedding.hpp"
#include "bento/evaluation.hpp"
#include "bento/ict_matrix.hpp"
#include "bento/selection.hpp"
#include "bento/types.hpp"

namespace bento {

// Pipeline stages behind the CLI subcommands. Each stage reads and writes
// one artifact, so the expensive collection step never reruns for
// downstream experiments.

struct CollectSummary {
  std::size_t cells_expected = 0;
  std::size_t cells_completed = 0;
  std::size_t cells_resumed = 0;   // found in the manifest and skipped
  std::size_t requests = 0;
  std::size_t cache_hits = 0;
  std::vector<std::string> failed_cells;
  std::vector<std::string> warnings;
};

/// Runs the collector over the full task grid. Resumable: completed
/// (source, target, seed) cells are tracked in a manifest and skipped on
/// rerun. Writes records.jsonl, manifest.jsonl, and completeness.json under
/// out_dir.
CollectSummary cmd_collect(const PipelineConfig& cfg, const std::string& out_dir);

/// Prompt-based ranking over task names; writes {"ranking", "warnings"}.
std::vector<TaskId> cmd_rank(const PipelineConfig& cfg, const std::string& out_path);

/// Aggregates records into the ICT matrix, applies the configured
/// normalization, and writes the CSV plus a metadata sidecar.
IctMatrix cmd_matrix(const PipelineConfig& cfg, const std::string& records_path,
                     const std::string& out_path);

/// Full selection route for the configured method on an in-memory matrix.
SelectionResult select_from_matrix(const PipelineConfig& cfg, const IctMatrix& matrix, int k);

/// Kernel -> (optional LE) -> selector; writes the selection artifact.
/// BM25 methods build their matrix from task corpora and ignore matrix_path.
SelectionResult cmd_select(const PipelineConfig& cfg, const std::string& matrix_path,
                           const std::string& out_path);

/// Predicted-vs-full fidelity of a selection against a performance table.
EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& performance_path,
                        const std::string& selection_path, const std::string& out_path);

/// Spectral clustering + top-fraction arc export. Writes <out_prefix>.json
/// and <out_prefix>.dot.
ChordGraph cmd_chord(const PipelineConfig& cfg, const std::string& matrix_path,
                     const std::string& out_prefix);

struct SweepRow {
  std::string method;
  std::vector<double> nrmse_per_k;  // index 0 is k = 1
  double best = 0.0;
};

struct SweepResult {
  int k_max = 0;
  std::vector<SweepRow> rows;
};

/// Per-k NRMSE grid over the configured methods, including the mean-of-
/// random-trials baseline.
SweepResult cmd_sweep(const PipelineConfig& cfg, const std::string& matrix_path,
                      const std::string& performance_path, const std::string& out_path);

std::string render_sweep_table(const SweepResult& sweep);

/// Loads a performance table plus the optional example-count sidecar.
PerformanceTable load_performance(const PipelineConfig& cfg, const std::string& path);

}  // namespace bento
