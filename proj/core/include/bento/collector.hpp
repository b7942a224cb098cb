#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bento/endpoint.hpp"
#include "bento/prompts.hpp"
#include "bento/types.hpp"

namespace bento {

/// One task's data: prompt instruction plus the (input, output) pool.
/// `train`, when non-empty, is a dedicated exemplar pool (the few-shot
/// training split); otherwise exemplars come from `pool`.
struct TaskData {
  TaskId id;
  std::string instruction;
  std::vector<Exemplar> pool;
  std::vector<Exemplar> train;

  const std::vector<Exemplar>& exemplar_pool() const { return train.empty() ? pool : train; }
};

/// Loads a task suite: `index_path` is a JSON array of {id, instruction};
/// each task's pool lives at `<data_dir>/<id>.jsonl` (one {"input","output"}
/// object per line), with an optional `<id>.train.jsonl` exemplar split.
std::vector<TaskData> load_task_suite(const std::string& index_path, const std::string& data_dir);

struct ExemplarSet {
  TaskId source;
  std::uint32_t seed = 0;
  std::vector<Exemplar> exemplars;
};

/// Uniform draw of L exemplars without replacement, in draw order; a pure
/// function of (pool, L, seed). If the pool is smaller than L the whole pool
/// is used (shuffled) and a warning is recorded.
ExemplarSet sample_exemplars(const TaskData& source, int num_exemplars, std::uint32_t seed,
                             std::vector<std::string>* warnings = nullptr);

/// Indices of up to `cap` pool questions for one seed; cap <= 0 means the
/// whole pool in file order.
std::vector<std::size_t> sample_questions(const TaskData& target, int cap, std::uint32_t seed);

enum class ScoringMode { exact_match, exact_match_strict, perplexity };

const char* to_string(ScoringMode m);
ScoringMode scoring_mode_from_string(const std::string& s);

struct CollectorOptions {
  PromptStyle style = PromptStyle::mmlu;
  ScoringMode scoring = ScoringMode::exact_match;
  int exemplars_per_prompt = 5;  // L
  int seeds_per_pair = 10;       // M
  int questions_per_seed = 0;    // Q; <= 0 evaluates the whole test set
  int max_tokens_choice = 16;
  int max_tokens_freeform = 256;
  int in_flight = 1;
};

struct CellResult {
  std::vector<TransferRecord> records;
  std::size_t requests = 0;    // completions actually sent to the endpoint
  std::size_t cache_hits = 0;
  std::vector<std::string> warnings;
};

/// Runs all target questions of one (source, target, seed) cell: builds the
/// transfer-ICL prompt once per question, scores the completion, and emits
/// one record per question. The cache is consulted before every request.
CellResult run_transfer_cell(const TaskData& source, const TaskData& target, std::uint32_t seed,
                             const CollectorOptions& opts, CompletionClient& client,
                             const CompletionCache* cache);

/// All M seeds of one (source, target) pair.
CellResult run_transfer_eval(const TaskData& source, const TaskData& target,
                             const CollectorOptions& opts, CompletionClient& client,
                             const CompletionCache* cache);

/// Prompt-based ranking baseline: asks the endpoint to rank all task names.
std::vector<TaskId> rank_tasks_by_prompt(const std::vector<TaskId>& tasks,
                                         CompletionClient& client,
                                         std::vector<std::string>* warnings = nullptr);

}  // namespace bento
