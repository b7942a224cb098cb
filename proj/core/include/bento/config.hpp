#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bento {

/// Single configuration for all pipeline stages. Defaults follow the
/// published hyperparameters (L = 5, M = 10, t = 1.5, 1000 bootstrap
/// resamples and random trials); every artifact embeds this config's digest.
struct PipelineConfig {
  // Task data
  std::string style = "mmlu";  // prompt style: mmlu | flan
  std::string tasks_index;     // JSON array of {id, instruction}
  std::string data_dir;        // <id>.jsonl pools, optional <id>.train.jsonl

  // Endpoint
  std::string base_url;
  std::string model;
  std::string api_key_env = "BENTO_API_KEY";  // empty string = no key needed
  int timeout_s = 120;
  int max_retries = 5;
  int retry_base_ms = 100;
  int in_flight = 1;
  std::string cache_dir;  // defaults to <out_dir>/cache

  // Collection
  int exemplars_per_prompt = 5;  // L
  int seeds_per_pair = 10;       // M
  int questions_per_seed = 0;    // Q; 0 = whole test set
  std::string scoring = "exact_match";  // exact_match | exact_match_strict | perplexity

  // Matrix
  std::string normalization = "centered";  // raw | centered | zscored
  bool negate_scores = false;
  bool permissive_pairs = false;
  bool flat_mean = false;

  // Similarity kernel
  std::string metric = "euclidean";  // euclidean | chebyshev
  double kernel_t = 1.5;
  std::optional<double> kernel_c;  // absolute override of c = t * max(E)
  bool standardize_distances = false;

  // LE embedding / clustering
  std::string le_dim = "eigengap";  // "eigengap" or a positive integer
  bool normalize_rows = false;

  // Selection
  std::string method = "bento-sim";
  int k = 3;
  std::string ranking_file;  // for method = prompt-ranked
  bool bm25_center = true;
  bool bm25_symmetrize = false;
  double bm25_k1 = 1.2;
  double bm25_b = 0.75;

  // Chord export
  double top_fraction = 0.07;
  int k_clusters = 0;  // required by the chord stage; no silent default

  // Evaluation
  std::string averaging = "macro";          // macro | micro
  std::string nrmse_variant = "as_printed"; // as_printed | rms
  std::string counts_file;                  // per-task example counts (micro)
  std::size_t bootstrap_resamples = 1000;
  std::size_t random_trials = 1000;
  std::vector<std::string> sweep_methods = {"bento-sim", "bento-le", "random"};
  int sweep_k_max = 0;  // 0 = roughly 18% of the task count

  // Root seed; stages derive labeled substreams from it.
  std::uint64_t seed = 0;
};

PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Canonical JSON dump of every field; the digest stamped into artifacts.
std::string config_to_json(const PipelineConfig& cfg);
std::string config_digest(const PipelineConfig& cfg);

/// Default sweep depth: roughly 18% of N (10 of 57, 12 of 66).
int default_sweep_k_max(std::size_t task_count);

}  // namespace bento
