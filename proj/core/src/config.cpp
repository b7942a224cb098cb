#include "bento/config.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bento/csv.hpp"
#include "bento/digest.hpp"

namespace bento {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* name, T& into) {
  const auto it = j.find(name);
  if (it != j.end()) into = it->get<T>();
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be a JSON object");
  }

  PipelineConfig cfg;
  read_field(j, "style", cfg.style);
  read_field(j, "tasks_index", cfg.tasks_index);
  read_field(j, "data_dir", cfg.data_dir);
  read_field(j, "base_url", cfg.base_url);
  read_field(j, "model", cfg.model);
  read_field(j, "api_key_env", cfg.api_key_env);
  read_field(j, "timeout_s", cfg.timeout_s);
  read_field(j, "max_retries", cfg.max_retries);
  read_field(j, "retry_base_ms", cfg.retry_base_ms);
  read_field(j, "in_flight", cfg.in_flight);
  read_field(j, "cache_dir", cfg.cache_dir);
  read_field(j, "exemplars_per_prompt", cfg.exemplars_per_prompt);
  read_field(j, "seeds_per_pair", cfg.seeds_per_pair);
  read_field(j, "questions_per_seed", cfg.questions_per_seed);
  read_field(j, "scoring", cfg.scoring);
  read_field(j, "normalization", cfg.normalization);
  read_field(j, "negate_scores", cfg.negate_scores);
  read_field(j, "permissive_pairs", cfg.permissive_pairs);
  read_field(j, "flat_mean", cfg.flat_mean);
  read_field(j, "metric", cfg.metric);
  read_field(j, "kernel_t", cfg.kernel_t);
  if (j.contains("kernel_c") && !j["kernel_c"].is_null()) {
    cfg.kernel_c = j["kernel_c"].get<double>();
  }
  read_field(j, "standardize_distances", cfg.standardize_distances);
  if (j.contains("le_dim")) {
    if (j["le_dim"].is_number_integer()) {
      cfg.le_dim = std::to_string(j["le_dim"].get<int>());
    } else {
      cfg.le_dim = j["le_dim"].get<std::string>();
    }
  }
  read_field(j, "normalize_rows", cfg.normalize_rows);
  read_field(j, "method", cfg.method);
  read_field(j, "k", cfg.k);
  read_field(j, "ranking_file", cfg.ranking_file);
  read_field(j, "bm25_center", cfg.bm25_center);
  read_field(j, "bm25_symmetrize", cfg.bm25_symmetrize);
  read_field(j, "bm25_k1", cfg.bm25_k1);
  read_field(j, "bm25_b", cfg.bm25_b);
  read_field(j, "top_fraction", cfg.top_fraction);
  read_field(j, "k_clusters", cfg.k_clusters);
  read_field(j, "averaging", cfg.averaging);
  read_field(j, "nrmse_variant", cfg.nrmse_variant);
  read_field(j, "counts_file", cfg.counts_file);
  read_field(j, "bootstrap_resamples", cfg.bootstrap_resamples);
  read_field(j, "random_trials", cfg.random_trials);
  read_field(j, "sweep_methods", cfg.sweep_methods);
  read_field(j, "sweep_k_max", cfg.sweep_k_max);
  read_field(j, "seed", cfg.seed);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  return config_from_json(read_file(path));
}

std::string config_to_json(const PipelineConfig& cfg) {
  json j;
  j["style"] = cfg.style;
  j["tasks_index"] = cfg.tasks_index;
  j["data_dir"] = cfg.data_dir;
  j["base_url"] = cfg.base_url;
  j["model"] = cfg.model;
  j["api_key_env"] = cfg.api_key_env;
  j["timeout_s"] = cfg.timeout_s;
  j["max_retries"] = cfg.max_retries;
  j["retry_base_ms"] = cfg.retry_base_ms;
  j["in_flight"] = cfg.in_flight;
  j["cache_dir"] = cfg.cache_dir;
  j["exemplars_per_prompt"] = cfg.exemplars_per_prompt;
  j["seeds_per_pair"] = cfg.seeds_per_pair;
  j["questions_per_seed"] = cfg.questions_per_seed;
  j["scoring"] = cfg.scoring;
  j["normalization"] = cfg.normalization;
  j["negate_scores"] = cfg.negate_scores;
  j["permissive_pairs"] = cfg.permissive_pairs;
  j["flat_mean"] = cfg.flat_mean;
  j["metric"] = cfg.metric;
  j["kernel_t"] = cfg.kernel_t;
  j["kernel_c"] = cfg.kernel_c ? json(*cfg.kernel_c) : json(nullptr);
  j["standardize_distances"] = cfg.standardize_distances;
  j["le_dim"] = cfg.le_dim;
  j["normalize_rows"] = cfg.normalize_rows;
  j["method"] = cfg.method;
  j["k"] = cfg.k;
  j["ranking_file"] = cfg.ranking_file;
  j["bm25_center"] = cfg.bm25_center;
  j["bm25_symmetrize"] = cfg.bm25_symmetrize;
  j["bm25_k1"] = cfg.bm25_k1;
  j["bm25_b"] = cfg.bm25_b;
  j["top_fraction"] = cfg.top_fraction;
  j["k_clusters"] = cfg.k_clusters;
  j["averaging"] = cfg.averaging;
  j["nrmse_variant"] = cfg.nrmse_variant;
  j["counts_file"] = cfg.counts_file;
  j["bootstrap_resamples"] = cfg.bootstrap_resamples;
  j["random_trials"] = cfg.random_trials;
  j["sweep_methods"] = cfg.sweep_methods;
  j["sweep_k_max"] = cfg.sweep_k_max;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

std::string config_digest(const PipelineConfig& cfg) {
  return short_digest(config_to_json(cfg));
}

int default_sweep_k_max(std::size_t task_count) {
  const int k = static_cast<int>(std::lround(0.18 * static_cast<double>(task_count)));
  return std::max(1, std::min<int>(k, static_cast<int>(task_count)));
}

}  // namespace bento
