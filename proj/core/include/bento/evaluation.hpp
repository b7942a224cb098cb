#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bento/types.hpp"

namespace bento {

enum class Averaging { macro, micro };

const char* to_string(Averaging a);
Averaging averaging_from_string(const std::string& s);

enum class NrmseVariant {
  as_printed,  // denominator: sum of ground-truth scores
  rms,         // denominator: sum of squared ground-truth scores
};

const char* to_string(NrmseVariant v);
NrmseVariant nrmse_variant_from_string(const std::string& s);

/// Per-model, per-task metric values (e.g., accuracy). Rows = models,
/// columns = tasks.
struct PerformanceTable {
  std::vector<std::string> models;
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
  std::optional<std::vector<std::int64_t>> per_task_example_counts;
};

PerformanceTable performance_from_csv(const std::string& csv);
std::string performance_to_csv(const PerformanceTable& table);

/// Per-model mean over the subset tasks; micro weights by example counts.
Eigen::VectorXd predict_performance(const PerformanceTable& table,
                                    const std::vector<TaskId>& subset,
                                    Averaging averaging = Averaging::macro);

/// Relative L2 error of predicted vs ground-truth model scores.
double nrmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth,
             NrmseVariant variant = NrmseVariant::as_printed);

struct BootstrapResult {
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t resamples = 0;
  std::size_t redrawn = 0;  // degenerate resamples that were redrawn
};

/// Resamples models with replacement, recomputing NRMSE per resample.
BootstrapResult bootstrap_nrmse(const PerformanceTable& table, const std::vector<TaskId>& subset,
                                std::size_t resamples = 1000, std::uint64_t seed = 0,
                                Averaging averaging = Averaging::macro,
                                NrmseVariant variant = NrmseVariant::as_printed);

/// Test hook: replaces resampling with exhaustive enumeration of all T^T
/// equally likely model draws. Practical only for tiny T.
BootstrapResult bootstrap_nrmse_exhaustive(const PerformanceTable& table,
                                           const std::vector<TaskId>& subset,
                                           Averaging averaging = Averaging::macro,
                                           NrmseVariant variant = NrmseVariant::as_printed);

/// Per task, keeps ceil(fraction * n) examples drawn uniformly without
/// replacement; reproducible from the seed.
std::vector<std::vector<std::size_t>> subsample_examples(
    const std::vector<std::size_t>& per_task_example_counts, double fraction,
    std::uint64_t seed);

struct EvalReport {
  std::vector<TaskId> subset;
  std::vector<std::string> models;
  Eigen::VectorXd predicted;
  Eigen::VectorXd full;
  double nrmse_value = 0.0;
  double bootstrap_mean = 0.0;
  double bootstrap_std = 0.0;
  Averaging averaging = Averaging::macro;
};

EvalReport evaluate_subset(const PerformanceTable& table, const std::vector<TaskId>& subset,
                           Averaging averaging = Averaging::macro,
                           NrmseVariant variant = NrmseVariant::as_printed,
                           std::size_t bootstrap_resamples = 1000, std::uint64_t seed = 0);

/// Runs the selector for k = 1..k_max, reporting NRMSE per k; pair with
/// best_report_index for the best-over-k summary.
std::vector<EvalReport> sweep_k(const PerformanceTable& table,
                                const std::function<std::vector<TaskId>(int)>& selector,
                                int k_max, Averaging averaging = Averaging::macro,
                                NrmseVariant variant = NrmseVariant::as_printed,
                                std::size_t bootstrap_resamples = 1000, std::uint64_t seed = 0);

std::size_t best_report_index(const std::vector<EvalReport>& reports);

/// Mean NRMSE of `trials` uniform random k-subsets (the random baseline).
double random_baseline_nrmse(const PerformanceTable& table, int k, std::size_t trials,
                             std::uint64_t seed, Averaging averaging = Averaging::macro,
                             NrmseVariant variant = NrmseVariant::as_printed);

std::string report_to_json(const EvalReport& r, const std::string& config_digest);

}  // namespace bento
