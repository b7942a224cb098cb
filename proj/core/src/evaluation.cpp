#include "bento/evaluation.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bento/csv.hpp"
#include "bento/rng.hpp"

namespace bento {

using nlohmann::json;

const char* to_string(Averaging a) { return a == Averaging::macro ? "macro" : "micro"; }

Averaging averaging_from_string(const std::string& s) {
  if (s == "macro") return Averaging::macro;
  if (s == "micro") return Averaging::micro;
  throw std::invalid_argument("unknown averaging mode: " + s);
}

const char* to_string(NrmseVariant v) {
  return v == NrmseVariant::as_printed ? "as_printed" : "rms";
}

NrmseVariant nrmse_variant_from_string(const std::string& s) {
  if (s == "as_printed") return NrmseVariant::as_printed;
  if (s == "rms") return NrmseVariant::rms;
  throw std::invalid_argument("unknown nrmse variant: " + s);
}

PerformanceTable performance_from_csv(const std::string& csv) {
  LabeledTable t = table_from_csv(csv);
  if (t.row_labels.empty()) {
    throw std::invalid_argument("performance table: need at least one model row");
  }
  if (!t.values.allFinite()) {
    throw std::invalid_argument("performance table: non-finite values");
  }
  PerformanceTable out;
  out.models = std::move(t.row_labels);
  out.tasks = std::move(t.col_labels);
  out.values = std::move(t.values);
  return out;
}

std::string performance_to_csv(const PerformanceTable& table) {
  return table_to_csv(table.models, table.tasks, table.values);
}

Eigen::VectorXd predict_performance(const PerformanceTable& table,
                                    const std::vector<TaskId>& subset, Averaging averaging) {
  if (subset.empty()) {
    throw std::invalid_argument("predict_performance: empty subset");
  }
  const TaskIndex index(table.tasks);
  if (averaging == Averaging::micro && !table.per_task_example_counts) {
    throw std::invalid_argument("predict_performance: micro averaging needs per-task example counts");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(table.values.rows());
  double weight_sum = 0.0;
  for (const auto& id : subset) {
    const auto j = static_cast<Eigen::Index>(index.at(id));
    double w = 1.0;
    if (averaging == Averaging::micro) {
      w = static_cast<double>((*table.per_task_example_counts)[static_cast<std::size_t>(j)]);
      if (w <= 0.0) {
        throw std::invalid_argument("predict_performance: non-positive example count for " + id);
      }
    }
    out += w * table.values.col(j);
    weight_sum += w;
  }
  return out / weight_sum;
}

double nrmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth,
             NrmseVariant variant) {
  if (predicted.size() != truth.size() || truth.size() == 0) {
    throw std::invalid_argument("nrmse: vectors must be non-empty and equal-length");
  }
  const double denom =
      variant == NrmseVariant::as_printed ? truth.sum() : truth.squaredNorm();
  if (denom <= 0.0) {
    throw std::invalid_argument("nrmse: non-positive denominator");
  }
  return std::sqrt((predicted - truth).squaredNorm() / denom);
}

namespace {

struct BootstrapAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }

  BootstrapResult finish() const {
    BootstrapResult r;
    r.resamples = count;
    r.mean = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - r.mean * r.mean;
    r.std_dev = std::sqrt(std::max(0.0, var));
    return r;
  }
};

}  // namespace

BootstrapResult bootstrap_nrmse(const PerformanceTable& table, const std::vector<TaskId>& subset,
                                std::size_t resamples, std::uint64_t seed, Averaging averaging,
                                NrmseVariant variant) {
  if (resamples < 1) {
    throw std::invalid_argument("bootstrap_nrmse: resamples must be >= 1");
  }
  const Eigen::VectorXd predicted = predict_performance(table, subset, averaging);
  const Eigen::VectorXd full = predict_performance(table, table.tasks, averaging);
  const auto t = static_cast<std::size_t>(table.values.rows());

  BootstrapAccumulator acc;
  std::size_t redrawn = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    // Independent substream per resample, so results do not depend on any
    // execution schedule.
    Rng rng = derive_rng(seed, "bootstrap", r);
    Eigen::VectorXd p(t), q(t);
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      for (std::size_t m = 0; m < t; ++m) {
        const auto pick = static_cast<Eigen::Index>(rng.below(t));
        p(static_cast<Eigen::Index>(m)) = predicted(pick);
        q(static_cast<Eigen::Index>(m)) = full(pick);
      }
      const double denom = variant == NrmseVariant::as_printed ? q.sum() : q.squaredNorm();
      if (denom > 0.0) {
        ok = true;
      } else {
        ++redrawn;
      }
    }
    if (!ok) {
      throw std::runtime_error("bootstrap_nrmse: could not draw a non-degenerate resample");
    }
    acc.add(nrmse(p, q, variant));
  }
  BootstrapResult result = acc.finish();
  result.redrawn = redrawn;
  return result;
}

BootstrapResult bootstrap_nrmse_exhaustive(const PerformanceTable& table,
                                           const std::vector<TaskId>& subset,
                                           Averaging averaging, NrmseVariant variant) {
  const Eigen::VectorXd predicted = predict_performance(table, subset, averaging);
  const Eigen::VectorXd full = predict_performance(table, table.tasks, averaging);
  const auto t = static_cast<std::size_t>(table.values.rows());
  if (t > 8) {
    throw std::invalid_argument("bootstrap_nrmse_exhaustive: T too large to enumerate");
  }
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < t; ++i) outcomes *= t;

  BootstrapAccumulator acc;
  std::size_t skipped = 0;
  std::vector<std::size_t> draw(t, 0);
  for (std::size_t code = 0; code < outcomes; ++code) {
    std::size_t rem = code;
    for (std::size_t m = 0; m < t; ++m) {
      draw[m] = rem % t;
      rem /= t;
    }
    Eigen::VectorXd p(t), q(t);
    for (std::size_t m = 0; m < t; ++m) {
      p(static_cast<Eigen::Index>(m)) = predicted(static_cast<Eigen::Index>(draw[m]));
      q(static_cast<Eigen::Index>(m)) = full(static_cast<Eigen::Index>(draw[m]));
    }
    const double denom = variant == NrmseVariant::as_printed ? q.sum() : q.squaredNorm();
    if (denom <= 0.0) {
      ++skipped;  // mirrors the redraw rule: degenerate draws are excluded
      continue;
    }
    acc.add(nrmse(p, q, variant));
  }
  if (acc.count == 0) {
    throw std::runtime_error("bootstrap_nrmse_exhaustive: all outcomes degenerate");
  }
  BootstrapResult result = acc.finish();
  result.redrawn = skipped;
  return result;
}

std::vector<std::vector<std::size_t>> subsample_examples(
    const std::vector<std::size_t>& per_task_example_counts, double fraction,
    std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("subsample_examples: fraction must be in (0, 1]");
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(per_task_example_counts.size());
  for (std::size_t task = 0; task < per_task_example_counts.size(); ++task) {
    const std::size_t n = per_task_example_counts[task];
    if (n == 0) {
      throw std::invalid_argument("subsample_examples: task " + std::to_string(task) +
                                  " has no examples");
    }
    const auto keep =
        std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
    Rng rng = derive_rng(seed, "subsample_examples", task);
    out.push_back(rng.sample_without_replacement(n, keep));
  }
  return out;
}

EvalReport evaluate_subset(const PerformanceTable& table, const std::vector<TaskId>& subset,
                           Averaging averaging, NrmseVariant variant,
                           std::size_t bootstrap_resamples, std::uint64_t seed) {
  EvalReport r;
  r.subset = subset;
  r.models = table.models;
  r.averaging = averaging;
  r.predicted = predict_performance(table, subset, averaging);
  r.full = predict_performance(table, table.tasks, averaging);
  r.nrmse_value = nrmse(r.predicted, r.full, variant);
  const BootstrapResult b =
      bootstrap_nrmse(table, subset, bootstrap_resamples, seed, averaging, variant);
  r.bootstrap_mean = b.mean;
  r.bootstrap_std = b.std_dev;
  return r;
}

std::vector<EvalReport> sweep_k(const PerformanceTable& table,
                                const std::function<std::vector<TaskId>(int)>& selector,
                                int k_max, Averaging averaging, NrmseVariant variant,
                                std::size_t bootstrap_resamples, std::uint64_t seed) {
  if (k_max < 1 || static_cast<std::size_t>(k_max) > table.tasks.size()) {
    throw std::invalid_argument("sweep_k: k_max must be in [1, N]");
  }
  std::vector<EvalReport> reports;
  reports.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    reports.push_back(evaluate_subset(table, selector(k), averaging, variant,
                                      bootstrap_resamples, seed));
  }
  return reports;
}

std::size_t best_report_index(const std::vector<EvalReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("best_report_index: no reports");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].nrmse_value < reports[best].nrmse_value) best = i;
  }
  return best;
}

double random_baseline_nrmse(const PerformanceTable& table, int k, std::size_t trials,
                             std::uint64_t seed, Averaging averaging, NrmseVariant variant) {
  if (k < 1 || static_cast<std::size_t>(k) > table.tasks.size()) {
    throw std::invalid_argument("random_baseline_nrmse: k must be in [1, N]");
  }
  const Eigen::VectorXd full = predict_performance(table, table.tasks, averaging);
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = derive_rng(seed, "random_subsets", t);
    const auto idx = rng.sample_without_replacement(table.tasks.size(),
                                                    static_cast<std::size_t>(k));
    std::vector<TaskId> subset;
    subset.reserve(idx.size());
    for (std::size_t i : idx) subset.push_back(table.tasks[i]);
    total += nrmse(predict_performance(table, subset, averaging), full, variant);
  }
  return total / static_cast<double>(trials);
}

std::string report_to_json(const EvalReport& r, const std::string& config_digest) {
  json j;
  j["subset"] = r.subset;
  j["models"] = r.models;
  j["predicted"] = std::vector<double>(r.predicted.data(), r.predicted.data() + r.predicted.size());
  j["full"] = std::vector<double>(r.full.data(), r.full.data() + r.full.size());
  j["nrmse"] = r.nrmse_value;
  j["bootstrap_mean"] = r.bootstrap_mean;
  j["bootstrap_std"] = r.bootstrap_std;
  j["averaging"] = to_string(r.averaging);
  j["config_digest"] = config_digest;
  return j.dump(2) + "\n";
}

}  // namespace bento
