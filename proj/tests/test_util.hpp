#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bento/evaluation.hpp"
#include "bento/ict_matrix.hpp"
#include "bento/rng.hpp"
#include "bento/similarity.hpp"

namespace bento_test {

inline std::vector<bento::TaskId> make_tasks(std::size_t n, const std::string& prefix = "t") {
  std::vector<bento::TaskId> tasks;
  tasks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tasks.push_back(prefix + std::to_string(i + 1));
  return tasks;
}

/// Random symmetric similarity with entries in [lo, hi].
inline bento::SimilarityMatrix random_similarity(bento::Rng& rng, int n, double lo = 0.0,
                                                 double hi = 1.0) {
  bento::SimilarityMatrix s;
  s.tasks = make_tasks(static_cast<std::size_t>(n));
  s.kind = bento::SimilarityKind::dist_kernel;
  s.c = hi;
  s.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = rng.uniform(lo, hi);
      s.values(i, j) = v;
      s.values(j, i) = v;
    }
  }
  return s;
}

struct PlantedBlocks {
  bento::IctMatrix matrix;  // raw ICT values
  std::vector<int> labels;  // ground-truth block of each task
  int blocks = 0;
  double gap = 0.0;
};

/// Raw ICT matrix with planted block structure: intra-block transfer is high,
/// inter-block low, plus uniform noise of amplitude noise_frac * gap.
inline PlantedBlocks planted_block_matrix(std::uint64_t seed, int blocks = 3, int per_block = 5,
                                          double intra = 0.8, double inter = 0.2,
                                          double noise_frac = 0.2) {
  bento::Rng rng = bento::derive_rng(seed, "planted");
  const int n = blocks * per_block;
  PlantedBlocks out;
  out.blocks = blocks;
  out.gap = intra - inter;
  out.matrix.tasks = make_tasks(static_cast<std::size_t>(n));
  out.matrix.normalization = bento::Normalization::raw;
  out.matrix.values.resize(n, n);
  out.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.labels[static_cast<std::size_t>(i)] = i / per_block;
  const double amp = noise_frac * out.gap;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool same = out.labels[static_cast<std::size_t>(i)] ==
                        out.labels[static_cast<std::size_t>(j)];
      out.matrix.values(i, j) = (same ? intra : inter) + rng.uniform(-amp, amp);
    }
  }
  return out;
}

/// Performance table whose model-task scores share the planted block
/// structure: score(model, task) = model base + per-(model, block) offset
/// + small per-task jitter.
inline bento::PerformanceTable synthetic_performance(std::uint64_t seed,
                                                     const std::vector<int>& labels,
                                                     int n_models = 9) {
  bento::Rng rng = bento::derive_rng(seed, "perf");
  const int n = static_cast<int>(labels.size());
  int blocks = 0;
  for (int l : labels) blocks = std::max(blocks, l + 1);

  bento::PerformanceTable table;
  table.tasks = make_tasks(static_cast<std::size_t>(n));
  for (int m = 0; m < n_models; ++m) table.models.push_back("m" + std::to_string(m + 1));
  table.values.resize(n_models, n);

  std::vector<double> task_jitter(static_cast<std::size_t>(n));
  for (auto& j : task_jitter) j = rng.uniform(-0.01, 0.01);
  for (int m = 0; m < n_models; ++m) {
    const double base = rng.uniform(0.3, 0.7);
    std::vector<double> block_offset(static_cast<std::size_t>(blocks));
    for (auto& b : block_offset) b = rng.uniform(-0.15, 0.15);
    for (int t = 0; t < n; ++t) {
      const double v = base + block_offset[static_cast<std::size_t>(labels[t])] +
                       task_jitter[static_cast<std::size_t>(t)] + rng.uniform(-0.005, 0.005);
      table.values(m, t) = std::min(1.0, std::max(0.0, v));
    }
  }
  return table;
}

/// Maps predicted labels onto planted ones; true iff the partition matches
/// exactly up to a label permutation.
inline bool same_partition(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) return false;
  std::vector<int> fwd(predicted.size(), -1), bwd(predicted.size(), -1);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int t = truth[i];
    if (fwd[static_cast<std::size_t>(p)] == -1) fwd[static_cast<std::size_t>(p)] = t;
    if (bwd[static_cast<std::size_t>(t)] == -1) bwd[static_cast<std::size_t>(t)] = p;
    if (fwd[static_cast<std::size_t>(p)] != t || bwd[static_cast<std::size_t>(t)] != p) {
      return false;
    }
  }
  return true;
}

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("bento_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)) + "_" + std::to_string(rd() % 100000));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace bento_test
