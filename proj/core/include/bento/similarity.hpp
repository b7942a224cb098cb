#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "bento/ict_matrix.hpp"
#include "bento/types.hpp"

namespace bento {

enum class DistanceMetric { euclidean, chebyshev };

const char* to_string(DistanceMetric m);
DistanceMetric distance_metric_from_string(const std::string& s);

/// Pairwise distances between task embedding rows. Symmetric, zero diagonal.
struct DistanceMatrix {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
  DistanceMetric metric = DistanceMetric::euclidean;
};

enum class SimilarityKind { dist_kernel, cosine_rows, le_cosine };

const char* to_string(SimilarityKind k);
SimilarityKind similarity_kind_from_string(const std::string& s);

/// Symmetric task similarity matrix. For dist_kernel the diagonal equals c;
/// for cosine kinds entries lie in [-1, 1] with unit diagonal.
struct SimilarityMatrix {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
  SimilarityKind kind = SimilarityKind::dist_kernel;
  std::optional<double> c;  // present only for dist_kernel
};

/// c = t * max(E) with t > 1, so every similarity stays strictly positive.
/// `absolute_c` overrides the relative rule (needed when max(E) = 0).
struct KernelConfig {
  double t = 1.5;
  std::optional<double> absolute_c;
  /// Divide all distances by their population standard deviation before the
  /// kernel (the variant used with perplexity-scaled matrices).
  bool standardize_distances = false;
};

/// Row-wise distances of a normalized ICT matrix.
DistanceMatrix pairwise_distance(const IctMatrix& m,
                                 DistanceMetric metric = DistanceMetric::euclidean);

/// S = c - E. All entries strictly positive when max(E) > 0 and t > 1.
SimilarityMatrix distance_to_similarity(const DistanceMatrix& e, const KernelConfig& cfg = {});

/// Cosine similarity of embedding rows; diagonal exactly 1. `kind` is
/// cosine_rows for raw-embedding rows and le_cosine for LE rows.
SimilarityMatrix cosine_rows(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows,
                             SimilarityKind kind = SimilarityKind::cosine_rows);

/// Sidecar metadata (kind, metric context, c) serialized as JSON.
std::string similarity_metadata_json(const SimilarityMatrix& s,
                                     const std::string& config_digest,
                                     std::optional<DistanceMetric> metric = std::nullopt);

}  // namespace bento
