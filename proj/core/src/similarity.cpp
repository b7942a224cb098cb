#include "bento/similarity.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bento {

const char* to_string(DistanceMetric m) {
  return m == DistanceMetric::euclidean ? "euclidean" : "chebyshev";
}

DistanceMetric distance_metric_from_string(const std::string& s) {
  if (s == "euclidean") return DistanceMetric::euclidean;
  if (s == "chebyshev") return DistanceMetric::chebyshev;
  throw std::invalid_argument("unknown distance metric: " + s);
}

const char* to_string(SimilarityKind k) {
  switch (k) {
    case SimilarityKind::dist_kernel: return "dist_kernel";
    case SimilarityKind::cosine_rows: return "cosine_rows";
    case SimilarityKind::le_cosine: return "le_cosine";
  }
  return "dist_kernel";
}

SimilarityKind similarity_kind_from_string(const std::string& s) {
  if (s == "dist_kernel") return SimilarityKind::dist_kernel;
  if (s == "cosine_rows") return SimilarityKind::cosine_rows;
  if (s == "le_cosine") return SimilarityKind::le_cosine;
  throw std::invalid_argument("unknown similarity kind: " + s);
}

DistanceMatrix pairwise_distance(const IctMatrix& m, DistanceMetric metric) {
  if (m.normalization == Normalization::raw) {
    throw std::invalid_argument("pairwise_distance: matrix must be centered or zscored first");
  }
  if (!m.values.allFinite()) {
    throw std::invalid_argument("pairwise_distance: non-finite matrix entries");
  }
  const Eigen::Index n = m.values.rows();
  DistanceMatrix out;
  out.tasks = m.tasks;
  out.metric = metric;
  out.values = Eigen::MatrixXd::Zero(n, n);
  // Each unordered pair is computed once, so symmetry is exact.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d = 0.0;
      if (metric == DistanceMetric::euclidean) {
        d = (m.values.row(i) - m.values.row(j)).norm();
      } else {
        d = (m.values.row(i) - m.values.row(j)).cwiseAbs().maxCoeff();
      }
      out.values(i, j) = d;
      out.values(j, i) = d;
    }
  }
  return out;
}

SimilarityMatrix distance_to_similarity(const DistanceMatrix& e, const KernelConfig& cfg) {
  if (!e.values.allFinite()) {
    throw std::invalid_argument("distance_to_similarity: non-finite distances");
  }
  Eigen::MatrixXd dist = e.values;
  if (cfg.standardize_distances) {
    const double mean = dist.mean();
    const double var = (dist.array() - mean).square().mean();
    const double std_dev = std::sqrt(var);
    if (std_dev == 0.0) {
      throw std::invalid_argument("distance_to_similarity: cannot standardize constant distances");
    }
    dist /= std_dev;
  }
  const double max_e = dist.maxCoeff();
  double c = 0.0;
  if (cfg.absolute_c) {
    c = *cfg.absolute_c;
    if (c < max_e) {
      throw std::invalid_argument("distance_to_similarity: absolute c below max distance; "
                                  "similarities would be negative");
    }
  } else {
    if (cfg.t <= 1.0) {
      throw std::invalid_argument("distance_to_similarity: t must exceed 1");
    }
    if (max_e == 0.0) {
      throw std::invalid_argument("distance_to_similarity: all distances are zero; "
                                  "relative c = t*max(E) degenerates, set an absolute c");
    }
    c = cfg.t * max_e;
  }
  SimilarityMatrix out;
  out.tasks = e.tasks;
  out.kind = SimilarityKind::dist_kernel;
  out.c = c;
  out.values = (c - dist.array()).matrix();
  return out;
}

SimilarityMatrix cosine_rows(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows,
                             SimilarityKind kind) {
  if (kind == SimilarityKind::dist_kernel) {
    throw std::invalid_argument("cosine_rows: kind must be a cosine kind");
  }
  if (rows.rows() != static_cast<Eigen::Index>(tasks.size())) {
    throw std::invalid_argument("cosine_rows: row count does not match task list");
  }
  const Eigen::Index n = rows.rows();
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = rows.row(i).norm();
    if (norms(i) == 0.0) {
      throw std::invalid_argument("cosine_rows: zero-norm row for task " +
                                  tasks[static_cast<std::size_t>(i)]);
    }
  }
  SimilarityMatrix out;
  out.tasks = tasks;
  out.kind = kind;
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = rows.row(i).dot(rows.row(j)) / (norms(i) * norms(j));
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

std::string similarity_metadata_json(const SimilarityMatrix& s,
                                     const std::string& config_digest,
                                     std::optional<DistanceMetric> metric) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  if (s.c) j["c"] = *s.c;
  if (metric) j["metric"] = to_string(*metric);
  j["config_digest"] = config_digest;
  return j.dump(2) + "\n";
}

}  // namespace bento
