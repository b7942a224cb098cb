#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bento/ict_matrix.hpp"
#include "bento/similarity.hpp"
#include "bento/types.hpp"

namespace bento {

/// Symmetric normalized graph Laplacian L = I - D^{-1/2} S D^{-1/2} of the
/// complete similarity graph. Eigenvalues lie in [0, 2].
struct LaplacianMatrix {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
  Eigen::VectorXd degrees;
};

/// Laplacian-Eigenmap coordinates: columns are the unit eigenvectors of the
/// K smallest eigenvalues, sign-fixed so the first component above 1e-12 in
/// magnitude is positive.
struct LeEmbedding {
  std::vector<TaskId> tasks;
  int dim = 0;
  Eigen::MatrixXd vectors;     // N x K, rows are task coordinates
  Eigen::VectorXd eigenvalues; // ascending, length K
};

struct ClusterAssignment {
  std::vector<TaskId> tasks;
  std::vector<int> labels;
  int k_clusters = 0;
};

/// Needs non-negative entries (shift cosine similarities first) and positive
/// row sums.
LaplacianMatrix normalized_laplacian(const SimilarityMatrix& s);

LeEmbedding le_embed(const LaplacianMatrix& l, int k);

/// Largest consecutive gap among the first min(N, 16) Laplacian eigenvalues;
/// the default dimension when none is configured.
int eigengap_dimension(const LaplacianMatrix& l);

struct KMeansOptions {
  int max_iterations = 300;
  int restarts = 10;
  /// Unit-normalize embedding rows before clustering.
  bool normalize_rows = false;
};

/// K-Means over LE rows (k-means++ init, best inertia over restarts).
/// Deterministic given the seed. An empty cluster is re-seeded to the point
/// farthest from its current centroid.
ClusterAssignment spectral_cluster(const LeEmbedding& emb, int k_clusters, std::uint64_t seed,
                                   const KMeansOptions& opts = {});

struct ChordArc {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 0.0;
};

/// Nodes plus the ceil(top_fraction * N(N-1)) largest off-diagonal entries as
/// directed arcs, sorted by descending weight with (source, target) index
/// tie-breaks.
struct ChordGraph {
  std::vector<TaskId> tasks;
  std::vector<int> clusters;
  std::vector<ChordArc> arcs;
};

ChordGraph chord_export(const IctMatrix& a, const ClusterAssignment& clusters,
                        double top_fraction);

std::string chord_to_json(const ChordGraph& g, const std::string& config_digest);
std::string chord_to_dot(const ChordGraph& g);

}  // namespace bento
