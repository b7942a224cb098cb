#include "bento/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "bento/csv.hpp"
#include "bento/rng.hpp"

namespace bento {

LaplacianMatrix normalized_laplacian(const SimilarityMatrix& s) {
  const Eigen::Index n = s.values.rows();
  if (n != s.values.cols() || n != static_cast<Eigen::Index>(s.tasks.size())) {
    throw std::invalid_argument("normalized_laplacian: malformed similarity matrix");
  }
  if ((s.values.array() < -1e-12).any()) {
    throw std::invalid_argument("normalized_laplacian: negative similarities; "
                                "shift the matrix into the non-negative range first");
  }
  LaplacianMatrix out;
  out.tasks = s.tasks;
  out.degrees = s.values.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.degrees(i) <= 0.0) {
      throw std::invalid_argument("normalized_laplacian: zero degree for task " +
                                  s.tasks[static_cast<std::size_t>(i)]);
    }
  }
  const Eigen::VectorXd inv_sqrt = out.degrees.array().rsqrt();
  out.values.resize(n, n);
  // Fill the upper triangle and mirror so L is symmetric to the bit.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double scaled = inv_sqrt(i) * s.values(i, j) * inv_sqrt(j);
      const double v = (i == j ? 1.0 - scaled : -scaled);
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

LeEmbedding le_embed(const LaplacianMatrix& l, int k) {
  const Eigen::Index n = l.values.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("le_embed: K must be in [1, N]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l.values);
  if (solver.info() != Eigen::Success) {
    const double residual = (l.values * solver.eigenvectors() -
                             solver.eigenvectors() * solver.eigenvalues().asDiagonal())
                                .norm();
    throw std::runtime_error("le_embed: eigensolver failed, residual norm " +
                             format_double(residual));
  }
  LeEmbedding out;
  out.tasks = l.tasks;
  out.dim = k;
  out.eigenvalues = solver.eigenvalues().head(k);
  out.vectors = solver.eigenvectors().leftCols(k);
  // Deterministic sign: first component with |x| > 1e-12 is made positive.
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double v = out.vectors(r, c);
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) out.vectors.col(c) = -out.vectors.col(c);
        break;
      }
    }
  }
  return out;
}

int eigengap_dimension(const LaplacianMatrix& l) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l.values, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigengap_dimension: eigensolver failed");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const Eigen::Index m = std::min<Eigen::Index>(ev.size(), 16);
  if (m <= 1) return 1;
  int best_k = 1;
  double best_gap = -1.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const double gap = ev(i + 1) - ev(i);
    if (gap > best_gap) {
      best_gap = gap;
      best_k = static_cast<int>(i) + 1;
    }
  }
  return best_k;
}

namespace {

double squared_distance(const Eigen::MatrixXd& rows, Eigen::Index i,
                        const Eigen::RowVectorXd& center) {
  return (rows.row(i) - center).squaredNorm();
}

struct KMeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansRun kmeans_once(const Eigen::MatrixXd& rows, int k, Rng& rng, int max_iterations) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd centers(k, rows.cols());

  // k-means++ seeding.
  centers.row(0) = rows.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = squared_distance(rows, i, centers.row(0));
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double r = rng.uniform01() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = rows.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), squared_distance(rows, i, centers.row(c)));
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(rows, i, centers.row(0));
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(rows, i, centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    // Re-seed empty clusters to the point farthest from its centroid.
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(labels[i])];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      Eigen::Index farthest = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double d = squared_distance(rows, i, centers.row(labels[i]));
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      centers.row(c) = rows.row(farthest);
      labels[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += rows.row(i);
      ++sizes[static_cast<std::size_t>(labels[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      }
    }
    if (!changed) break;
  }

  KMeansRun run;
  run.labels = labels;
  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    run.inertia += squared_distance(rows, i, centers.row(labels[static_cast<std::size_t>(i)]));
  }
  return run;
}

}  // namespace

ClusterAssignment spectral_cluster(const LeEmbedding& emb, int k_clusters, std::uint64_t seed,
                                   const KMeansOptions& opts) {
  const Eigen::Index n = emb.vectors.rows();
  if (k_clusters < 1 || k_clusters > n) {
    throw std::invalid_argument("spectral_cluster: k_clusters must be in [1, N]");
  }
  Eigen::MatrixXd rows = emb.vectors;
  if (opts.normalize_rows) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = rows.row(i).norm();
      if (norm > 0.0) rows.row(i) /= norm;
    }
  }

  KMeansRun best;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng = derive_rng(seed, "kmeans", static_cast<std::uint64_t>(r));
    KMeansRun run = kmeans_once(rows, k_clusters, rng, opts.max_iterations);
    if (run.inertia < best.inertia) {
      best = std::move(run);
    }
  }

  // Relabel clusters by first appearance so output is canonical.
  std::vector<int> remap(static_cast<std::size_t>(k_clusters), -1);
  int next = 0;
  ClusterAssignment out;
  out.tasks = emb.tasks;
  out.k_clusters = k_clusters;
  out.labels.resize(best.labels.size());
  for (std::size_t i = 0; i < best.labels.size(); ++i) {
    int& slot = remap[static_cast<std::size_t>(best.labels[i])];
    if (slot < 0) slot = next++;
    out.labels[i] = slot;
  }
  return out;
}

ChordGraph chord_export(const IctMatrix& a, const ClusterAssignment& clusters,
                        double top_fraction) {
  if (!(top_fraction > 0.0) || top_fraction > 1.0) {
    throw std::invalid_argument("chord_export: top_fraction must be in (0, 1]");
  }
  if (a.tasks != clusters.tasks) {
    throw std::invalid_argument("chord_export: matrix and clustering task lists differ");
  }
  const std::size_t n = a.tasks.size();
  std::vector<ChordArc> arcs;
  arcs.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      arcs.push_back(ChordArc{i, j, a.values(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j))});
    }
  }
  std::sort(arcs.begin(), arcs.end(), [](const ChordArc& x, const ChordArc& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.source != y.source) return x.source < y.source;
    return x.target < y.target;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(top_fraction * static_cast<double>(n * (n - 1))));
  arcs.resize(std::min(keep, arcs.size()));

  ChordGraph g;
  g.tasks = a.tasks;
  g.clusters = clusters.labels;
  g.arcs = std::move(arcs);
  return g;
}

std::string chord_to_json(const ChordGraph& g, const std::string& config_digest) {
  nlohmann::json j;
  j["config_digest"] = config_digest;
  j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < g.tasks.size(); ++i) {
    j["nodes"].push_back({{"id", g.tasks[i]}, {"cluster", g.clusters[i]}});
  }
  j["arcs"] = nlohmann::json::array();
  for (const auto& a : g.arcs) {
    j["arcs"].push_back({{"source", g.tasks[a.source]},
                         {"target", g.tasks[a.target]},
                         {"weight", a.weight}});
  }
  return j.dump(2) + "\n";
}

std::string chord_to_dot(const ChordGraph& g) {
  std::string out = "digraph ict {\n";
  for (std::size_t i = 0; i < g.tasks.size(); ++i) {
    out += "  \"" + g.tasks[i] + "\" [cluster=" + std::to_string(g.clusters[i]) + "];\n";
  }
  for (const auto& a : g.arcs) {
    out += "  \"" + g.tasks[a.source] + "\" -> \"" + g.tasks[a.target] +
           "\" [weight=" + format_double(a.weight) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace bento
