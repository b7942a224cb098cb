#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bento/ict_matrix.hpp"
#include "bento/similarity.hpp"
#include "bento/types.hpp"

namespace bento {

enum class SelectionMethod {
  fl_greedy,
  fl_bruteforce,
  kmedoids,
  random,
  bm25_sim,
  bm25_le,
  prompt_ranked,
};

const char* to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& s);

/// Ordered selected subset. objective_trace holds f(X) after each greedy
/// step (facility-location methods only) and is nondecreasing.
struct SelectionResult {
  SelectionMethod method = SelectionMethod::fl_greedy;
  int k = 0;
  std::vector<TaskId> selected;
  std::vector<double> objective_trace;
  std::string config_digest;
};

/// Facility-location value f(X) = sum_i max_{j in X} S_ij; f(empty) = 0.
double fl_value(const SimilarityMatrix& s, const std::vector<TaskId>& subset);

/// Greedy maximization of the facility-location objective. Ties go to the
/// lowest task index. Cosine-kind similarities are shifted by +1 internally;
/// a constant shift provably leaves the greedy selection unchanged at fixed
/// cardinality.
SelectionResult fl_greedy(const SimilarityMatrix& s, int k);

/// Exact optimum by enumeration; the test oracle for the greedy guarantee.
/// Guarded to N <= 20. Ties resolved to the lexicographically smallest
/// index subset.
SelectionResult fl_bruteforce(const SimilarityMatrix& s, int k);

struct KMedoidsOptions {
  int max_rounds = 100;
  int restarts = 10;
};

/// Alternating assignment/update k-medoids on a pairwise distance matrix;
/// medoids are returned as the selection, in ascending task order.
SelectionResult kmedoids(const DistanceMatrix& distances, int k, std::uint64_t seed,
                         const KMedoidsOptions& opts = {});

// Distance inputs for the k-medoids variants.
DistanceMatrix feature_distances(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows);
DistanceMatrix similarity_to_distances(const SimilarityMatrix& s);
DistanceMatrix cosine_distances(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows);

/// `trials` uniform k-subsets of [0, N), each without replacement,
/// reproducible from the seed.
std::vector<std::vector<std::size_t>> random_subsets(std::size_t n, std::size_t k,
                                                     std::size_t trials, std::uint64_t seed);

struct Bm25Config {
  double k1 = 1.2;
  double b = 0.75;
  /// Average A with its transpose (the score is direction-ambiguous).
  bool symmetrize = false;
};

/// Okapi BM25 of task i's corpus (query) against task j's corpus (document).
/// Tokenization: lowercase, split on non-alphanumeric runs.
IctMatrix bm25_matrix(const std::vector<TaskId>& tasks, const std::vector<std::string>& corpora,
                      const Bm25Config& cfg = {});

/// First k entries of an externally produced ranking.
SelectionResult prompt_ranked_selection(const std::vector<TaskId>& ranked,
                                        const std::vector<TaskId>& tasks, int k);

std::string selection_to_json(const SelectionResult& r, const std::string& matrix_digest);
SelectionResult selection_from_json(const std::string& text);

}  // namespace bento
