#include "bento/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bento/rng.hpp"

namespace bento {

using nlohmann::json;

const char* to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::fl_greedy: return "fl_greedy";
    case SelectionMethod::fl_bruteforce: return "fl_bruteforce";
    case SelectionMethod::kmedoids: return "kmedoids";
    case SelectionMethod::random: return "random";
    case SelectionMethod::bm25_sim: return "bm25_sim";
    case SelectionMethod::bm25_le: return "bm25_le";
    case SelectionMethod::prompt_ranked: return "prompt_ranked";
  }
  return "fl_greedy";
}

SelectionMethod selection_method_from_string(const std::string& s) {
  if (s == "fl_greedy") return SelectionMethod::fl_greedy;
  if (s == "fl_bruteforce") return SelectionMethod::fl_bruteforce;
  if (s == "kmedoids") return SelectionMethod::kmedoids;
  if (s == "random") return SelectionMethod::random;
  if (s == "bm25_sim") return SelectionMethod::bm25_sim;
  if (s == "bm25_le") return SelectionMethod::bm25_le;
  if (s == "prompt_ranked") return SelectionMethod::prompt_ranked;
  throw std::invalid_argument("unknown selection method: " + s);
}

namespace {

/// Cosine-kind matrices are shifted into [0, 2] before optimization.
Eigen::MatrixXd effective_similarity(const SimilarityMatrix& s) {
  if (s.kind == SimilarityKind::dist_kernel) return s.values;
  return s.values.array() + 1.0;
}

double fl_value_indices(const Eigen::MatrixXd& sim, const std::vector<std::size_t>& subset) {
  if (subset.empty()) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j : subset) {
      best = std::max(best, sim(i, static_cast<Eigen::Index>(j)));
    }
    total += best;
  }
  return total;
}

}  // namespace

double fl_value(const SimilarityMatrix& s, const std::vector<TaskId>& subset) {
  if (subset.empty()) return 0.0;
  const TaskIndex index(s.tasks);
  std::vector<std::size_t> idx;
  idx.reserve(subset.size());
  for (const auto& id : subset) idx.push_back(index.at(id));
  return fl_value_indices(effective_similarity(s), idx);
}

SelectionResult fl_greedy(const SimilarityMatrix& s, int k) {
  const Eigen::Index n = s.values.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("fl_greedy: k must be in [1, N]");
  }
  const Eigen::MatrixXd sim = effective_similarity(s);

  SelectionResult out;
  out.method = SelectionMethod::fl_greedy;
  out.k = k;

  // coverage(i) = max over selected j of sim(i, j).
  Eigen::VectorXd coverage =
      Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  double objective = 0.0;

  for (int step = 0; step < k; ++step) {
    Eigen::Index best_j = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      double value = 0.0;
      if (step == 0) {
        value = sim.col(j).sum();  // f({j}) - f(empty), with f(empty) = 0
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          value += std::max(coverage(i), sim(i, j)) - coverage(i);
        }
      }
      if (value > best_value) {  // strict: ties keep the lowest index
        best_value = value;
        best_j = j;
      }
    }
    chosen[static_cast<std::size_t>(best_j)] = true;
    coverage = coverage.cwiseMax(sim.col(best_j));
    objective = coverage.sum();
    out.selected.push_back(s.tasks[static_cast<std::size_t>(best_j)]);
    out.objective_trace.push_back(objective);
  }
  return out;
}

SelectionResult fl_bruteforce(const SimilarityMatrix& s, int k) {
  const Eigen::Index n = s.values.rows();
  if (n > 20) {
    throw std::invalid_argument("fl_bruteforce: guarded to N <= 20 tasks");
  }
  if (k < 1 || k > n) {
    throw std::invalid_argument("fl_bruteforce: k must be in [1, N]");
  }
  const Eigen::MatrixXd sim = effective_similarity(s);

  // Enumerate k-combinations in lexicographic index order, so on ties the
  // first (lexicographically smallest) optimum is kept.
  std::vector<std::size_t> combo(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) combo[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);

  std::vector<std::size_t> best_combo;
  double best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    const double value = fl_value_indices(sim, combo);
    if (value > best_value) {
      best_value = value;
      best_combo = combo;
    }
    // Next combination.
    int pos = k - 1;
    while (pos >= 0 &&
           combo[static_cast<std::size_t>(pos)] ==
               static_cast<std::size_t>(n) - static_cast<std::size_t>(k - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++combo[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < k; ++q) {
      combo[static_cast<std::size_t>(q)] = combo[static_cast<std::size_t>(q - 1)] + 1;
    }
  }

  SelectionResult out;
  out.method = SelectionMethod::fl_bruteforce;
  out.k = k;
  for (std::size_t j : best_combo) out.selected.push_back(s.tasks[j]);
  out.objective_trace.push_back(best_value);
  return out;
}

DistanceMatrix feature_distances(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows) {
  if (rows.rows() != static_cast<Eigen::Index>(tasks.size())) {
    throw std::invalid_argument("feature_distances: row count does not match task list");
  }
  const Eigen::Index n = rows.rows();
  DistanceMatrix out;
  out.tasks = tasks;
  out.metric = DistanceMetric::euclidean;
  out.values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (rows.row(i) - rows.row(j)).norm();
      out.values(i, j) = d;
      out.values(j, i) = d;
    }
  }
  return out;
}

DistanceMatrix similarity_to_distances(const SimilarityMatrix& s) {
  if (s.kind != SimilarityKind::dist_kernel || !s.c) {
    throw std::invalid_argument("similarity_to_distances: needs a dist_kernel matrix with c");
  }
  DistanceMatrix out;
  out.tasks = s.tasks;
  out.metric = DistanceMetric::euclidean;
  out.values = (*s.c - s.values.array()).matrix();
  // c - S recovers the original distances; pin the diagonal back to zero.
  out.values.diagonal().setZero();
  return out;
}

DistanceMatrix cosine_distances(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& rows) {
  SimilarityMatrix cos = cosine_rows(tasks, rows, SimilarityKind::cosine_rows);
  DistanceMatrix out;
  out.tasks = tasks;
  out.metric = DistanceMetric::euclidean;
  out.values = (1.0 - cos.values.array()).matrix();
  out.values.diagonal().setZero();
  return out;
}

SelectionResult kmedoids(const DistanceMatrix& distances, int k, std::uint64_t seed,
                         const KMedoidsOptions& opts) {
  const Eigen::Index n = distances.values.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmedoids: k must be in [1, N]");
  }

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_medoids;

  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng = derive_rng(seed, "kmedoids", static_cast<std::uint64_t>(r));
    std::vector<std::size_t> medoids =
        rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
    std::sort(medoids.begin(), medoids.end());

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    for (int round = 0; round < opts.max_rounds; ++round) {
      // Assign each point to its nearest medoid (ties: lowest medoid index).
      for (Eigen::Index i = 0; i < n; ++i) {
        int best_m = 0;
        double best_d = distances.values(i, static_cast<Eigen::Index>(medoids[0]));
        for (int m = 1; m < k; ++m) {
          const double d = distances.values(i, static_cast<Eigen::Index>(medoids[m]));
          if (d < best_d) {
            best_d = d;
            best_m = m;
          }
        }
        assignment[static_cast<std::size_t>(i)] = best_m;
      }
      // Update each medoid to the member minimizing its cluster's total
      // distance (ties: lowest index).
      bool changed = false;
      for (int m = 0; m < k; ++m) {
        double best_total = std::numeric_limits<double>::infinity();
        std::size_t best_point = medoids[static_cast<std::size_t>(m)];
        for (Eigen::Index cand = 0; cand < n; ++cand) {
          if (assignment[static_cast<std::size_t>(cand)] != m) continue;
          double total = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (assignment[static_cast<std::size_t>(i)] == m) {
              total += distances.values(i, cand);
            }
          }
          if (total < best_total) {
            best_total = total;
            best_point = static_cast<std::size_t>(cand);
          }
        }
        if (best_point != medoids[static_cast<std::size_t>(m)]) {
          medoids[static_cast<std::size_t>(m)] = best_point;
          changed = true;
        }
      }
      if (!changed) break;
    }

    double cost = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t m : medoids) {
        best_d = std::min(best_d, distances.values(i, static_cast<Eigen::Index>(m)));
      }
      cost += best_d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      std::sort(medoids.begin(), medoids.end());
      best_medoids = medoids;
    }
  }

  SelectionResult out;
  out.method = SelectionMethod::kmedoids;
  out.k = k;
  for (std::size_t m : best_medoids) out.selected.push_back(distances.tasks[m]);
  return out;
}

std::vector<std::vector<std::size_t>> random_subsets(std::size_t n, std::size_t k,
                                                     std::size_t trials, std::uint64_t seed) {
  if (k > n) {
    throw std::invalid_argument("random_subsets: k exceeds N");
  }
  if (trials < 1) {
    throw std::invalid_argument("random_subsets: trials must be >= 1");
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = derive_rng(seed, "random_subsets", t);
    out.push_back(rng.sample_without_replacement(n, k));
  }
  return out;
}

namespace {

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

}  // namespace

IctMatrix bm25_matrix(const std::vector<TaskId>& tasks, const std::vector<std::string>& corpora,
                      const Bm25Config& cfg) {
  if (tasks.size() != corpora.size()) {
    throw std::invalid_argument("bm25_matrix: task and corpus counts differ");
  }
  if (cfg.k1 <= 0.0 || cfg.b < 0.0 || cfg.b > 1.0) {
    throw std::invalid_argument("bm25_matrix: require k1 > 0 and b in [0, 1]");
  }
  const std::size_t n = tasks.size();
  if (n < 2) {
    throw std::invalid_argument("bm25_matrix: need at least 2 tasks");
  }

  std::vector<std::vector<std::string>> docs(n);
  std::vector<std::map<std::string, double>> term_freq(n);
  double total_len = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    docs[j] = tokenize_lower(corpora[j]);
    if (docs[j].empty()) {
      throw std::invalid_argument("bm25_matrix: corpus for task " + tasks[j] +
                                  " is empty after tokenization");
    }
    for (const auto& tok : docs[j]) term_freq[j][tok] += 1.0;
    total_len += static_cast<double>(docs[j].size());
  }
  const double avg_len = total_len / static_cast<double>(n);

  // Document frequency over the n task documents.
  std::map<std::string, double> doc_freq;
  for (const auto& tf : term_freq) {
    for (const auto& [tok, cnt] : tf) doc_freq[tok] += 1.0;
  }
  const double nd = static_cast<double>(n);
  std::map<std::string, double> idf;
  for (const auto& [tok, df] : doc_freq) {
    idf[tok] = std::log((nd - df + 0.5) / (df + 0.5));
  }

  IctMatrix out;
  out.tasks = tasks;
  out.normalization = Normalization::raw;
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    // Unique query terms from task i's corpus.
    std::set<std::string> query(docs[i].begin(), docs[i].end());
    for (std::size_t j = 0; j < n; ++j) {
      const double len_norm = cfg.k1 * (1.0 - cfg.b + cfg.b * static_cast<double>(docs[j].size()) / avg_len);
      double score = 0.0;
      for (const auto& term : query) {
        const auto it = term_freq[j].find(term);
        if (it == term_freq[j].end()) continue;
        const double tf = it->second;
        score += idf[term] * tf * (cfg.k1 + 1.0) / (tf + len_norm);
      }
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = score;
    }
  }
  if (cfg.symmetrize) {
    out.values = ((out.values + out.values.transpose()) / 2.0).eval();
  }
  return out;
}

SelectionResult prompt_ranked_selection(const std::vector<TaskId>& ranked,
                                        const std::vector<TaskId>& tasks, int k) {
  if (k < 1) {
    throw std::invalid_argument("prompt_ranked_selection: k must be >= 1");
  }
  if (static_cast<std::size_t>(k) > ranked.size()) {
    throw std::invalid_argument("prompt_ranked_selection: ranking has " +
                                std::to_string(ranked.size()) + " entries, need k = " +
                                std::to_string(k));
  }
  const TaskIndex index(tasks);
  std::set<TaskId> seen;
  for (const auto& id : ranked) {
    if (!index.contains(id)) {
      throw std::invalid_argument("prompt_ranked_selection: unknown task in ranking: " + id);
    }
    if (!seen.insert(id).second) {
      throw std::invalid_argument("prompt_ranked_selection: duplicate task in ranking: " + id);
    }
  }
  SelectionResult out;
  out.method = SelectionMethod::prompt_ranked;
  out.k = k;
  out.selected.assign(ranked.begin(), ranked.begin() + k);
  return out;
}

std::string selection_to_json(const SelectionResult& r, const std::string& matrix_digest) {
  json j;
  j["method"] = to_string(r.method);
  j["k"] = r.k;
  j["selected"] = r.selected;
  j["objective_trace"] = r.objective_trace;
  j["config_digest"] = r.config_digest;
  j["matrix_digest"] = matrix_digest;
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& text) {
  const json j = json::parse(text);
  SelectionResult r;
  r.method = selection_method_from_string(j.at("method").get<std::string>());
  r.k = j.at("k").get<int>();
  r.selected = j.at("selected").get<std::vector<TaskId>>();
  r.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  r.config_digest = j.value("config_digest", "");
  return r;
}

}  // namespace bento
