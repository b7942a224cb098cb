#include "bento/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bento/csv.hpp"
#include "bento/digest.hpp"
#include "bento/rng.hpp"

namespace bento {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

std::string resolve_api_key(const PipelineConfig& cfg) {
  if (cfg.api_key_env.empty()) return "";
  const char* key = std::getenv(cfg.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw std::runtime_error("endpoint API key environment variable '" + cfg.api_key_env +
                             "' is not set (set api_key_env to \"\" for keyless endpoints)");
  }
  return key;
}

EndpointSettings endpoint_settings(const PipelineConfig& cfg) {
  require(!cfg.base_url.empty(), "config: base_url is required for endpoint stages");
  require(!cfg.model.empty(), "config: model is required for endpoint stages");
  EndpointSettings s;
  s.base_url = cfg.base_url;
  s.model = cfg.model;
  s.api_key = resolve_api_key(cfg);
  s.timeout_s = cfg.timeout_s;
  s.max_retries = cfg.max_retries;
  s.retry_base_ms = cfg.retry_base_ms;
  s.in_flight = cfg.in_flight;
  return s;
}

CollectorOptions collector_options(const PipelineConfig& cfg) {
  CollectorOptions opts;
  opts.style = prompt_style_from_string(cfg.style);
  opts.scoring = scoring_mode_from_string(cfg.scoring);
  opts.exemplars_per_prompt = cfg.exemplars_per_prompt;
  opts.seeds_per_pair = cfg.seeds_per_pair;
  opts.questions_per_seed = cfg.questions_per_seed;
  opts.in_flight = cfg.in_flight;
  return opts;
}

struct CellKey {
  std::string source;
  std::string target;
  std::uint32_t seed;

  std::string text() const {
    return source + "\x1f" + target + "\x1f" + std::to_string(seed);
  }
};

std::set<std::string> read_manifest(const std::string& path) {
  std::set<std::string> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    done.insert(CellKey{j.at("source").get<std::string>(), j.at("target").get<std::string>(),
                        j.at("seed").get<std::uint32_t>()}
                    .text());
  }
  return done;
}

}  // namespace

CollectSummary cmd_collect(const PipelineConfig& cfg, const std::string& out_dir) {
  require(!cfg.tasks_index.empty() && !cfg.data_dir.empty(),
          "config: tasks_index and data_dir are required for collect");
  const std::vector<TaskData> suite = load_task_suite(cfg.tasks_index, cfg.data_dir);
  const CollectorOptions opts = collector_options(cfg);

  fs::create_directories(out_dir);
  HttpCompletionClient client(endpoint_settings(cfg));
  const CompletionCache cache(cfg.cache_dir.empty() ? out_dir + "/cache" : cfg.cache_dir);

  const std::string manifest_path = out_dir + "/manifest.jsonl";
  const std::string records_path = out_dir + "/records.jsonl";
  const std::set<std::string> done = read_manifest(manifest_path);

  std::ofstream records_out(records_path, std::ios::binary | std::ios::app);
  std::ofstream manifest_out(manifest_path, std::ios::binary | std::ios::app);
  if (!records_out || !manifest_out) {
    throw std::runtime_error("cannot open output files under " + out_dir);
  }

  CollectSummary summary;
  summary.cells_expected = suite.size() * suite.size() *
                           static_cast<std::size_t>(std::max(0, opts.seeds_per_pair));

  for (const TaskData& source : suite) {
    for (const TaskData& target : suite) {
      for (int m = 1; m <= opts.seeds_per_pair; ++m) {
        const CellKey key{source.id, target.id, static_cast<std::uint32_t>(m)};
        if (done.count(key.text())) {
          ++summary.cells_resumed;
          continue;
        }
        CellResult cell;
        try {
          cell = run_transfer_cell(source, target, static_cast<std::uint32_t>(m), opts, client,
                                   &cache);
        } catch (const EndpointError& e) {
          summary.failed_cells.push_back("(" + source.id + ", " + target.id + ", seed " +
                                         std::to_string(m) + "): " + e.what());
          continue;
        }
        records_out << records_to_jsonl(cell.records);
        records_out.flush();
        json line;
        line["source"] = source.id;
        line["target"] = target.id;
        line["seed"] = m;
        line["records"] = cell.records.size();
        manifest_out << line.dump() << "\n";
        manifest_out.flush();
        ++summary.cells_completed;
        summary.requests += cell.requests;
        summary.cache_hits += cell.cache_hits;
        summary.warnings.insert(summary.warnings.end(), cell.warnings.begin(),
                                cell.warnings.end());
      }
    }
  }

  json report;
  report["expected_cells"] = summary.cells_expected;
  report["completed_cells"] = summary.cells_completed + summary.cells_resumed;
  report["resumed_cells"] = summary.cells_resumed;
  report["requests"] = summary.requests;
  report["cache_hits"] = summary.cache_hits;
  report["missing"] = summary.failed_cells;
  report["config_digest"] = config_digest(cfg);
  write_file(out_dir + "/completeness.json", report.dump(2) + "\n");
  return summary;
}

std::vector<TaskId> cmd_rank(const PipelineConfig& cfg, const std::string& out_path) {
  require(!cfg.tasks_index.empty(), "config: tasks_index is required for rank");
  const json index = json::parse(read_file(cfg.tasks_index));
  std::vector<TaskId> tasks;
  for (const auto& entry : index) tasks.push_back(entry.at("id").get<std::string>());

  HttpCompletionClient client(endpoint_settings(cfg));
  std::vector<std::string> warnings;
  const std::vector<TaskId> ranking = rank_tasks_by_prompt(tasks, client, &warnings);

  json out;
  out["ranking"] = ranking;
  out["warnings"] = warnings;
  out["config_digest"] = config_digest(cfg);
  write_file(out_path, out.dump(2) + "\n");
  return ranking;
}

IctMatrix cmd_matrix(const PipelineConfig& cfg, const std::string& records_path,
                     const std::string& out_path) {
  const std::string records_text = read_file(records_path);
  const std::vector<TransferRecord> records = records_from_jsonl(records_text);
  require(!records.empty(), "matrix: no records in " + records_path);

  // Task order: first appearance as a source in the record stream.
  std::vector<TaskId> tasks;
  std::set<TaskId> seen;
  for (const auto& r : records) {
    if (seen.insert(r.source).second) tasks.push_back(r.source);
  }
  for (const auto& r : records) {
    if (seen.insert(r.target).second) tasks.push_back(r.target);
  }

  AggregateOptions opts;
  opts.per_seed_mean = !cfg.flat_mean;
  opts.permissive = cfg.permissive_pairs;
  opts.negate_scores = cfg.negate_scores;
  AggregateResult agg = aggregate_records(records, tasks, opts);

  IctMatrix out = agg.matrix;
  const Normalization target = normalization_from_string(cfg.normalization);
  if (target == Normalization::centered) {
    out = center_columns(out);
  } else if (target == Normalization::zscored) {
    out = zscore_columns(out);
  }

  const std::string csv = ict_to_csv(out);
  write_file(out_path, csv);
  json meta;
  meta["normalization"] = to_string(out.normalization);
  meta["records_digest"] = short_digest(records_text);
  meta["config_digest"] = config_digest(cfg);
  meta["warnings"] = agg.warnings;
  write_file(out_path + ".meta.json", meta.dump(2) + "\n");
  return out;
}

namespace {

IctMatrix normalize_for_selection(const PipelineConfig& cfg, const IctMatrix& matrix) {
  if (matrix.normalization != Normalization::raw) return matrix;
  if (normalization_from_string(cfg.normalization) == Normalization::zscored) {
    return zscore_columns(matrix);
  }
  return center_columns(matrix);
}

SimilarityMatrix kernel_similarity(const PipelineConfig& cfg, const IctMatrix& normalized,
                                   DistanceMetric metric) {
  KernelConfig kc;
  kc.t = cfg.kernel_t;
  kc.absolute_c = cfg.kernel_c;
  kc.standardize_distances = cfg.standardize_distances;
  return distance_to_similarity(pairwise_distance(normalized, metric), kc);
}

LeEmbedding le_from_similarity(const PipelineConfig& cfg, const SimilarityMatrix& s) {
  SimilarityMatrix graph = s;
  if (s.kind != SimilarityKind::dist_kernel) {
    // Cosine similarities can be negative; shift into [0, 2] for the graph.
    graph.values = (s.values.array() + 1.0).matrix();
  }
  const LaplacianMatrix lap = normalized_laplacian(graph);
  int dim = 0;
  if (cfg.le_dim == "eigengap") {
    dim = eigengap_dimension(lap);
  } else {
    dim = std::stoi(cfg.le_dim);
  }
  return le_embed(lap, dim);
}

struct MethodRoute {
  bool bm25 = false;
  bool use_le = false;
  bool kmedoids_route = false;
  std::string km_space;  // raw | sim | le
  DistanceMetric metric = DistanceMetric::euclidean;
  bool cosine_kernel = false;
  SelectionMethod result_method = SelectionMethod::fl_greedy;
};

MethodRoute parse_method(const PipelineConfig& cfg, const std::string& method) {
  MethodRoute r;
  r.metric = distance_metric_from_string(cfg.metric);
  if (method == "bento-sim") return r;
  if (method == "bento-le") { r.use_le = true; return r; }
  if (method == "cheby-sim") { r.metric = DistanceMetric::chebyshev; return r; }
  if (method == "cheby-le") { r.metric = DistanceMetric::chebyshev; r.use_le = true; return r; }
  if (method == "cos-sim") { r.cosine_kernel = true; return r; }
  if (method == "cos-le") { r.cosine_kernel = true; r.use_le = true; return r; }
  if (method == "bm25-sim") { r.bm25 = true; r.result_method = SelectionMethod::bm25_sim; return r; }
  if (method == "bm25-le") {
    r.bm25 = true;
    r.use_le = true;
    r.result_method = SelectionMethod::bm25_le;
    return r;
  }
  if (method == "km-raw" || method == "km-sim" || method == "km-le") {
    r.kmedoids_route = true;
    r.km_space = method.substr(3);
    r.result_method = SelectionMethod::kmedoids;
    return r;
  }
  throw std::invalid_argument("unknown selection method: " + method);
}

}  // namespace

SelectionResult select_from_matrix(const PipelineConfig& cfg, const IctMatrix& matrix, int k) {
  const std::string& method = cfg.method;

  if (method == "random") {
    const auto subsets =
        random_subsets(matrix.size(), static_cast<std::size_t>(k), 1, cfg.seed);
    SelectionResult out;
    out.method = SelectionMethod::random;
    out.k = k;
    for (std::size_t i : subsets[0]) out.selected.push_back(matrix.tasks[i]);
    out.config_digest = config_digest(cfg);
    return out;
  }
  if (method == "prompt-ranked") {
    require(!cfg.ranking_file.empty(), "config: ranking_file is required for prompt-ranked");
    const json j = json::parse(read_file(cfg.ranking_file));
    const auto ranking = j.at("ranking").get<std::vector<TaskId>>();
    SelectionResult out = prompt_ranked_selection(ranking, matrix.tasks, k);
    out.config_digest = config_digest(cfg);
    return out;
  }

  const MethodRoute route = parse_method(cfg, method);
  const IctMatrix normalized = normalize_for_selection(cfg, matrix);

  SelectionResult out;
  if (route.kmedoids_route) {
    DistanceMatrix dist;
    if (route.km_space == "raw") {
      dist = feature_distances(normalized.tasks, normalized.values);
    } else if (route.km_space == "sim") {
      dist = similarity_to_distances(kernel_similarity(cfg, normalized, route.metric));
    } else {
      const LeEmbedding emb =
          le_from_similarity(cfg, kernel_similarity(cfg, normalized, route.metric));
      dist = cosine_distances(emb.tasks, emb.vectors);
    }
    out = kmedoids(dist, k, cfg.seed);
  } else {
    SimilarityMatrix base =
        route.cosine_kernel
            ? cosine_rows(normalized.tasks, normalized.values, SimilarityKind::cosine_rows)
            : kernel_similarity(cfg, normalized, route.metric);
    if (route.use_le) {
      const LeEmbedding emb = le_from_similarity(cfg, base);
      base = cosine_rows(emb.tasks, emb.vectors, SimilarityKind::le_cosine);
    }
    out = fl_greedy(base, k);
    out.method = route.result_method;
  }
  out.config_digest = config_digest(cfg);
  return out;
}

SelectionResult cmd_select(const PipelineConfig& cfg, const std::string& matrix_path,
                           const std::string& out_path) {
  IctMatrix matrix;
  std::string matrix_digest;
  if (cfg.method.rfind("bm25", 0) == 0) {
    require(!cfg.tasks_index.empty() && !cfg.data_dir.empty(),
            "config: tasks_index and data_dir are required for bm25 methods");
    const std::vector<TaskData> suite = load_task_suite(cfg.tasks_index, cfg.data_dir);
    std::vector<TaskId> tasks;
    std::vector<std::string> corpora;
    for (const auto& t : suite) {
      tasks.push_back(t.id);
      std::string corpus = t.instruction;
      for (const auto& ex : t.pool) {
        corpus += '\n';
        corpus += ex.input;
        corpus += '\n';
        corpus += ex.output;
      }
      for (const auto& ex : t.train) {
        corpus += '\n';
        corpus += ex.input;
        corpus += '\n';
        corpus += ex.output;
      }
      corpora.push_back(std::move(corpus));
    }
    Bm25Config bc;
    bc.k1 = cfg.bm25_k1;
    bc.b = cfg.bm25_b;
    bc.symmetrize = cfg.bm25_symmetrize;
    matrix = bm25_matrix(tasks, corpora, bc);
    if (cfg.bm25_center) matrix = center_columns(matrix);
    matrix_digest = short_digest(ict_to_csv(matrix));
  } else {
    const std::string csv = read_file(matrix_path);
    Normalization norm = normalization_from_string(cfg.normalization);
    const std::string meta_path = matrix_path + ".meta.json";
    if (fs::exists(meta_path)) {
      const json meta = json::parse(read_file(meta_path));
      norm = normalization_from_string(meta.at("normalization").get<std::string>());
    }
    matrix = ict_from_csv(csv, norm);
    matrix_digest = short_digest(csv);
  }

  const SelectionResult result = select_from_matrix(cfg, matrix, cfg.k);
  write_file(out_path, selection_to_json(result, matrix_digest));
  return result;
}

PerformanceTable load_performance(const PipelineConfig& cfg, const std::string& path) {
  PerformanceTable table = performance_from_csv(read_file(path));
  if (!cfg.counts_file.empty()) {
    const LabeledTable counts = table_from_csv(read_file(cfg.counts_file));
    require(counts.row_labels.size() == 1, "counts file must have exactly one row");
    const TaskIndex index(counts.col_labels);
    std::vector<std::int64_t> per_task(table.tasks.size(), 0);
    for (std::size_t i = 0; i < table.tasks.size(); ++i) {
      per_task[i] = static_cast<std::int64_t>(
          counts.values(0, static_cast<Eigen::Index>(index.at(table.tasks[i]))));
    }
    table.per_task_example_counts = std::move(per_task);
  }
  return table;
}

EvalReport cmd_evaluate(const PipelineConfig& cfg, const std::string& performance_path,
                        const std::string& selection_path, const std::string& out_path) {
  const PerformanceTable table = load_performance(cfg, performance_path);
  const SelectionResult selection = selection_from_json(read_file(selection_path));
  const EvalReport report = evaluate_subset(
      table, selection.selected, averaging_from_string(cfg.averaging),
      nrmse_variant_from_string(cfg.nrmse_variant), cfg.bootstrap_resamples, cfg.seed);
  write_file(out_path, report_to_json(report, config_digest(cfg)));
  return report;
}

ChordGraph cmd_chord(const PipelineConfig& cfg, const std::string& matrix_path,
                     const std::string& out_prefix) {
  require(cfg.k_clusters >= 2, "config: k_clusters (>= 2) is required for chord export");
  const std::string csv = read_file(matrix_path);
  Normalization norm = normalization_from_string(cfg.normalization);
  const std::string meta_path = matrix_path + ".meta.json";
  if (fs::exists(meta_path)) {
    const json meta = json::parse(read_file(meta_path));
    norm = normalization_from_string(meta.at("normalization").get<std::string>());
  }
  const IctMatrix matrix = ict_from_csv(csv, norm);

  const IctMatrix normalized = normalize_for_selection(cfg, matrix);
  const SimilarityMatrix sim =
      kernel_similarity(cfg, normalized, distance_metric_from_string(cfg.metric));
  const LeEmbedding emb = le_from_similarity(cfg, sim);
  const ClusterAssignment clusters = spectral_cluster(emb, cfg.k_clusters, cfg.seed);

  // Arcs carry the matrix values as loaded (raw ICT for Fig-1-style export).
  const ChordGraph graph = chord_export(matrix, clusters, cfg.top_fraction);
  write_file(out_prefix + ".json", chord_to_json(graph, config_digest(cfg)));
  write_file(out_prefix + ".dot", chord_to_dot(graph));
  return graph;
}

SweepResult cmd_sweep(const PipelineConfig& cfg, const std::string& matrix_path,
                      const std::string& performance_path, const std::string& out_path) {
  const PerformanceTable table = load_performance(cfg, performance_path);
  IctMatrix matrix;
  if (!matrix_path.empty()) {
    Normalization norm = normalization_from_string(cfg.normalization);
    const std::string meta_path = matrix_path + ".meta.json";
    if (fs::exists(meta_path)) {
      const json meta = json::parse(read_file(meta_path));
      norm = normalization_from_string(meta.at("normalization").get<std::string>());
    }
    matrix = ict_from_csv(read_file(matrix_path), norm);
    const TaskIndex idx(table.tasks);
    for (const auto& t : matrix.tasks) {
      require(idx.contains(t), "sweep: task " + t + " missing from performance table");
    }
  }

  SweepResult sweep;
  sweep.k_max = cfg.sweep_k_max > 0 ? cfg.sweep_k_max
                                    : default_sweep_k_max(table.tasks.size());
  const Averaging averaging = averaging_from_string(cfg.averaging);
  const NrmseVariant variant = nrmse_variant_from_string(cfg.nrmse_variant);
  const Eigen::VectorXd full = predict_performance(table, table.tasks, averaging);

  for (const std::string& method : cfg.sweep_methods) {
    SweepRow row;
    row.method = method;
    for (int k = 1; k <= sweep.k_max; ++k) {
      double value = 0.0;
      if (method == "random") {
        value = random_baseline_nrmse(table, k, cfg.random_trials, cfg.seed, averaging, variant);
      } else {
        require(matrix.size() > 0, "sweep: method " + method + " needs an ICT matrix");
        PipelineConfig method_cfg = cfg;
        method_cfg.method = method;
        const SelectionResult sel = select_from_matrix(method_cfg, matrix, k);
        value = nrmse(predict_performance(table, sel.selected, averaging), full, variant);
      }
      row.nrmse_per_k.push_back(value);
    }
    row.best = *std::min_element(row.nrmse_per_k.begin(), row.nrmse_per_k.end());
    sweep.rows.push_back(std::move(row));
  }

  json out;
  out["k_max"] = sweep.k_max;
  out["config_digest"] = config_digest(cfg);
  out["rows"] = json::array();
  for (const auto& row : sweep.rows) {
    out["rows"].push_back(
        {{"method", row.method}, {"nrmse_per_k", row.nrmse_per_k}, {"best", row.best}});
  }
  write_file(out_path, out.dump(2) + "\n");
  return sweep;
}

std::string render_sweep_table(const SweepResult& sweep) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "method" << std::right << std::setw(8) << "best";
  for (int k = 1; k <= sweep.k_max; ++k) {
    out << std::setw(8) << ("k=" + std::to_string(k));
  }
  out << "\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& row : sweep.rows) {
    out << std::left << std::setw(14) << row.method << std::right << std::setw(8) << row.best;
    for (double v : row.nrmse_per_k) {
      out << std::setw(8) << v;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace bento
