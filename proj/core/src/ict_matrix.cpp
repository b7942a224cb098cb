#include "bento/ict_matrix.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bento/csv.hpp"

namespace bento {

using nlohmann::json;

const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::raw: return "raw";
    case Normalization::centered: return "centered";
    case Normalization::zscored: return "zscored";
  }
  return "raw";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "raw") return Normalization::raw;
  if (s == "centered") return Normalization::centered;
  if (s == "zscored") return Normalization::zscored;
  throw std::invalid_argument("unknown normalization: " + s);
}

AggregateResult aggregate_records(const std::vector<TransferRecord>& records,
                                  const std::vector<TaskId>& tasks,
                                  const AggregateOptions& opts) {
  if (tasks.size() < 2) {
    throw std::invalid_argument("aggregate_records: need at least 2 tasks");
  }
  const TaskIndex index(tasks);
  const std::size_t n = tasks.size();

  // cell -> seed -> scores. std::map keeps aggregation independent of record
  // order so the result is permutation-invariant.
  std::vector<std::map<std::uint32_t, std::vector<double>>> cells(n * n);
  std::vector<std::map<std::uint32_t, std::map<std::string, bool>>> seen(n * n);

  for (const auto& r : records) {
    if (!std::isfinite(r.score)) {
      std::ostringstream msg;
      msg << "aggregate_records: non-finite score for (" << r.source << ", " << r.target
          << ", seed " << r.seed << ", question " << r.question_id << ")";
      throw std::invalid_argument(msg.str());
    }
    const std::size_t i = index.at(r.source);
    const std::size_t j = index.at(r.target);
    auto& dup = seen[i * n + j][r.seed];
    if (!dup.emplace(r.question_id, true).second) {
      throw std::invalid_argument("aggregate_records: duplicate record for (" + r.source +
                                  ", " + r.target + ", seed " + std::to_string(r.seed) +
                                  ", question " + r.question_id + ")");
    }
    const double score = opts.negate_scores ? -r.score : r.score;
    cells[i * n + j][r.seed].push_back(score);
  }

  AggregateResult result;
  result.matrix.tasks = tasks;
  result.matrix.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  result.matrix.normalization = Normalization::raw;

  std::vector<std::pair<std::size_t, std::size_t>> missing;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& by_seed = cells[i * n + j];
      if (by_seed.empty()) {
        missing.emplace_back(i, j);
        result.matrix.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double value = 0.0;
      if (opts.per_seed_mean) {
        for (const auto& [seed, scores] : by_seed) {
          double s = 0.0;
          for (double x : scores) s += x;
          value += s / static_cast<double>(scores.size());
        }
        value /= static_cast<double>(by_seed.size());
      } else {
        double s = 0.0;
        std::size_t count = 0;
        for (const auto& [seed, scores] : by_seed) {
          for (double x : scores) s += x;
          count += scores.size();
        }
        value = s / static_cast<double>(count);
      }
      result.matrix.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    }
  }

  if (!missing.empty()) {
    if (!opts.permissive) {
      std::ostringstream msg;
      msg << "aggregate_records: missing (source, target) pairs:";
      for (const auto& [i, j] : missing) {
        msg << " (" << tasks[i] << ", " << tasks[j] << ")";
      }
      throw std::invalid_argument(msg.str());
    }
    // Impute with the column mean over present entries.
    for (const auto& [i, j] : missing) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = result.matrix.values(static_cast<Eigen::Index>(r),
                                              static_cast<Eigen::Index>(j));
        if (std::isfinite(v)) {
          sum += v;
          ++count;
        }
      }
      if (count == 0) {
        throw std::invalid_argument("aggregate_records: column " + tasks[j] +
                                    " has no records at all; cannot impute");
      }
      result.matrix.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sum / static_cast<double>(count);
      result.warnings.push_back("imputed (" + tasks[i] + ", " + tasks[j] +
                                ") with column mean");
    }
  }
  return result;
}

IctMatrix center_columns(const IctMatrix& m) {
  if (m.normalization != Normalization::raw) {
    throw std::invalid_argument(std::string("center_columns: matrix already normalized (") +
                                to_string(m.normalization) + ")");
  }
  IctMatrix out = m;
  const Eigen::RowVectorXd means = m.values.colwise().mean();
  out.values = m.values.rowwise() - means;
  out.normalization = Normalization::centered;
  return out;
}

IctMatrix zscore_columns(const IctMatrix& m) {
  if (m.normalization != Normalization::raw) {
    throw std::invalid_argument(std::string("zscore_columns: matrix already normalized (") +
                                to_string(m.normalization) + ")");
  }
  IctMatrix out = m;
  const Eigen::Index n = m.values.rows();
  const Eigen::RowVectorXd means = m.values.colwise().mean();
  Eigen::MatrixXd centered = m.values.rowwise() - means;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double var = centered.col(j).squaredNorm() / static_cast<double>(n);
    const double std_dev = std::sqrt(var);
    if (std_dev == 0.0) {
      throw std::invalid_argument("zscore_columns: zero-variance column for task " +
                                  m.tasks[static_cast<std::size_t>(j)]);
    }
    centered.col(j) /= std_dev;
  }
  out.values = std::move(centered);
  out.normalization = Normalization::zscored;
  return out;
}

std::string records_to_jsonl(const std::vector<TransferRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json line;
    line["source"] = r.source;
    line["target"] = r.target;
    line["seed"] = r.seed;
    line["question_id"] = r.question_id;
    line["score"] = r.score;
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<TransferRecord> records_from_jsonl(const std::string& text) {
  std::vector<TransferRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("records line " + std::to_string(lineno) + ": " + e.what());
    }
    TransferRecord r;
    r.source = j.at("source").get<std::string>();
    r.target = j.at("target").get<std::string>();
    r.seed = j.at("seed").get<std::uint32_t>();
    r.question_id = j.at("question_id").get<std::string>();
    r.score = j.at("score").get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

std::string ict_to_csv(const IctMatrix& m) { return matrix_to_csv(m.tasks, m.values); }

IctMatrix ict_from_csv(const std::string& csv, Normalization normalization) {
  LabeledMatrix lm = matrix_from_csv(csv);
  IctMatrix m;
  m.tasks = std::move(lm.tasks);
  m.values = std::move(lm.values);
  m.normalization = normalization;
  if (m.tasks.size() < 2) {
    throw std::invalid_argument("ict_from_csv: need at least 2 tasks");
  }
  return m;
}

}  // namespace bento
