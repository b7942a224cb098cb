#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "bento/types.hpp"

namespace bento {

enum class Normalization { raw, centered, zscored };

const char* to_string(Normalization n);
Normalization normalization_from_string(const std::string& s);

/// In-context transferability matrix. Row = source task, column = target
/// task; rows of the normalized matrix serve as task embedding vectors.
struct IctMatrix {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
  Normalization normalization = Normalization::raw;

  std::size_t size() const { return tasks.size(); }
};

struct AggregateOptions {
  /// Mean over questions within a seed, then mean over seeds (default).
  /// When false, a flat mean over all records of the pair; the two differ
  /// only when per-seed question counts differ.
  bool per_seed_mean = true;
  /// Impute missing (source, target) pairs with the column mean instead of
  /// failing; each imputation emits a warning.
  bool permissive = false;
  /// Flip score sign at ingestion, for lower-is-better metrics.
  bool negate_scores = false;
};

struct AggregateResult {
  IctMatrix matrix;
  std::vector<std::string> warnings;
};

/// Builds the raw ICT matrix from scored transfer records. Every
/// (source, target) pair in tasks x tasks needs at least one record unless
/// `permissive` is set; scores must be finite.
AggregateResult aggregate_records(const std::vector<TransferRecord>& records,
                                  const std::vector<TaskId>& tasks,
                                  const AggregateOptions& opts = {});

/// Zero-centers each column. Accepts raw input only.
IctMatrix center_columns(const IctMatrix& m);

/// Zero-centers each column and divides by its population standard
/// deviation. Fails on zero-variance columns, naming the task.
IctMatrix zscore_columns(const IctMatrix& m);

// Record ingestion: newline-delimited JSON with fields
// source, target, seed, question_id, score.
std::string records_to_jsonl(const std::vector<TransferRecord>& records);
std::vector<TransferRecord> records_from_jsonl(const std::string& text);

std::string ict_to_csv(const IctMatrix& m);
IctMatrix ict_from_csv(const std::string& csv, Normalization normalization = Normalization::raw);

}  // namespace bento
