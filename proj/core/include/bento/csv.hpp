#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bento/types.hpp"

namespace bento {

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

/// Strict double parse; throws on trailing garbage or non-numeric input.
double parse_double(const std::string& s);

/// Square matrix CSV: header row `task,<id>...`, one row per source task.
/// Round-trips losslessly (format_double is exact).
std::string matrix_to_csv(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& values);

struct LabeledMatrix {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd values;
};

LabeledMatrix matrix_from_csv(const std::string& csv);

/// Rectangular table CSV: header `model,<task>...`, one row per model.
std::string table_to_csv(const std::vector<std::string>& row_labels,
                         const std::vector<TaskId>& col_labels,
                         const Eigen::MatrixXd& values);

struct LabeledTable {
  std::vector<std::string> row_labels;
  std::vector<TaskId> col_labels;
  Eigen::MatrixXd values;
};

LabeledTable table_from_csv(const std::string& csv);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace bento
