#include "bento/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace bento {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

void check_label(const std::string& label) {
  if (label.empty()) {
    throw std::invalid_argument("csv: empty label");
  }
  if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos) {
    throw std::invalid_argument("csv: label contains ',' or newline: " + label);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) {
    throw std::runtime_error("format_double: to_chars failed");
  }
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::invalid_argument("csv: not a number: '" + s + "'");
  }
  return v;
}

std::string table_to_csv(const std::vector<std::string>& row_labels,
                         const std::vector<TaskId>& col_labels,
                         const Eigen::MatrixXd& values) {
  if (values.rows() != static_cast<Eigen::Index>(row_labels.size()) ||
      values.cols() != static_cast<Eigen::Index>(col_labels.size())) {
    throw std::invalid_argument("csv: label/value shape mismatch");
  }
  std::string out = "model";
  for (const auto& c : col_labels) {
    check_label(c);
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    check_label(row_labels[r]);
    out += row_labels[r];
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out += ',';
      out += format_double(values(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  return out;
}

LabeledTable table_from_csv(const std::string& csv) {
  const auto lines = split_lines(csv);
  if (lines.empty()) {
    throw std::invalid_argument("csv: empty input");
  }
  const auto header = split_line(lines[0]);
  if (header.size() < 2) {
    throw std::invalid_argument("csv: header must name at least one column");
  }
  LabeledTable t;
  t.col_labels.assign(header.begin() + 1, header.end());
  const std::size_t ncols = t.col_labels.size();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_line(lines[i]);
    if (fields.size() != ncols + 1) {
      throw std::invalid_argument("csv: row " + std::to_string(i) + " has " +
                                  std::to_string(fields.size() - 1) + " values, expected " +
                                  std::to_string(ncols));
    }
    t.row_labels.push_back(fields[0]);
    std::vector<double> row(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      row[c] = parse_double(fields[c + 1]);
    }
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return t;
}

std::string matrix_to_csv(const std::vector<TaskId>& tasks, const Eigen::MatrixXd& values) {
  if (values.rows() != values.cols() ||
      values.rows() != static_cast<Eigen::Index>(tasks.size())) {
    throw std::invalid_argument("csv: matrix must be square and match task list");
  }
  std::string out = "task";
  for (const auto& t : tasks) {
    check_label(t);
    out += ',';
    out += t;
  }
  out += '\n';
  for (std::size_t r = 0; r < tasks.size(); ++r) {
    out += tasks[r];
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out += ',';
      out += format_double(values(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  return out;
}

LabeledMatrix matrix_from_csv(const std::string& csv) {
  LabeledTable t = table_from_csv(csv);
  if (t.row_labels.size() != t.col_labels.size()) {
    throw std::invalid_argument("csv: matrix must be square");
  }
  for (std::size_t i = 0; i < t.row_labels.size(); ++i) {
    if (t.row_labels[i] != t.col_labels[i]) {
      throw std::invalid_argument("csv: matrix row/column task order mismatch at index " +
                                  std::to_string(i));
    }
  }
  return LabeledMatrix{std::move(t.col_labels), std::move(t.values)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path);
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace bento
