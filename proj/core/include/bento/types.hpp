#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bento {

/// Benchmark task name, unique within a benchmark's task list.
using TaskId = std::string;

/// One scored transfer-ICL trial: exemplars from `source`, a question from
/// `target`, under exemplar-sampling repetition `seed`.
struct TransferRecord {
  TaskId source;
  TaskId target;
  std::uint32_t seed = 0;
  std::string question_id;
  double score = 0.0;  // larger = better transfer (perplexity is negated upstream)
};

/// Maps task ids to their position in an ordered task list.
class TaskIndex {
 public:
  TaskIndex() = default;
  explicit TaskIndex(const std::vector<TaskId>& tasks) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].empty()) {
        throw std::invalid_argument("task id must be non-empty");
      }
      auto [it, inserted] = index_.emplace(tasks[i], i);
      if (!inserted) {
        throw std::invalid_argument("duplicate task id: " + tasks[i]);
      }
    }
  }

  std::size_t at(const TaskId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
      throw std::invalid_argument("unknown task id: " + id);
    }
    return it->second;
  }

  bool contains(const TaskId& id) const { return index_.count(id) != 0; }
  std::size_t size() const { return index_.size(); }

 private:
  std::unordered_map<TaskId, std::size_t> index_;
};

}  // namespace bento
