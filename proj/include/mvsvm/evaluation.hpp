#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvsvm/types.hpp"

namespace mvsvm {

// The three OLID sub-tasks: offensive-vs-not, targeted-vs-untargeted,
// target category. Lower levels are annotated only inside their parent
// class (B inside A=OFF, C inside B=TIN).
enum class TaskId { A, B, C };

TaskId task_from_name(const std::string& name);
std::string task_name(TaskId task);

// Fixed class set per task, sorted so index order matches the
// lexicographic tie-break convention.
const std::vector<std::string>& task_classes(TaskId task);

struct DatasetRow {
  Tweet tweet;
  std::optional<std::string> label_a;
  std::optional<std::string> label_b;
  std::optional<std::string> label_c;

  const std::optional<std::string>& label(TaskId task) const {
    switch (task) {
      case TaskId::A: return label_a;
      case TaskId::B: return label_b;
      default: return label_c;
    }
  }
};

struct Dataset {
  std::vector<DatasetRow> rows;
};

// Parses the OLID TSV (`id  tweet  subtask_a  subtask_b  subtask_c`,
// literal NULL for absent labels) and enforces the hierarchy
// invariants. Malformed rows report their line number; hierarchy
// violations list the offending ids.
Dataset load_olid(const std::string& path);

struct EvalReport {
  std::vector<std::string> classes;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_f1 = 0.0;
  std::vector<std::vector<int64_t>> confusion;  // [gold][pred]
  size_t n = 0;

  std::string to_table() const;
  std::string to_kv() const;
};

// Per-class precision/recall/F1 with the 0/0 -> 0 convention, macro
// averaged over the full class_set (absent classes score 0).
EvalReport macro_f1(std::span<const std::string> gold,
                    std::span<const std::string> pred,
                    std::span<const std::string> class_set);

enum class GateMode { GoldGated, Cascade };

GateMode gate_mode_from_name(const std::string& name);
std::string gate_mode_name(GateMode mode);

}  // namespace mvsvm
