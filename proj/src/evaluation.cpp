#include "mvsvm/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mvsvm {

TaskId task_from_name(const std::string& name) {
  if (name == "A" || name == "a") return TaskId::A;
  if (name == "B" || name == "b") return TaskId::B;
  if (name == "C" || name == "c") return TaskId::C;
  throw Error("unknown task: " + name);
}

std::string task_name(TaskId task) {
  switch (task) {
    case TaskId::A: return "A";
    case TaskId::B: return "B";
    default: return "C";
  }
}

const std::vector<std::string>& task_classes(TaskId task) {
  static const std::vector<std::string> a = {"NOT", "OFF"};
  static const std::vector<std::string> b = {"TIN", "UNT"};
  static const std::vector<std::string> c = {"GRP", "IND", "OTH"};
  switch (task) {
    case TaskId::A: return a;
    case TaskId::B: return b;
    default: return c;
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::optional<std::string> parse_label(const std::string& field, TaskId task,
                                       size_t lineno, const std::string& path) {
  if (field == "NULL") return std::nullopt;
  const auto& classes = task_classes(task);
  if (std::find(classes.begin(), classes.end(), field) == classes.end())
    throw Error(path + ": line " + std::to_string(lineno) +
                ": invalid subtask_" + task_name(task) + " label '" + field +
                "'");
  return field;
}

}  // namespace

Dataset load_olid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c")
    throw Error(path + ": unexpected header '" + line + "'");

  Dataset data;
  std::unordered_set<std::string> ids;
  std::vector<std::string> hierarchy_violations;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 5)
      throw Error(path + ": line " + std::to_string(lineno) + ": expected 5 " +
                  "tab-separated fields, got " + std::to_string(fields.size()));
    DatasetRow row;
    row.tweet.id = fields[0];
    row.tweet.text = fields[1];
    if (row.tweet.id.empty())
      throw Error(path + ": line " + std::to_string(lineno) + ": empty id");
    if (!ids.insert(row.tweet.id).second)
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": duplicate id '" + row.tweet.id + "'");
    row.label_a = parse_label(fields[2], TaskId::A, lineno, path);
    row.label_b = parse_label(fields[3], TaskId::B, lineno, path);
    row.label_c = parse_label(fields[4], TaskId::C, lineno, path);
    const bool b_ok = !row.label_b.has_value() || row.label_a == "OFF";
    const bool c_ok = !row.label_c.has_value() || row.label_b == "TIN";
    if (!b_ok || !c_ok) hierarchy_violations.push_back(row.tweet.id);
    data.rows.push_back(std::move(row));
  }
  if (!hierarchy_violations.empty()) {
    std::string msg = path + ": hierarchy violation for ids:";
    for (const auto& id : hierarchy_violations) msg += " " + id;
    throw Error(msg);
  }
  return data;
}

EvalReport macro_f1(std::span<const std::string> gold,
                    std::span<const std::string> pred,
                    std::span<const std::string> class_set) {
  if (gold.size() != pred.size())
    throw Error("macro_f1: gold/pred length mismatch");
  if (gold.empty()) throw Error("macro_f1: empty input");

  std::unordered_map<std::string, size_t> idx;
  for (size_t k = 0; k < class_set.size(); ++k) idx[class_set[k]] = k;

  EvalReport rep;
  rep.classes.assign(class_set.begin(), class_set.end());
  const size_t k = class_set.size();
  rep.confusion.assign(k, std::vector<int64_t>(k, 0));
  rep.n = gold.size();
  for (size_t i = 0; i < gold.size(); ++i) {
    const auto g = idx.find(gold[i]);
    const auto p = idx.find(pred[i]);
    if (g == idx.end())
      throw Error("macro_f1: gold label '" + gold[i] + "' not in class set");
    if (p == idx.end())
      throw Error("macro_f1: predicted label '" + pred[i] +
                  "' not in class set");
    ++rep.confusion[g->second][p->second];
  }

  rep.precision.assign(k, 0.0);
  rep.recall.assign(k, 0.0);
  rep.f1.assign(k, 0.0);
  double sum_f1 = 0.0;
  for (size_t c = 0; c < k; ++c) {
    const int64_t tp = rep.confusion[c][c];
    int64_t fp = 0, fn = 0;
    for (size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += rep.confusion[o][c];
      fn += rep.confusion[c][o];
    }
    if (tp + fp > 0) rep.precision[c] = double(tp) / double(tp + fp);
    if (tp + fn > 0) rep.recall[c] = double(tp) / double(tp + fn);
    if (rep.precision[c] + rep.recall[c] > 0.0)
      rep.f1[c] = 2.0 * rep.precision[c] * rep.recall[c] /
                  (rep.precision[c] + rep.recall[c]);
    sum_f1 += rep.f1[c];
  }
  rep.macro_f1 = sum_f1 / double(k);
  return rep;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %9s %9s %9s\n", "class", "prec", "rec",
                "f1");
  out << buf;
  for (size_t c = 0; c < classes.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%-8s %9.4f %9.4f %9.4f\n",
                  classes[c].c_str(), precision[c], recall[c], f1[c]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-8s %29.4f\n", "macro", macro_f1);
  out << buf;
  std::snprintf(buf, sizeof(buf), "n = %zu\n", n);
  out << buf;
  return out.str();
}

std::string EvalReport::to_kv() const {
  std::ostringstream out;
  char buf[128];
  for (size_t c = 0; c < classes.size(); ++c) {
    std::snprintf(buf, sizeof(buf),
                  "precision_%s=%.6f\nrecall_%s=%.6f\nf1_%s=%.6f\n",
                  classes[c].c_str(), precision[c], classes[c].c_str(),
                  recall[c], classes[c].c_str(), f1[c]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "macro_f1=%.6f\nn=%zu\n", macro_f1, n);
  out << buf;
  return out.str();
}

GateMode gate_mode_from_name(const std::string& name) {
  if (name == "gold-gated") return GateMode::GoldGated;
  if (name == "cascade") return GateMode::Cascade;
  throw Error("unknown gating mode: " + name + " (use gold-gated or cascade)");
}

std::string gate_mode_name(GateMode mode) {
  return mode == GateMode::GoldGated ? "gold-gated" : "cascade";
}

}  // namespace mvsvm
