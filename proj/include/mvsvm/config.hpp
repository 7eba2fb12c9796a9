#pragma once

#include <cstdint>
#include <string>

#include "mvsvm/evaluation.hpp"
#include "mvsvm/linear_svm.hpp"

namespace mvsvm {

// One reproducible run, read from a flat key=value file. Every field
// has a usable default except the paths, which stay empty until the
// config or a command-line flag supplies them.
struct RunConfig {
  TaskId task = TaskId::A;
  int views = 6;              // cumulative (1,n) n-gram views, n = 1..views
  Reg reg = Reg::L2;          // applied to every view classifier
  double C = 1e-5;            // view classifier penalty
  Reg meta_reg = Reg::L2;
  double meta_C = 1e-5;
  int k_folds = 5;
  int min_df = 2;
  double tol = 1e-4;
  int max_iter = 1000;
  uint64_t seed = 0;
  GateMode mode = GateMode::GoldGated;
  std::string external_name;  // empty = no external view

  std::string train;
  std::string dev;
  std::string test;
  std::string external_train;
  std::string external_dev;
  std::string external_test;
  std::string emoji_map;
  std::string emoticons;
  std::string unigrams;
  std::string bigrams;
  std::string model_dir;

  // Throws unless 0 <= views <= 6 with a view or external configured,
  // C/meta_C/tol > 0, k_folds >= 2, min_df >= 1, max_iter >= 1.
  void validate() const;
};

// Parses `key = value` lines ('#' lines and blank lines ignored);
// unknown keys are errors so typos cannot silently fall back to
// defaults.
RunConfig load_config(const std::string& path);

// Applies one key=value assignment (shared by the file parser and
// flag overrides).
void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace mvsvm
