#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvsvm/evaluation.hpp"
#include "mvsvm/features.hpp"
#include "mvsvm/linear_svm.hpp"
#include "mvsvm/types.hpp"

namespace mvsvm {

// One stacked view: a word n-gram classifier fit by this library, or a
// per-tweet score file produced by an out-of-pipeline model.
struct ViewSpec {
  enum class Kind { Ngram, External };
  Kind kind = Kind::Ngram;
  int n_min = 1;  // ngram views; 1 <= n_min <= n_max <= 6
  int n_max = 1;
  std::string name;  // external views: tag naming the score source
  Reg reg = Reg::L2;
  double C = 1e-5;
};

// The six cumulative word (1,n) n-gram views, n = 1..6.
std::vector<ViewSpec> default_view_specs(Reg reg, double C);

// Probability rows keyed by tweet id, as supplied by an external
// model. Binary tasks use one column (positive-class probability);
// task C uses one column per class in class order.
class ExternalScores {
public:
  static ExternalScores load(const std::string& path);

  int cols() const { return cols_; }
  size_t size() const { return rows_.size(); }
  bool has(const std::string& id) const { return rows_.count(id) != 0; }
  // Throws when the id is absent.
  const std::vector<double>& row(const std::string& id) const;

private:
  int cols_ = 0;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

// A trained n-gram view: its feature space, classifier, and sigmoid.
struct View {
  ViewSpec spec;
  Vocabulary vocab;
  LinearModel model;
  PlattCalibrator calib;
};

// The stacked ensemble: trained views in fixed order, an optional
// external-view slot, and the meta classifier over their concatenated
// probability outputs.
struct EnsembleModel {
  TaskId task = TaskId::A;
  std::vector<View> views;
  int external_dim = 0;        // 0 = no external view
  std::string external_name;   // empty iff external_dim == 0
  LinearModel meta;
  PlattCalibrator meta_calib;

  // Meta-feature columns each trained view contributes: 1 for binary
  // tasks (positive-class probability), one per class for task C.
  int cols_per_view() const;
  int meta_dim() const;

  void save(const std::string& dir) const;
  static EnsembleModel load(const std::string& dir);
};

struct EnsembleTrainOptions {
  TaskId task = TaskId::A;
  std::vector<ViewSpec> view_specs;  // at most one external entry
  Reg meta_reg = Reg::L2;
  double meta_C = 1e-5;
  int k_folds = 5;
  int min_df = 2;
  double tol = 1e-4;
  int max_iter = 1000;
  uint64_t seed = 0;
};

// Deterministic stratified fold assignment: each label's indices are
// shuffled with the seeded generator, then dealt round-robin so every
// fold holds near-equal counts of every class.
std::vector<int> stratified_folds(std::span<const std::string> labels, int k,
                                  uint64_t seed);

// Concatenated meta feature for one tweet: per view (in order), the
// calibrated positive-class probability (binary) or all class
// probabilities (task C); then the external score row when the model
// carries an external slot.
SparseVector build_meta_features(const EnsembleModel& model,
                                 const TokenStream& tokens,
                                 const ExternalScores* external);

// Captured during training for leakage checks: the fold each training
// row fell in and the out-of-fold meta-feature rows the meta
// classifier was fit on.
struct EnsembleTrainDiagnostics {
  std::vector<int> fold_of;
  std::vector<std::vector<double>> meta_rows;
};

// Fits every view on the full corpus for deployment while producing
// the meta-training features out-of-fold: each row's view
// probabilities come from per-fold models (vocabulary, classifier and
// sigmoid all fit with that row's fold held out). Deployed view
// calibrators are then fit on the pooled out-of-fold decisions, so no
// instance calibrates a sigmoid applied to itself at meta-training
// time. External scores are used as given.
EnsembleModel train_ensemble(std::span<const TokenStream> corpus,
                             std::span<const std::string> labels,
                             const EnsembleTrainOptions& opts,
                             const ExternalScores* external = nullptr,
                             EnsembleTrainDiagnostics* diag = nullptr);

struct EnsemblePrediction {
  std::string label;
  std::vector<double> proba;  // aligned with meta.classes()
};

// Applies the deployed views directly (no cross-fitting at inference)
// and takes the meta argmax; ties resolve to the lexicographically
// smallest class.
EnsemblePrediction predict(const EnsembleModel& model,
                           const TokenStream& tokens,
                           const ExternalScores* external = nullptr);

// id -> predicted label, in dataset row order, for one sub-task.
struct TaskPredictions {
  std::vector<std::pair<std::string, std::string>> rows;
};

struct CascadePredictions {
  TaskPredictions a, b, c;
};

// Runs the sub-task hierarchy over one dataset. tokens[i] must be the
// preprocessed stream for data.rows[i]. Task A predicts every row;
// task B only rows whose gate label is OFF and task C only rows whose
// gate label is TIN, where the gate is the upper task's gold label
// (GoldGated) or its prediction from this run (Cascade). Models for B
// and C may be null to stop the cascade early.
CascadePredictions cascade_predict(
    const EnsembleModel* model_a, const EnsembleModel* model_b,
    const EnsembleModel* model_c, const Dataset& data,
    std::span<const TokenStream> tokens, const ExternalScores* ext_a,
    const ExternalScores* ext_b, const ExternalScores* ext_c, GateMode mode);

}  // namespace mvsvm
