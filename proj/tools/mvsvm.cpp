// Command-line front end: preprocess / train / predict / evaluate,
// driven by a flat key=value config with flag overrides.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvsvm/config.hpp"
#include "mvsvm/ensemble.hpp"
#include "mvsvm/evaluation.hpp"
#include "mvsvm/preprocess.hpp"

namespace {

using mvsvm::Error;

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream ss(text);
  std::string t;
  while (ss >> t) tokens.push_back(std::move(t));
  return tokens;
}

std::string join_ws(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

void require_path(const std::string& value, const std::string& key,
                  const std::string& flag) {
  if (value.empty())
    throw Error(key + " path required (set `" + key + "` in the config or " +
                "pass " + flag + ")");
}

// Tracks string-typed flag values so present flags can override the
// config through the shared key=value path.
class Overrides {
public:
  std::string* slot(const std::string& key) {
    return &values_[key];
  }
  void apply(CLI::App* cmd, mvsvm::RunConfig& config) const {
    for (const auto& [key, value] : values_) {
      if (cmd->count("--" + flag_name(key)))
        mvsvm::apply_config_entry(config, key, value);
    }
  }
  static std::string flag_name(std::string key) {
    for (char& c : key)
      if (c == '_') c = '-';
    return key;
  }

private:
  std::map<std::string, std::string> values_;
};

void add_override(CLI::App* cmd, Overrides& ov, const std::string& key,
                  const std::string& help) {
  cmd->add_option("--" + Overrides::flag_name(key), *ov.slot(key), help);
}

mvsvm::RunConfig make_config(const std::string& config_path, CLI::App* cmd,
                             const Overrides& ov) {
  mvsvm::RunConfig config;
  if (!config_path.empty()) config = mvsvm::load_config(config_path);
  ov.apply(cmd, config);
  return config;
}

std::string serialize_label(const std::optional<std::string>& label) {
  return label ? *label : "NULL";
}

// --- preprocess ------------------------------------------------------

int cmd_preprocess(const mvsvm::RunConfig& config, const std::string& in_path,
                   const std::string& out_path) {
  require_path(config.emoji_map, "emoji_map", "--emoji-map");
  require_path(config.emoticons, "emoticons", "--emoticons");
  require_path(config.unigrams, "unigrams", "--unigrams");
  require_path(config.bigrams, "bigrams", "--bigrams");

  const mvsvm::EmojiMap emoji = mvsvm::EmojiMap::load(config.emoji_map);
  const mvsvm::EmoticonSet emoticons =
      mvsvm::EmoticonSet::load(config.emoticons);
  const mvsvm::SegmentationModel seg =
      mvsvm::SegmentationModel::load(config.unigrams, config.bigrams);
  const mvsvm::Preprocessor pre(&emoji, &emoticons, &seg);

  const mvsvm::Dataset data = mvsvm::load_olid(in_path);
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  out << "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";
  for (const auto& row : data.rows) {
    const mvsvm::TokenStream tokens = pre.run(row.tweet);
    out << row.tweet.id << '\t' << join_ws(tokens.tokens) << '\t'
        << serialize_label(row.label_a) << '\t'
        << serialize_label(row.label_b) << '\t'
        << serialize_label(row.label_c) << '\n';
  }
  out.close();
  if (!out) throw Error("failed writing " + out_path);
  std::cerr << "preprocessed " << data.rows.size() << " rows -> " << out_path
            << "\n";
  return 0;
}

// --- train -----------------------------------------------------------

struct TaskData {
  std::vector<mvsvm::TokenStream> tokens;
  std::vector<std::string> labels;
};

// Rows annotated for the task; the tweet column is expected to hold
// preprocessed space-joined tokens (the `preprocess` output).
TaskData task_rows(const mvsvm::Dataset& data, mvsvm::TaskId task) {
  TaskData td;
  for (const auto& row : data.rows) {
    const auto& label = row.label(task);
    if (!label) continue;
    td.tokens.push_back(
        mvsvm::TokenStream{split_ws(row.tweet.text), row.tweet.id});
    td.labels.push_back(*label);
  }
  return td;
}

int cmd_train(const mvsvm::RunConfig& config) {
  config.validate();
  require_path(config.train, "train", "--train");
  require_path(config.model_dir, "model_dir", "--model-dir");

  const mvsvm::Dataset train_data = mvsvm::load_olid(config.train);
  const TaskData train = task_rows(train_data, config.task);
  if (train.tokens.empty())
    throw Error(config.train + ": no rows annotated for task " +
                mvsvm::task_name(config.task));

  mvsvm::EnsembleTrainOptions opts;
  opts.task = config.task;
  opts.view_specs = mvsvm::default_view_specs(config.reg, config.C);
  opts.view_specs.resize(static_cast<size_t>(config.views));
  opts.meta_reg = config.meta_reg;
  opts.meta_C = config.meta_C;
  opts.k_folds = config.k_folds;
  opts.min_df = config.min_df;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  opts.seed = config.seed;

  mvsvm::ExternalScores ext_train;
  const bool has_external = !config.external_name.empty();
  if (has_external) {
    require_path(config.external_train, "external_train", "--external-train");
    ext_train = mvsvm::ExternalScores::load(config.external_train);
    mvsvm::ViewSpec ext_spec;
    ext_spec.kind = mvsvm::ViewSpec::Kind::External;
    ext_spec.name = config.external_name;
    opts.view_specs.push_back(std::move(ext_spec));
  }

  const mvsvm::EnsembleModel model = mvsvm::train_ensemble(
      train.tokens, train.labels, opts, has_external ? &ext_train : nullptr);
  model.save(config.model_dir);
  std::cerr << "trained task " << mvsvm::task_name(config.task) << " on "
            << train.tokens.size() << " rows -> " << config.model_dir << "\n";

  if (!config.dev.empty()) {
    const mvsvm::Dataset dev_data = mvsvm::load_olid(config.dev);
    const TaskData dev = task_rows(dev_data, config.task);
    if (dev.tokens.empty())
      throw Error(config.dev + ": no rows annotated for task " +
                  mvsvm::task_name(config.task));
    mvsvm::ExternalScores ext_dev;
    if (has_external) {
      require_path(config.external_dev, "external_dev", "--external-dev");
      ext_dev = mvsvm::ExternalScores::load(config.external_dev);
    }
    std::vector<std::string> pred;
    pred.reserve(dev.tokens.size());
    for (const auto& tokens : dev.tokens)
      pred.push_back(
          mvsvm::predict(model, tokens, has_external ? &ext_dev : nullptr)
              .label);
    const mvsvm::EvalReport report = mvsvm::macro_f1(
        dev.labels, pred, mvsvm::task_classes(config.task));
    std::cout << "dev report (task " << mvsvm::task_name(config.task)
              << ", n = " << dev.tokens.size() << ")\n"
              << report.to_table();
  }
  return 0;
}

// --- predict ---------------------------------------------------------

std::map<std::string, std::string> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions: " + path);
  std::map<std::string, std::string> pred;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": expected id<TAB>label");
    const std::string id = line.substr(0, tab);
    if (!pred.emplace(id, line.substr(tab + 1)).second)
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": duplicate id '" + id + "'");
  }
  return pred;
}

int cmd_predict(const mvsvm::RunConfig& config, const std::string& model_dir,
                const std::string& in_path, const std::string& out_path,
                const std::string& external_path,
                const std::string& gate_pred_path) {
  const mvsvm::EnsembleModel model = mvsvm::EnsembleModel::load(model_dir);
  const mvsvm::Dataset data = mvsvm::load_olid(in_path);

  mvsvm::ExternalScores ext;
  std::string ext_path = external_path;
  if (ext_path.empty()) ext_path = config.external_test;
  if (model.external_dim > 0) {
    if (ext_path.empty())
      throw Error("model uses external view '" + model.external_name +
                  "'; pass --external or set external_test");
    ext = mvsvm::ExternalScores::load(ext_path);
  }

  // Gate: task A predicts everything; B and C predict below an OFF /
  // TIN parent, taken from gold labels or from a previous run's
  // prediction file. Rows absent from --gate-pred are simply not
  // gated (the parent run never predicted them).
  std::map<std::string, std::string> gate_pred;
  if (!gate_pred_path.empty()) gate_pred = load_predictions(gate_pred_path);
  auto gated = [&](const mvsvm::DatasetRow& row) {
    if (model.task == mvsvm::TaskId::A) return true;
    const bool want_b = model.task == mvsvm::TaskId::B;
    const std::string parent_pos = want_b ? "OFF" : "TIN";
    if (config.mode == mvsvm::GateMode::GoldGated) {
      const auto& gold = want_b ? row.label_a : row.label_b;
      return gold == parent_pos;
    }
    if (gate_pred_path.empty())
      throw Error("cascade mode for task " + mvsvm::task_name(model.task) +
                  " needs --gate-pred (the " +
                  (want_b ? std::string("A") : std::string("B")) +
                  " predictions)");
    const auto it = gate_pred.find(row.tweet.id);
    return it != gate_pred.end() && it->second == parent_pos;
  };

  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  size_t emitted = 0;
  for (const auto& row : data.rows) {
    if (!gated(row)) continue;
    const mvsvm::TokenStream tokens{split_ws(row.tweet.text), row.tweet.id};
    const auto pred = mvsvm::predict(model, tokens,
                                     model.external_dim > 0 ? &ext : nullptr);
    out << row.tweet.id << '\t' << pred.label << '\n';
    ++emitted;
  }
  out.close();
  if (!out) throw Error("failed writing " + out_path);
  std::cerr << "predicted " << emitted << " of " << data.rows.size()
            << " rows -> " << out_path << "\n";
  return 0;
}

// --- evaluate --------------------------------------------------------

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path,
                 mvsvm::TaskId task) {
  const mvsvm::Dataset data = mvsvm::load_olid(gold_path);
  const std::map<std::string, std::string> pred =
      load_predictions(pred_path);

  std::vector<std::string> gold_labels, pred_labels;
  size_t joined = 0;
  for (const auto& row : data.rows) {
    const auto& label = row.label(task);
    if (!label) continue;
    const auto it = pred.find(row.tweet.id);
    if (it == pred.end())
      throw Error(pred_path + ": missing prediction for id '" + row.tweet.id +
                  "'");
    gold_labels.push_back(*label);
    pred_labels.push_back(it->second);
    ++joined;
  }
  if (joined == 0)
    throw Error(gold_path + ": no rows annotated for task " +
                mvsvm::task_name(task));
  if (joined != pred.size()) {
    std::vector<std::string> gold_ids;
    for (const auto& row : data.rows)
      if (row.label(task)) gold_ids.push_back(row.tweet.id);
    std::string extra;
    for (const auto& [id, label] : pred) {
      (void)label;
      if (std::find(gold_ids.begin(), gold_ids.end(), id) == gold_ids.end()) {
        extra = id;
        break;
      }
    }
    throw Error(pred_path + ": prediction for id '" + extra +
                "' has no gold task " + mvsvm::task_name(task) + " label");
  }

  const mvsvm::EvalReport report =
      mvsvm::macro_f1(gold_labels, pred_labels, mvsvm::task_classes(task));
  std::cout << report.to_table() << report.to_kv();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view stacked SVM pipeline for hierarchical "
               "offensive-language detection"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, model_dir, external_path,
      gate_pred_path, gold_path, pred_path, task_str = "A";

  Overrides ov_pre, ov_train, ov_predict;

  CLI::App* pre = app.add_subcommand(
      "preprocess", "Normalize the tweet column of an OLID-format TSV");
  pre->add_option("--config", config_path, "key=value run config");
  pre->add_option("--in", in_path, "input TSV")->required();
  pre->add_option("--out", out_path, "output TSV")->required();
  for (const char* key : {"emoji_map", "emoticons", "unigrams", "bigrams"})
    add_override(pre, ov_pre, key, "resource path");

  CLI::App* train = app.add_subcommand(
      "train", "Train a stacked ensemble on a preprocessed TSV");
  train->add_option("--config", config_path, "key=value run config");
  for (const char* key :
       {"task", "views", "reg", "C", "meta_reg", "meta_C", "k_folds",
        "min_df", "tol", "max_iter", "seed", "external_name", "train", "dev",
        "external_train", "external_dev", "model_dir"})
    add_override(train, ov_train, key, "config override");

  CLI::App* predict = app.add_subcommand(
      "predict", "Predict labels for a preprocessed TSV");
  predict->add_option("--config", config_path, "key=value run config");
  predict->add_option("--model-dir", model_dir, "trained model directory")
      ->required();
  predict->add_option("--in", in_path, "input TSV")->required();
  predict->add_option("--out", out_path, "output id<TAB>label TSV")
      ->required();
  predict->add_option("--external", external_path,
                      "external score file for the input rows");
  predict->add_option("--gate-pred", gate_pred_path,
                      "parent-task predictions (cascade mode)");
  add_override(predict, ov_predict, "mode",
               "gating mode: gold-gated or cascade");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score predictions against gold labels (macro-F1)");
  evaluate->add_option("--gold", gold_path, "gold OLID-format TSV")
      ->required();
  evaluate->add_option("--pred", pred_path, "id<TAB>label predictions")
      ->required();
  evaluate->add_option("--task", task_str, "sub-task: A, B or C")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) {
      const mvsvm::RunConfig config = make_config(config_path, pre, ov_pre);
      return cmd_preprocess(config, in_path, out_path);
    }
    if (train->parsed()) {
      const mvsvm::RunConfig config =
          make_config(config_path, train, ov_train);
      return cmd_train(config);
    }
    if (predict->parsed()) {
      const mvsvm::RunConfig config =
          make_config(config_path, predict, ov_predict);
      return cmd_predict(config, model_dir, in_path, out_path, external_path,
                         gate_pred_path);
    }
    if (evaluate->parsed())
      return cmd_evaluate(gold_path, pred_path,
                          mvsvm::task_from_name(task_str));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
