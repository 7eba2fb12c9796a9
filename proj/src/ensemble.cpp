#include "mvsvm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace mvsvm {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_prob(const std::string& field, const std::string& path,
                  size_t lineno) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || !std::isfinite(v) || v < 0.0 || v > 1.0)
    throw Error(path + ": line " + std::to_string(lineno) +
                ": expected a probability in [0,1], got '" + field + "'");
  return v;
}

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

TrainOptions view_train_options(const ViewSpec& spec,
                                const EnsembleTrainOptions& opts) {
  TrainOptions t;
  t.reg = spec.reg;
  t.C = spec.C;
  t.tol = opts.tol;
  t.max_iter = opts.max_iter;
  t.seed = opts.seed;
  return t;
}

SparseVector dense_row(const std::vector<double>& values) {
  SparseVector x;
  x.dim = static_cast<int32_t>(values.size());
  x.indices.resize(values.size());
  x.values = values;
  for (size_t j = 0; j < values.size(); ++j)
    x.indices[j] = static_cast<int32_t>(j);
  return x;
}

}  // namespace

std::vector<ViewSpec> default_view_specs(Reg reg, double C) {
  std::vector<ViewSpec> specs;
  for (int n = 1; n <= 6; ++n) {
    ViewSpec s;
    s.kind = ViewSpec::Kind::Ngram;
    s.n_min = 1;
    s.n_max = n;
    s.reg = reg;
    s.C = C;
    specs.push_back(std::move(s));
  }
  return specs;
}

ExternalScores ExternalScores::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open external score file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_tabs(line);
  if (header.size() < 2 || header.size() > 4 || header[0] != "id")
    throw Error(path + ": expected header id<TAB>p1[<TAB>p2<TAB>p3]");
  for (size_t j = 1; j < header.size(); ++j)
    if (header[j] != "p" + std::to_string(j))
      throw Error(path + ": expected header column p" + std::to_string(j) +
                  ", got '" + header[j] + "'");

  ExternalScores scores;
  scores.cols_ = static_cast<int>(header.size()) - 1;
  if (scores.cols_ == 2)
    throw Error(path + ": score files carry 1 column (binary tasks) or 3 " +
                "(task C), not 2");

  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size())
      throw Error(path + ": line " + std::to_string(lineno) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(fields.size()));
    if (fields[0].empty())
      throw Error(path + ": line " + std::to_string(lineno) + ": empty id");
    std::vector<double> row(scores.cols_);
    for (int j = 0; j < scores.cols_; ++j)
      row[j] = parse_prob(fields[j + 1], path, lineno);
    if (!scores.rows_.emplace(fields[0], std::move(row)).second)
      throw Error(path + ": line " + std::to_string(lineno) +
                  ": duplicate id '" + fields[0] + "'");
  }
  return scores;
}

const std::vector<double>& ExternalScores::row(const std::string& id) const {
  const auto it = rows_.find(id);
  if (it == rows_.end())
    throw Error("no external score for id '" + id + "'");
  return it->second;
}

int EnsembleModel::cols_per_view() const {
  const size_t k = task_classes(task).size();
  return k == 2 ? 1 : static_cast<int>(k);
}

int EnsembleModel::meta_dim() const {
  return static_cast<int>(views.size()) * cols_per_view() + external_dim;
}

std::vector<int> stratified_folds(std::span<const std::string> labels, int k,
                                  uint64_t seed) {
  if (k < 2) throw Error("stratified_folds: k must be >= 2");
  std::map<std::string, std::vector<size_t>> by_label;
  for (size_t i = 0; i < labels.size(); ++i)
    by_label[labels[i]].push_back(i);

  std::vector<int> fold(labels.size(), 0);
  std::mt19937_64 rng(seed);
  int next = 0;  // runs across classes so overall fold sizes stay even
  for (auto& [label, idx] : by_label) {
    (void)label;
    for (size_t i = 0; i + 1 < idx.size(); ++i)
      std::swap(idx[i], idx[i + rng() % (idx.size() - i)]);
    for (const size_t i : idx) {
      fold[i] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

SparseVector build_meta_features(const EnsembleModel& model,
                                 const TokenStream& tokens,
                                 const ExternalScores* external) {
  std::vector<double> row;
  row.reserve(static_cast<size_t>(model.meta_dim()));
  const bool binary = model.cols_per_view() == 1;
  for (const View& view : model.views) {
    const SparseVector x = vectorize(view.vocab, tokens);
    const std::vector<double> p = predict_proba(view.model, view.calib, x);
    if (binary)
      row.push_back(p[1]);
    else
      row.insert(row.end(), p.begin(), p.end());
  }
  if (model.external_dim > 0) {
    if (!external)
      throw Error("ensemble uses external view '" + model.external_name +
                  "' but no scores were provided");
    if (external->cols() != model.external_dim)
      throw Error("external scores carry " + std::to_string(external->cols()) +
                  " columns; ensemble expects " +
                  std::to_string(model.external_dim));
    const std::vector<double>& ext = external->row(tokens.source_id);
    row.insert(row.end(), ext.begin(), ext.end());
  }
  if (row.size() != static_cast<size_t>(model.meta_dim()))
    throw Error("meta-feature dimension drift: built " +
                std::to_string(row.size()) + ", expected " +
                std::to_string(model.meta_dim()));
  return dense_row(row);
}

EnsembleModel train_ensemble(std::span<const TokenStream> corpus,
                             std::span<const std::string> labels,
                             const EnsembleTrainOptions& opts,
                             const ExternalScores* external,
                             EnsembleTrainDiagnostics* diag) {
  if (corpus.size() != labels.size())
    throw Error("train_ensemble: corpus/labels length mismatch");
  if (corpus.empty()) throw Error("train_ensemble: empty corpus");
  if (opts.k_folds < 2) throw Error("train_ensemble: k_folds must be >= 2");
  if (opts.view_specs.empty())
    throw Error("train_ensemble: at least one view required");

  const std::vector<std::string>& classes = task_classes(opts.task);
  std::map<std::string, size_t> class_count;
  for (const auto& c : classes) class_count[c] = 0;
  for (const auto& y : labels) {
    const auto it = class_count.find(y);
    if (it == class_count.end())
      throw Error("train_ensemble: label '" + y + "' is not a task " +
                  task_name(opts.task) + " class");
    ++it->second;
  }
  for (const auto& [c, count] : class_count)
    if (count < 2)
      throw Error("train_ensemble: class " + c + " has " +
                  std::to_string(count) +
                  " training rows; need at least 2 to stratify " +
                  std::to_string(opts.k_folds) + " folds");

  std::vector<ViewSpec> ngram_specs;
  int n_external = 0;
  std::string external_name;
  for (const ViewSpec& spec : opts.view_specs) {
    if (spec.kind == ViewSpec::Kind::External) {
      ++n_external;
      external_name = spec.name;
      if (external_name.empty() ||
          external_name.find_first_of(" \t\r\n") != std::string::npos)
        throw Error("train_ensemble: external view needs a whitespace-free "
                    "name");
    } else {
      if (spec.n_min < 1 || spec.n_max < spec.n_min || spec.n_max > 6)
        throw Error("train_ensemble: ngram view range must satisfy 1 <= "
                    "n_min <= n_max <= 6");
      ngram_specs.push_back(spec);
    }
  }
  if (n_external > 1)
    throw Error("train_ensemble: at most one external view");

  EnsembleModel model;
  model.task = opts.task;
  const int cols_pv = model.cols_per_view();
  if (n_external == 1) {
    if (!external)
      throw Error("train_ensemble: external view '" + external_name +
                  "' configured but no scores were given");
    if (external->cols() != cols_pv)
      throw Error("train_ensemble: external scores carry " +
                  std::to_string(external->cols()) + " columns; task " +
                  task_name(opts.task) + " needs " + std::to_string(cols_pv));
    model.external_dim = cols_pv;
    model.external_name = external_name;
  }

  const size_t n = corpus.size();
  const std::vector<int> fold = stratified_folds(labels, opts.k_folds,
                                                 opts.seed);
  const int meta_dim =
      static_cast<int>(ngram_specs.size()) * cols_pv + model.external_dim;
  std::vector<std::vector<double>> meta_rows(
      n, std::vector<double>(static_cast<size_t>(meta_dim), 0.0));

  for (size_t v = 0; v < ngram_specs.size(); ++v) {
    const ViewSpec& spec = ngram_specs[v];
    const TrainOptions topt = view_train_options(spec, opts);
    const size_t off = v * static_cast<size_t>(cols_pv);

    // Deployed view: vocabulary and classifier on the full corpus.
    View view;
    view.spec = spec;
    view.vocab = fit_vocabulary(corpus, spec.n_min, spec.n_max, opts.min_df);
    std::vector<SparseVector> X(n);
    for (size_t i = 0; i < n; ++i) X[i] = vectorize(view.vocab, corpus[i]);
    view.model = train(X, labels, topt);

    // Cross-fitting: per-fold models featurize their held-out rows.
    std::vector<std::vector<double>> oof_decisions(n);
    for (int f = 0; f < opts.k_folds; ++f) {
      std::vector<size_t> tr, te;
      for (size_t i = 0; i < n; ++i) (fold[i] == f ? te : tr).push_back(i);
      if (te.empty()) continue;

      std::vector<TokenStream> tr_docs;
      std::vector<std::string> tr_labels;
      tr_docs.reserve(tr.size());
      tr_labels.reserve(tr.size());
      for (const size_t i : tr) {
        tr_docs.push_back(corpus[i]);
        tr_labels.push_back(labels[i]);
      }
      const Vocabulary vocab_f =
          fit_vocabulary(tr_docs, spec.n_min, spec.n_max, opts.min_df);
      std::vector<SparseVector> Xf(tr.size());
      for (size_t i = 0; i < tr.size(); ++i)
        Xf[i] = vectorize(vocab_f, tr_docs[i]);
      const LinearModel model_f = train(Xf, tr_labels, topt);

      std::vector<std::vector<double>> df(tr.size());
      for (size_t i = 0; i < tr.size(); ++i)
        df[i] = model_f.decision_values(Xf[i]);
      const PlattCalibrator calib_f =
          fit_platt_for_model(model_f, df, tr_labels);

      for (const size_t i : te) {
        const SparseVector xi = vectorize(vocab_f, corpus[i]);
        oof_decisions[i] = model_f.decision_values(xi);
        const std::vector<double> p = predict_proba(model_f, calib_f, xi);
        if (cols_pv == 1)
          meta_rows[i][off] = p[1];
        else
          for (int c = 0; c < cols_pv; ++c)
            meta_rows[i][off + static_cast<size_t>(c)] = p[c];
      }
    }

    // Deployed sigmoid on the pooled out-of-fold decisions.
    view.calib = fit_platt_for_model(view.model, oof_decisions, labels);
    model.views.push_back(std::move(view));
  }

  if (model.external_dim > 0) {
    const size_t off = ngram_specs.size() * static_cast<size_t>(cols_pv);
    for (size_t i = 0; i < n; ++i) {
      const std::vector<double>& ext = external->row(corpus[i].source_id);
      for (int c = 0; c < model.external_dim; ++c)
        meta_rows[i][off + static_cast<size_t>(c)] = ext[c];
    }
  }

  std::vector<SparseVector> meta_X(n);
  for (size_t i = 0; i < n; ++i) meta_X[i] = dense_row(meta_rows[i]);
  TrainOptions meta_opt;
  meta_opt.reg = opts.meta_reg;
  meta_opt.C = opts.meta_C;
  meta_opt.tol = opts.tol;
  meta_opt.max_iter = opts.max_iter;
  meta_opt.seed = opts.seed;
  model.meta = train(meta_X, labels, meta_opt);

  std::vector<std::vector<double>> meta_decisions(n);
  for (size_t i = 0; i < n; ++i)
    meta_decisions[i] = model.meta.decision_values(meta_X[i]);
  model.meta_calib = fit_platt_for_model(model.meta, meta_decisions, labels);

  if (diag) {
    diag->fold_of = fold;
    diag->meta_rows = std::move(meta_rows);
  }
  return model;
}

EnsemblePrediction predict(const EnsembleModel& model,
                           const TokenStream& tokens,
                           const ExternalScores* external) {
  const SparseVector mx = build_meta_features(model, tokens, external);
  EnsemblePrediction pred;
  pred.label = model.meta.predict(mx);
  pred.proba = predict_proba(model.meta, model.meta_calib, mx);
  return pred;
}

CascadePredictions cascade_predict(
    const EnsembleModel* model_a, const EnsembleModel* model_b,
    const EnsembleModel* model_c, const Dataset& data,
    std::span<const TokenStream> tokens, const ExternalScores* ext_a,
    const ExternalScores* ext_b, const ExternalScores* ext_c, GateMode mode) {
  if (!model_a) throw Error("cascade_predict: task A model required");
  if (model_a->task != TaskId::A ||
      (model_b && model_b->task != TaskId::B) ||
      (model_c && model_c->task != TaskId::C))
    throw Error("cascade_predict: model/task mismatch");
  if (tokens.size() != data.rows.size())
    throw Error("cascade_predict: dataset/tokens length mismatch");
  for (size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i].source_id != data.rows[i].tweet.id)
      throw Error("cascade_predict: tokens out of step with dataset at id '" +
                  data.rows[i].tweet.id + "'");

  CascadePredictions out;
  std::vector<std::string> pred_a(data.rows.size());
  for (size_t i = 0; i < data.rows.size(); ++i) {
    pred_a[i] = predict(*model_a, tokens[i], ext_a).label;
    out.a.rows.emplace_back(data.rows[i].tweet.id, pred_a[i]);
  }

  if (!model_b) return out;
  std::vector<bool> has_b(data.rows.size(), false);
  std::vector<std::string> pred_b(data.rows.size());
  for (size_t i = 0; i < data.rows.size(); ++i) {
    const bool gated = mode == GateMode::GoldGated
                           ? data.rows[i].label_a == "OFF"
                           : pred_a[i] == "OFF";
    if (!gated) continue;
    has_b[i] = true;
    pred_b[i] = predict(*model_b, tokens[i], ext_b).label;
    out.b.rows.emplace_back(data.rows[i].tweet.id, pred_b[i]);
  }

  if (!model_c) return out;
  for (size_t i = 0; i < data.rows.size(); ++i) {
    const bool gated = mode == GateMode::GoldGated
                           ? data.rows[i].label_b == "TIN"
                           : has_b[i] && pred_b[i] == "TIN";
    if (!gated) continue;
    out.c.rows.emplace_back(data.rows[i].tweet.id,
                            predict(*model_c, tokens[i], ext_c).label);
  }
  return out;
}

void EnsembleModel::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create model directory: " + dir);

  const fs::path base(dir);
  std::ofstream out(base / "manifest.txt");
  if (!out) throw Error("cannot write manifest: " + dir);
  out << "ensemble v1\n";
  out << "task " << task_name(task) << '\n';
  out << "views " << views.size() << '\n';
  for (size_t v = 0; v < views.size(); ++v) {
    const ViewSpec& s = views[v].spec;
    out << "view " << v << " ngram " << s.n_min << ' ' << s.n_max << ' '
        << reg_name(s.reg) << ' ' << fmt_double(s.C) << '\n';
  }
  out << "external_dim " << external_dim << '\n';
  if (external_dim > 0) out << "external_name " << external_name << '\n';
  out.close();
  if (!out) throw Error("failed writing manifest: " + dir);

  for (size_t v = 0; v < views.size(); ++v) {
    const std::string stem = "view" + std::to_string(v);
    views[v].vocab.save((base / (stem + ".vocab")).string());
    views[v].model.save((base / (stem + ".model")).string());
    views[v].calib.save((base / (stem + ".platt")).string());
  }
  meta.save((base / "meta.model").string());
  meta_calib.save((base / "meta.platt").string());
}

EnsembleModel EnsembleModel::load(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  std::ifstream in(base / "manifest.txt");
  if (!in) throw Error("cannot open manifest: " + dir);

  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line))
      throw Error(dir + ": truncated manifest");
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line();
  if (line != "ensemble v1")
    throw Error(dir + ": bad manifest magic '" + line + "'");

  EnsembleModel model;
  next_line();
  {
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value) || key != "task")
      throw Error(dir + ": manifest missing task line");
    model.task = task_from_name(value);
  }

  size_t n_views = 0;
  next_line();
  {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key >> n_views) || key != "views")
      throw Error(dir + ": manifest missing views line");
  }

  std::vector<ViewSpec> specs(n_views);
  for (size_t v = 0; v < n_views; ++v) {
    next_line();
    std::istringstream ls(line);
    std::string key, kind, reg;
    size_t idx = 0;
    ViewSpec& s = specs[v];
    if (!(ls >> key >> idx >> kind >> s.n_min >> s.n_max >> reg >> s.C) ||
        key != "view" || idx != v || kind != "ngram")
      throw Error(dir + ": bad view line '" + line + "'");
    s.kind = ViewSpec::Kind::Ngram;
    s.reg = reg_from_name(reg);
  }

  next_line();
  {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key >> model.external_dim) || key != "external_dim" ||
        model.external_dim < 0)
      throw Error(dir + ": manifest missing external_dim line");
  }
  if (model.external_dim > 0) {
    next_line();
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key >> model.external_name) || key != "external_name" ||
        model.external_name.empty())
      throw Error(dir + ": manifest missing external_name line");
  }

  const std::vector<std::string>& classes = task_classes(model.task);
  for (size_t v = 0; v < n_views; ++v) {
    const std::string stem = "view" + std::to_string(v);
    View view;
    view.spec = specs[v];
    view.vocab = Vocabulary::load((base / (stem + ".vocab")).string());
    view.model = LinearModel::load((base / (stem + ".model")).string());
    view.calib = PlattCalibrator::load((base / (stem + ".platt")).string());
    if (view.vocab.n_min() != view.spec.n_min ||
        view.vocab.n_max() != view.spec.n_max)
      throw Error(dir + ": " + stem + " vocabulary n-gram range differs " +
                  "from the manifest");
    if (view.model.dim() != view.vocab.size())
      throw Error(dir + ": " + stem + " model dimension " +
                  std::to_string(view.model.dim()) +
                  " does not match vocabulary size " +
                  std::to_string(view.vocab.size()));
    if (view.model.classes() != classes)
      throw Error(dir + ": " + stem + " model classes do not match task " +
                  task_name(model.task));
    if (view.model.reg() != view.spec.reg || view.model.C() != view.spec.C)
      throw Error(dir + ": " + stem + " model regularization drifted from " +
                  "the manifest");
    if (view.calib.n_problems() != view.model.n_problems())
      throw Error(dir + ": " + stem + " calibrator does not match model");
    model.views.push_back(std::move(view));
  }

  model.meta = LinearModel::load((base / "meta.model").string());
  model.meta_calib = PlattCalibrator::load((base / "meta.platt").string());
  if (model.meta.classes() != classes)
    throw Error(dir + ": meta model classes do not match task " +
                task_name(model.task));
  if (model.meta.dim() != model.meta_dim())
    throw Error(dir + ": meta model dimension " +
                std::to_string(model.meta.dim()) + " does not match view " +
                "layout (" + std::to_string(model.meta_dim()) + ")");
  if (model.meta_calib.n_problems() != model.meta.n_problems())
    throw Error(dir + ": meta calibrator does not match meta model");
  return model;
}

}  // namespace mvsvm
