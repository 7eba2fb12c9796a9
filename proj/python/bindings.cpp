// Python bindings for the core pipeline pieces: preprocessing,
// hashtag segmentation, training and scoring. File formats and the
// full cascade stay with the CLI.

#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvsvm/ensemble.hpp"
#include "mvsvm/evaluation.hpp"
#include "mvsvm/preprocess.hpp"

namespace py = pybind11;
using namespace mvsvm;

namespace {

// Owns the three resources the C++ Preprocessor only borrows.
class PyPreprocessor {
public:
  PyPreprocessor(const std::string& emoji_map, const std::string& emoticons,
                 const std::string& unigrams, const std::string& bigrams)
      : emoji_(EmojiMap::load(emoji_map)),
        emoticons_(EmoticonSet::load(emoticons)),
        seg_(SegmentationModel::load(unigrams, bigrams)),
        pre_(&emoji_, &emoticons_, &seg_) {}

  std::vector<std::string> run(const std::string& text) const {
    return pre_.run_text(text);
  }

private:
  EmojiMap emoji_;
  EmoticonSet emoticons_;
  SegmentationModel seg_;
  Preprocessor pre_;
};

class PySegmenter {
public:
  PySegmenter(const std::string& unigrams, const std::string& bigrams)
      : model_(SegmentationModel::load(unigrams, bigrams)) {}

  std::vector<std::string> segment(const std::string& s) const {
    return mvsvm::segment(model_, s);
  }

private:
  SegmentationModel model_;
};

TokenStream stream_of(const std::vector<std::string>& tokens) {
  TokenStream t;
  t.tokens = tokens;
  return t;
}

class PyEnsemble {
public:
  explicit PyEnsemble(EnsembleModel model) : model_(std::move(model)) {}

  static PyEnsemble load(const std::string& dir) {
    return PyEnsemble(EnsembleModel::load(dir));
  }
  void save(const std::string& dir) const { model_.save(dir); }

  std::string task() const { return task_name(model_.task); }
  std::vector<std::string> classes() const { return model_.meta.classes(); }
  size_t n_views() const { return model_.views.size(); }

  py::tuple predict_tokens(const std::vector<std::string>& tokens) const {
    const EnsemblePrediction p =
        mvsvm::predict(model_, stream_of(tokens), nullptr);
    return py::make_tuple(p.label, p.proba);
  }

private:
  EnsembleModel model_;
};

PyEnsemble train_py(const std::vector<std::vector<std::string>>& corpus,
                    const std::vector<std::string>& labels,
                    const std::string& task, int views,
                    const std::string& reg, double C, double meta_C,
                    int k_folds, int min_df, uint64_t seed) {
  std::vector<TokenStream> docs;
  docs.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    TokenStream t = stream_of(corpus[i]);
    t.source_id = "row" + std::to_string(i);
    docs.push_back(std::move(t));
  }
  EnsembleTrainOptions opts;
  opts.task = task_from_name(task);
  opts.view_specs = default_view_specs(reg_from_name(reg), C);
  if (views < 1 || views > 6)
    throw Error("views must be in 1..6, got " + std::to_string(views));
  opts.view_specs.resize(static_cast<size_t>(views));
  opts.meta_C = meta_C;
  opts.k_folds = k_folds;
  opts.min_df = min_df;
  opts.seed = seed;
  return PyEnsemble(train_ensemble(docs, labels, opts));
}

double macro_f1_py(const std::vector<std::string>& gold,
                   const std::vector<std::string>& pred,
                   const std::string& task) {
  return macro_f1(gold, pred, task_classes(task_from_name(task))).macro_f1;
}

py::dict eval_report_py(const std::vector<std::string>& gold,
                        const std::vector<std::string>& pred,
                        const std::string& task) {
  const EvalReport rep =
      macro_f1(gold, pred, task_classes(task_from_name(task)));
  py::dict out;
  out["classes"] = rep.classes;
  out["precision"] = rep.precision;
  out["recall"] = rep.recall;
  out["f1"] = rep.f1;
  out["macro_f1"] = rep.macro_f1;
  out["n"] = rep.n;
  return out;
}

}  // namespace

PYBIND11_MODULE(_mvsvm, m) {
  m.doc() = "Multi-view stacked SVM pipeline for offensive-language "
            "detection";

  py::register_exception<Error>(m, "MvsvmError");

  py::class_<PyPreprocessor>(m, "Preprocessor")
      .def(py::init<const std::string&, const std::string&,
                    const std::string&, const std::string&>(),
           py::arg("emoji_map"), py::arg("emoticons"), py::arg("unigrams"),
           py::arg("bigrams"))
      .def("run", &PyPreprocessor::run, py::arg("text"),
           "Normalize one tweet into its token list.");

  py::class_<PySegmenter>(m, "Segmenter")
      .def(py::init<const std::string&, const std::string&>(),
           py::arg("unigrams"), py::arg("bigrams"))
      .def("segment", &PySegmenter::segment, py::arg("text"),
           "Split a hashtag body into corpus-frequent words.");

  py::class_<PyEnsemble>(m, "Ensemble")
      .def_static("load", &PyEnsemble::load, py::arg("model_dir"))
      .def("save", &PyEnsemble::save, py::arg("model_dir"))
      .def_property_readonly("task", &PyEnsemble::task)
      .def_property_readonly("classes", &PyEnsemble::classes)
      .def_property_readonly("n_views", &PyEnsemble::n_views)
      .def("predict_tokens", &PyEnsemble::predict_tokens, py::arg("tokens"),
           "Predict one preprocessed token list -> (label, proba).");

  m.def("train_ensemble", &train_py, py::arg("corpus"), py::arg("labels"),
        py::arg("task") = "A", py::arg("views") = 6, py::arg("reg") = "L2",
        py::arg("C") = 1e-5, py::arg("meta_C") = 1e-5, py::arg("k_folds") = 5,
        py::arg("min_df") = 2, py::arg("seed") = 0,
        "Train a stacked n-gram ensemble on tokenized documents.");

  m.def("macro_f1", &macro_f1_py, py::arg("gold"), py::arg("pred"),
        py::arg("task"), "Macro-averaged F1 over the task's class set.");
  m.def("eval_report", &eval_report_py, py::arg("gold"), py::arg("pred"),
        py::arg("task"), "Per-class precision/recall/F1 plus the macro-F1.");
}
