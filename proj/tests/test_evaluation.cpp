#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvsvm/ensemble.hpp"
#include "mvsvm/evaluation.hpp"
#include "mvsvm/types.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace mvsvm;

namespace {

const char* kHeader = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";

std::string olid_file(const std::vector<std::string>& rows) {
  std::string text = kHeader;
  for (const auto& r : rows) text += r + "\n";
  return text;
}

TokenStream ts(std::string id, std::vector<std::string> tokens) {
  TokenStream t;
  t.source_id = std::move(id);
  t.tokens = std::move(tokens);
  return t;
}

DatasetRow make_row(std::string id, const char* a, const char* b,
                    const char* c) {
  DatasetRow r;
  r.tweet.id = std::move(id);
  if (a) r.label_a = a;
  if (b) r.label_b = b;
  if (c) r.label_c = c;
  return r;
}

// Tiny single-view ensemble over a token bank per class. Each class
// word appears in many rows so min_df never drops it.
EnsembleModel bank_model(
    TaskId task,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        banks) {
  std::vector<TokenStream> docs;
  std::vector<std::string> labels;
  int i = 0;
  for (int rep = 0; rep < 6; ++rep) {
    for (const auto& [cls, bank] : banks) {
      docs.push_back(ts("train" + std::to_string(i++),
                        {bank[rep % bank.size()], "the",
                         bank[(rep + 1) % bank.size()]}));
      labels.push_back(cls);
    }
  }
  EnsembleTrainOptions opts;
  opts.task = task;
  ViewSpec v;
  v.n_min = 1;
  v.n_max = 1;
  v.C = 1.0;
  opts.view_specs = {v};
  opts.meta_C = 1.0;
  opts.k_folds = 3;
  opts.min_df = 2;
  opts.seed = 1;
  return train_ensemble(docs, labels, opts);
}

EnsembleModel model_a() {
  return bank_model(TaskId::A, {{"NOT", {"nice", "good"}},
                                {"OFF", {"awful", "trash"}}});
}
EnsembleModel model_b() {
  return bank_model(TaskId::B, {{"TIN", {"you", "him"}},
                                {"UNT", {"damn", "heck"}}});
}
EnsembleModel model_c() {
  return bank_model(TaskId::C, {{"GRP", {"them", "crowd"}},
                                {"IND", {"person", "dude"}},
                                {"OTH", {"thing", "stuff"}}});
}

}  // namespace

TEST_CASE("task names and classes are pinned") {
  CHECK(task_from_name("A") == TaskId::A);
  CHECK(task_from_name("b") == TaskId::B);
  CHECK(task_name(TaskId::C) == "C");
  CHECK_THROWS_AS(task_from_name("D"), Error);
  CHECK(task_classes(TaskId::A) == std::vector<std::string>{"NOT", "OFF"});
  CHECK(task_classes(TaskId::B) == std::vector<std::string>{"TIN", "UNT"});
  CHECK(task_classes(TaskId::C) ==
        std::vector<std::string>{"GRP", "IND", "OTH"});
  CHECK(gate_mode_from_name("gold-gated") == GateMode::GoldGated);
  CHECK(gate_mode_from_name("cascade") == GateMode::Cascade);
  CHECK_THROWS_AS(gate_mode_from_name("open"), Error);
  CHECK(gate_mode_name(GateMode::Cascade) == "cascade");
}

TEST_CASE("load_olid parses labels and NULL placeholders") {
  testutil::TempDir dir("olid");
  testutil::write_file(dir.file("good.tsv"),
                       olid_file({"t1\t@USER is awful\tOFF\tTIN\tIND",
                                  "t2\tgood day\tNOT\tNULL\tNULL",
                                  "t3\tdamn rain\tOFF\tUNT\tNULL"}));
  const Dataset d = load_olid(dir.file("good.tsv"));
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[0].tweet.id == "t1");
  CHECK(d.rows[0].tweet.text == "@USER is awful");
  CHECK(d.rows[0].label_a == "OFF");
  CHECK(d.rows[0].label_b == "TIN");
  CHECK(d.rows[0].label_c == "IND");
  CHECK(d.rows[1].label_a == "NOT");
  CHECK_FALSE(d.rows[1].label_b.has_value());
  CHECK_FALSE(d.rows[1].label_c.has_value());
  CHECK(d.rows[2].label_b == "UNT");
  CHECK(d.rows[0].label(TaskId::C) == "IND");

  // header-only file parses to an empty dataset
  testutil::write_file(dir.file("bare.tsv"), kHeader);
  CHECK(load_olid(dir.file("bare.tsv")).rows.empty());
}

TEST_CASE("load_olid rejects malformed files with line numbers") {
  testutil::TempDir dir("olid");
  testutil::write_file(dir.file("empty.tsv"), "");
  CHECK_THROWS_WITH_AS(load_olid(dir.file("empty.tsv")),
                       doctest::Contains("empty file"), Error);
  testutil::write_file(dir.file("header.tsv"),
                       "id\ttext\tsubtask_a\tsubtask_b\tsubtask_c\nx\n");
  CHECK_THROWS_WITH_AS(load_olid(dir.file("header.tsv")),
                       doctest::Contains("header"), Error);
  testutil::write_file(dir.file("fields.tsv"),
                       olid_file({"t1\thello\tNOT\tNULL"}));
  CHECK_THROWS_WITH_AS(load_olid(dir.file("fields.tsv")),
                       doctest::Contains("line 2"), Error);
  testutil::write_file(dir.file("label.tsv"),
                       olid_file({"t1\thello\tMAYBE\tNULL\tNULL"}));
  CHECK_THROWS_WITH_AS(load_olid(dir.file("label.tsv")),
                       doctest::Contains("subtask_A"), Error);
  testutil::write_file(dir.file("labelb.tsv"),
                       olid_file({"t1\thello\tOFF\tGRP\tNULL"}));
  CHECK_THROWS_AS(load_olid(dir.file("labelb.tsv")), Error);
  testutil::write_file(dir.file("dup.tsv"),
                       olid_file({"t1\thello\tNOT\tNULL\tNULL",
                                  "t1\tagain\tNOT\tNULL\tNULL"}));
  CHECK_THROWS_WITH_AS(load_olid(dir.file("dup.tsv")),
                       doctest::Contains("duplicate id 't1'"), Error);
  testutil::write_file(dir.file("noid.tsv"),
                       olid_file({"\thello\tNOT\tNULL\tNULL"}));
  CHECK_THROWS_AS(load_olid(dir.file("noid.tsv")), Error);
  CHECK_THROWS_AS(load_olid(dir.file("absent.tsv")), Error);
}

TEST_CASE("load_olid reports every hierarchy violation by id") {
  testutil::TempDir dir("olid");
  // B label under NOT, and C label under UNT
  testutil::write_file(dir.file("bad.tsv"),
                       olid_file({"t1\thello\tNOT\tTIN\tNULL",
                                  "t2\tfine\tOFF\tTIN\tGRP",
                                  "t3\tmeh\tOFF\tUNT\tOTH"}));
  CHECK_THROWS_WITH_AS(load_olid(dir.file("bad.tsv")),
                       doctest::Contains("hierarchy violation for ids: t1 t3"),
                       Error);
  // C label with B missing entirely
  testutil::write_file(dir.file("skip.tsv"),
                       olid_file({"t4\they\tOFF\tNULL\tIND"}));
  CHECK_THROWS_WITH_AS(load_olid(dir.file("skip.tsv")),
                       doctest::Contains("t4"), Error);
}

TEST_CASE("macro_f1 reproduces the hand-computed 11/15 case") {
  const std::vector<std::string> gold = {"OFF", "OFF", "NOT", "NOT"};
  const std::vector<std::string> pred = {"OFF", "NOT", "NOT", "NOT"};
  const EvalReport rep = macro_f1(gold, pred, task_classes(TaskId::A));
  // F1(OFF) = 2/3, F1(NOT) = 4/5, macro = 11/15  [DERIVED]
  CHECK(rep.macro_f1 == doctest::Approx(11.0 / 15.0).epsilon(1e-9));
  CHECK(rep.f1[1] == doctest::Approx(2.0 / 3.0));
  CHECK(rep.f1[0] == doctest::Approx(4.0 / 5.0));
  CHECK(rep.precision[1] == 1.0);
  CHECK(rep.recall[1] == 0.5);
  CHECK(rep.precision[0] == doctest::Approx(2.0 / 3.0));
  CHECK(rep.recall[0] == 1.0);
  CHECK(rep.n == 4);

  // confusion rows sum to the gold counts
  CHECK(rep.confusion[0][0] + rep.confusion[0][1] == 2);
  CHECK(rep.confusion[1][0] + rep.confusion[1][1] == 2);
  CHECK(rep.confusion[1][0] == 1);  // the OFF -> NOT miss

  const std::string table = rep.to_table();
  CHECK(table.find("0.7333") != std::string::npos);
  const std::string kv = rep.to_kv();
  CHECK(kv.find("macro_f1=0.733333") != std::string::npos);
  CHECK(kv.find("n=4") != std::string::npos);
}

TEST_CASE("macro_f1 collapses to 1/3 when one class soaks predictions") {
  const std::vector<std::string> gold = {"NOT", "OFF", "NOT", "OFF"};
  const std::vector<std::string> pred = {"NOT", "NOT", "NOT", "NOT"};
  const EvalReport rep = macro_f1(gold, pred, task_classes(TaskId::A));
  CHECK(rep.macro_f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  // OFF never predicted and never hit: 0/0 -> 0 convention
  CHECK(rep.precision[1] == 0.0);
  CHECK(rep.recall[1] == 0.0);
  CHECK(rep.f1[1] == 0.0);
}

TEST_CASE("macro_f1 averages over absent classes") {
  const std::vector<std::string> gold = {"GRP", "IND", "GRP", "IND"};
  const std::vector<std::string> pred = {"GRP", "IND", "GRP", "IND"};
  const EvalReport rep = macro_f1(gold, pred, task_classes(TaskId::C));
  // OTH contributes a zero even though perfect elsewhere
  CHECK(rep.macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("macro_f1 validates inputs") {
  const std::vector<std::string> one = {"NOT"};
  const std::vector<std::string> two = {"NOT", "OFF"};
  CHECK_THROWS_AS(macro_f1(one, two, task_classes(TaskId::A)), Error);
  CHECK_THROWS_AS(macro_f1(std::vector<std::string>{},
                           std::vector<std::string>{},
                           task_classes(TaskId::A)),
                  Error);
  const std::vector<std::string> alien = {"BAD"};
  CHECK_THROWS_AS(macro_f1(alien, one, task_classes(TaskId::A)), Error);
  CHECK_THROWS_AS(macro_f1(one, alien, task_classes(TaskId::A)), Error);
}

TEST_CASE("macro_f1 agrees with the naive recomputation") {
  const auto& classes = task_classes(TaskId::C);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng() % 12;
    std::vector<std::string> gold(n), pred(n);
    for (size_t i = 0; i < n; ++i) {
      gold[i] = classes[rng() % classes.size()];
      pred[i] = classes[rng() % classes.size()];
    }
    const EvalReport rep = macro_f1(gold, pred, classes);
    const double naive = oracle::macro_f1_naive(gold, pred, classes);
    CHECK(rep.macro_f1 == doctest::Approx(naive).epsilon(1e-12));

    int64_t total = 0;
    for (const auto& row : rep.confusion)
      for (int64_t cell : row) total += cell;
    CHECK(total == static_cast<int64_t>(n));
  }
}

TEST_CASE("macro_f1 is invariant to row order") {
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"NOT", "NOT"}, {"OFF", "NOT"}, {"OFF", "OFF"}, {"NOT", "OFF"},
      {"OFF", "OFF"}, {"NOT", "NOT"}};
  std::vector<std::string> gold, pred;
  for (const auto& [g, p] : pairs) {
    gold.push_back(g);
    pred.push_back(p);
  }
  const double before =
      macro_f1(gold, pred, task_classes(TaskId::A)).macro_f1;
  std::mt19937_64 rng(5);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  gold.clear();
  pred.clear();
  for (const auto& [g, p] : pairs) {
    gold.push_back(g);
    pred.push_back(p);
  }
  CHECK(macro_f1(gold, pred, task_classes(TaskId::A)).macro_f1 == before);
}

TEST_CASE("cascade_predict routes rows by gold gates") {
  const EnsembleModel a = model_a(), b = model_b(), c = model_c();
  Dataset data;
  data.rows = {make_row("r1", "OFF", "TIN", "GRP"),
               make_row("r2", "OFF", "UNT", nullptr),
               make_row("r3", "NOT", nullptr, nullptr),
               make_row("r4", "OFF", "TIN", "IND"),
               make_row("r5", "NOT", nullptr, nullptr)};
  const std::vector<TokenStream> tokens = {
      ts("r1", {"awful", "you", "them"}),
      ts("r2", {"trash", "damn", "heck"}),
      ts("r3", {"nice", "good", "good"}),
      ts("r4", {"awful", "him", "person"}),
      ts("r5", {"good", "the", "nice"})};

  const CascadePredictions gg = cascade_predict(
      &a, &b, &c, data, tokens, nullptr, nullptr, nullptr,
      GateMode::GoldGated);
  REQUIRE(gg.a.rows.size() == 5);  // task A covers every row
  // B predicted exactly where gold A == OFF, in dataset order
  REQUIRE(gg.b.rows.size() == 3);
  CHECK(gg.b.rows[0].first == "r1");
  CHECK(gg.b.rows[1].first == "r2");
  CHECK(gg.b.rows[2].first == "r4");
  // C predicted exactly where gold B == TIN
  REQUIRE(gg.c.rows.size() == 2);
  CHECK(gg.c.rows[0].first == "r1");
  CHECK(gg.c.rows[1].first == "r4");

  // the clean banks make the labels themselves come out gold
  CHECK(gg.a.rows[0].second == "OFF");
  CHECK(gg.a.rows[2].second == "NOT");
  CHECK(gg.b.rows[0].second == "TIN");
  CHECK(gg.b.rows[1].second == "UNT");
  CHECK(gg.c.rows[0].second == "GRP");
  CHECK(gg.c.rows[1].second == "IND");
}

TEST_CASE("cascade_predict routes rows by its own predictions") {
  const EnsembleModel a = model_a(), b = model_b(), c = model_c();

  // unannotated rows: gold gating finds nothing, cascading still runs
  Dataset data;
  data.rows = {make_row("u1", nullptr, nullptr, nullptr),
               make_row("u2", nullptr, nullptr, nullptr)};
  const std::vector<TokenStream> tokens = {
      ts("u1", {"awful", "you", "them"}), ts("u2", {"nice", "good", "the"})};

  const CascadePredictions gg = cascade_predict(
      &a, &b, &c, data, tokens, nullptr, nullptr, nullptr,
      GateMode::GoldGated);
  CHECK(gg.a.rows.size() == 2);
  CHECK(gg.b.rows.empty());
  CHECK(gg.c.rows.empty());

  const CascadePredictions ca = cascade_predict(
      &a, &b, &c, data, tokens, nullptr, nullptr, nullptr, GateMode::Cascade);
  CHECK(ca.a.rows.size() == 2);
  REQUIRE(ca.a.rows[0].second == "OFF");
  REQUIRE(ca.a.rows[1].second == "NOT");
  REQUIRE(ca.b.rows.size() == 1);  // only the predicted-OFF row descends
  CHECK(ca.b.rows[0].first == "u1");
  CHECK(ca.b.rows[0].second == "TIN");
  REQUIRE(ca.c.rows.size() == 1);
  CHECK(ca.c.rows[0].first == "u1");
  CHECK(ca.c.rows[0].second == "GRP");
}

TEST_CASE("cascade_predict with an all-NOT upper task predicts no B") {
  const EnsembleModel a = model_a(), b = model_b();
  Dataset data;
  // gold says OFF but the text reads NOT: cascade trusts the model
  data.rows = {make_row("x1", "OFF", "TIN", nullptr),
               make_row("x2", "OFF", "UNT", nullptr)};
  const std::vector<TokenStream> tokens = {ts("x1", {"nice", "good", "the"}),
                                           ts("x2", {"good", "nice", "the"})};
  const CascadePredictions ca = cascade_predict(
      &a, &b, nullptr, data, tokens, nullptr, nullptr, nullptr,
      GateMode::Cascade);
  CHECK(ca.a.rows.size() == 2);
  CHECK(ca.b.rows.empty());
  const CascadePredictions gg = cascade_predict(
      &a, &b, nullptr, data, tokens, nullptr, nullptr, nullptr,
      GateMode::GoldGated);
  CHECK(gg.b.rows.size() == 2);  // gold gate ignores the model's view
}

TEST_CASE("cascade_predict stops where models are absent") {
  const EnsembleModel a = model_a();
  Dataset data;
  data.rows = {make_row("r1", "OFF", "TIN", "GRP")};
  const std::vector<TokenStream> tokens = {ts("r1", {"awful", "you", "them"})};
  const CascadePredictions out = cascade_predict(
      &a, nullptr, nullptr, data, tokens, nullptr, nullptr, nullptr,
      GateMode::GoldGated);
  CHECK(out.a.rows.size() == 1);
  CHECK(out.b.rows.empty());
  CHECK(out.c.rows.empty());
}

TEST_CASE("cascade_predict rejects misaligned token streams") {
  const EnsembleModel a = model_a();
  Dataset data;
  data.rows = {make_row("r1", "NOT", nullptr, nullptr),
               make_row("r2", "NOT", nullptr, nullptr)};
  const std::vector<TokenStream> swapped = {ts("r2", {"nice"}),
                                            ts("r1", {"good"})};
  CHECK_THROWS_AS(cascade_predict(&a, nullptr, nullptr, data, swapped,
                                  nullptr, nullptr, nullptr,
                                  GateMode::GoldGated),
                  Error);
  const std::vector<TokenStream> shorter = {ts("r1", {"nice"})};
  CHECK_THROWS_AS(cascade_predict(&a, nullptr, nullptr, data, shorter,
                                  nullptr, nullptr, nullptr,
                                  GateMode::GoldGated),
                  Error);
}

TEST_CASE("cascade_predict checks model task assignments") {
  const EnsembleModel a = model_a();
  Dataset data;
  data.rows = {make_row("r1", "NOT", nullptr, nullptr),
               make_row("r2", "OFF", "TIN", nullptr)};
  const std::vector<TokenStream> tokens = {ts("r1", {"nice"}),
                                           ts("r2", {"awful"})};
  // a task-A model wired into the B slot
  CHECK_THROWS_AS(cascade_predict(&a, &a, nullptr, data, tokens, nullptr,
                                  nullptr, nullptr, GateMode::GoldGated),
                  Error);
}
