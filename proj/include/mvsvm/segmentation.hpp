#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mvsvm {

// Unigram/bigram corpus frequencies driving hashtag splitting. Counts
// load from `word<TAB>count` / `word word<TAB>count` files; `total` is
// the corpus token total (defaults to the sum of unigram counts).
struct SegmentationModel {
  std::unordered_map<std::string, double> unigram_counts;
  std::unordered_map<std::string, double> bigram_counts;  // key "prev word"
  double total = 0.0;
  int max_word_len = 24;

  static SegmentationModel load(const std::string& unigram_path,
                                const std::string& bigram_path,
                                double total = 0.0);
  static SegmentationModel from_counts(
      const std::vector<std::pair<std::string, double>>& unigrams,
      const std::vector<std::pair<std::string, double>>& bigrams,
      double total = 0.0, int max_word_len = 24);
};

// Log-probability of `word` given the preceding word. Conditional
// bigram estimate when available, unigram estimate as fallback, and a
// length-scaled penalty log(10 / (total * 10^len)) for unknown words.
double word_score(const SegmentationModel& model, std::string_view word,
                  const std::optional<std::string>& prev = std::nullopt);

// Splits lowercase(s) into the word sequence maximizing the summed
// word_score (first word unconditioned). Ties break toward fewer words,
// then the lexicographically earliest split-point sequence. Inputs
// longer than 250 characters are rejected.
std::vector<std::string> segment(const SegmentationModel& model,
                                 std::string_view s);

// Score of a given split, summed left to right exactly as segment()
// accumulates it.
double split_score(const SegmentationModel& model,
                   const std::vector<std::string>& words);

}  // namespace mvsvm
