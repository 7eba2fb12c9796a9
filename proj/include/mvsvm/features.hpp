#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mvsvm/types.hpp"

namespace mvsvm {

// Sparse feature vector: strictly increasing column indices with
// matching values.
struct SparseVector {
  std::vector<int32_t> indices;
  std::vector<double> values;
  int32_t dim = 0;
};

// Word n-gram feature space. N-grams are lowercased token tuples joined
// with single spaces; indices are assigned in lexicographic key order
// so fitting is deterministic regardless of corpus order.
class Vocabulary {
public:
  Vocabulary() = default;
  Vocabulary(int n_min, int n_max, int min_df)
      : n_min_(n_min), n_max_(n_max), min_df_(min_df) {}

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  int min_df() const { return min_df_; }
  int32_t size() const { return static_cast<int32_t>(index_.size()); }
  const std::map<std::string, int32_t>& entries() const { return index_; }

  // -1 when the n-gram is out of vocabulary.
  int32_t index_of(const std::string& ngram) const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend Vocabulary fit_vocabulary(std::span<const TokenStream> corpus,
                                   int n_min, int n_max, int min_df);

private:
  std::map<std::string, int32_t> index_;
  int n_min_ = 1;
  int n_max_ = 1;
  int min_df_ = 1;
};

// Learns the n-grams with document frequency >= min_df over the corpus.
Vocabulary fit_vocabulary(std::span<const TokenStream> corpus, int n_min,
                          int n_max, int min_df);

// Lowercased n-grams of the token stream, n_min <= n <= n_max, joined
// with single spaces, in sliding-window order.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n_min, int n_max);

// Counts vocabulary n-grams in the token stream. With l2_normalize
// (the default) a nonzero vector is scaled to unit Euclidean norm.
SparseVector vectorize(const Vocabulary& vocab, const TokenStream& tokens,
                       bool l2_normalize = true);

}  // namespace mvsvm
