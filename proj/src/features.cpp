#include "mvsvm/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mvsvm {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens,
                                        int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max)
    throw Error("extract_ngrams: bad n-gram range");
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(lower(t));

  std::vector<std::string> ngrams;
  const int len = static_cast<int>(lowered.size());
  for (int n = n_min; n <= n_max; ++n) {
    for (int i = 0; i + n <= len; ++i) {
      std::string joined = lowered[static_cast<size_t>(i)];
      for (int j = 1; j < n; ++j) {
        joined.push_back(' ');
        joined += lowered[static_cast<size_t>(i + j)];
      }
      ngrams.push_back(std::move(joined));
    }
  }
  return ngrams;
}

Vocabulary fit_vocabulary(std::span<const TokenStream> corpus, int n_min,
                          int n_max, int min_df) {
  if (corpus.empty()) throw Error("fit_vocabulary: empty corpus");
  if (n_min < 1 || n_min > n_max)
    throw Error("fit_vocabulary: bad n-gram range");

  std::unordered_map<std::string, int> df;
  for (const auto& stream : corpus) {
    std::set<std::string> seen;
    for (auto& g : extract_ngrams(stream.tokens, n_min, n_max))
      seen.insert(std::move(g));
    for (const auto& g : seen) ++df[g];
  }

  Vocabulary vocab(n_min, n_max, min_df);
  for (auto& [gram, count] : df)
    if (count >= min_df) vocab.index_[gram] = 0;
  int32_t next = 0;
  for (auto& [gram, idx] : vocab.index_) idx = next++;  // lexicographic
  return vocab;
}

int32_t Vocabulary::index_of(const std::string& ngram) const {
  const auto it = index_.find(ngram);
  return it == index_.end() ? -1 : it->second;
}

SparseVector vectorize(const Vocabulary& vocab, const TokenStream& tokens,
                       bool l2_normalize) {
  std::map<int32_t, double> counts;
  for (const auto& g :
       extract_ngrams(tokens.tokens, vocab.n_min(), vocab.n_max())) {
    const int32_t idx = vocab.index_of(g);
    if (idx >= 0) counts[idx] += 1.0;
  }

  SparseVector vec;
  vec.dim = vocab.size();
  vec.indices.reserve(counts.size());
  vec.values.reserve(counts.size());
  for (const auto& [idx, count] : counts) {
    vec.indices.push_back(idx);
    vec.values.push_back(count);
  }
  if (l2_normalize && !vec.values.empty()) {
    double sq = 0.0;
    for (const double v : vec.values) sq += v * v;
    const double norm = std::sqrt(sq);
    for (double& v : vec.values) v /= norm;
  }
  return vec;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vocabulary: " + path);
  out << "ngram-vocab v1 " << n_min_ << ' ' << n_max_ << ' ' << size() << '\n';
  for (const auto& [gram, idx] : index_) out << gram << '\t' << idx << '\n';
  if (!out) throw Error("error writing vocabulary: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary: " + path);
  std::string header;
  if (!std::getline(in, header)) throw Error("empty vocabulary file: " + path);
  std::istringstream hs(header);
  std::string magic, version;
  int n_min = 0, n_max = 0;
  int32_t size = 0;
  hs >> magic >> version >> n_min >> n_max >> size;
  if (magic != "ngram-vocab" || version != "v1" || hs.fail())
    throw Error("bad vocabulary header in " + path);

  Vocabulary vocab(n_min, n_max, 1);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error("malformed vocabulary line in " + path);
    vocab.index_[line.substr(0, tab)] =
        static_cast<int32_t>(std::stol(line.substr(tab + 1)));
  }
  if (vocab.size() != size)
    throw Error("vocabulary size mismatch in " + path);
  return vocab;
}

}  // namespace mvsvm
