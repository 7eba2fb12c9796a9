#include "mvsvm/segmentation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include "mvsvm/types.hpp"

namespace mvsvm {

namespace {

constexpr size_t kMaxInputLen = 250;

void load_counts(const std::string& path,
                 std::unordered_map<std::string, double>* counts) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency list: " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(path + ": malformed line " + std::to_string(lineno));
    const double count = std::strtod(line.c_str() + tab + 1, nullptr);
    if (!(count > 0.0))
      throw Error(path + ": non-positive count at line " +
                  std::to_string(lineno));
    (*counts)[line.substr(0, tab)] = count;
  }
}

double sum_counts(const std::unordered_map<std::string, double>& counts) {
  double total = 0.0;
  for (const auto& [_, c] : counts) total += c;
  return total;
}

}  // namespace

SegmentationModel SegmentationModel::load(const std::string& unigram_path,
                                          const std::string& bigram_path,
                                          double total) {
  SegmentationModel model;
  load_counts(unigram_path, &model.unigram_counts);
  load_counts(bigram_path, &model.bigram_counts);
  model.total = total > 0.0 ? total : sum_counts(model.unigram_counts);
  if (model.unigram_counts.empty()) throw Error("empty unigram list");
  return model;
}

SegmentationModel SegmentationModel::from_counts(
    const std::vector<std::pair<std::string, double>>& unigrams,
    const std::vector<std::pair<std::string, double>>& bigrams, double total,
    int max_word_len) {
  SegmentationModel model;
  for (const auto& [w, c] : unigrams) model.unigram_counts[w] = c;
  for (const auto& [w, c] : bigrams) model.bigram_counts[w] = c;
  model.total = total > 0.0 ? total : sum_counts(model.unigram_counts);
  model.max_word_len = max_word_len;
  return model;
}

double word_score(const SegmentationModel& model, std::string_view word,
                  const std::optional<std::string>& prev) {
  const std::string w(word);
  if (prev.has_value()) {
    const auto big = model.bigram_counts.find(*prev + " " + w);
    if (big != model.bigram_counts.end()) {
      const auto uni = model.unigram_counts.find(*prev);
      if (uni != model.unigram_counts.end())
        return std::log(big->second / uni->second);
    }
  }
  const auto uni = model.unigram_counts.find(w);
  if (uni != model.unigram_counts.end())
    return std::log(uni->second / model.total);
  return std::log(10.0 / (model.total * std::pow(10.0, double(word.size()))));
}

double split_score(const SegmentationModel& model,
                   const std::vector<std::string>& words) {
  double score = 0.0;
  std::optional<std::string> prev;
  for (const auto& w : words) {
    score += word_score(model, w, prev);
    prev = w;
  }
  return score;
}

namespace {

// DP cell for "best split of s[0..end) whose last word is s[start..end)".
// Keeping the last word in the state makes the bigram-conditioned
// optimum exact; a plain per-position table is not, since the best
// continuation depends on the word it follows.
struct Cell {
  double score = -std::numeric_limits<double>::infinity();
  int words = 0;
  int prev_len = -1;  // length of the word before this one; 0 at start
  bool valid = false;
};

}  // namespace

std::vector<std::string> segment(const SegmentationModel& model,
                                 std::string_view s) {
  if (s.empty()) throw Error("segment: empty input");
  if (s.size() > kMaxInputLen)
    throw Error("segment: input too long (" + std::to_string(s.size()) +
                " > " + std::to_string(kMaxInputLen) + " characters)");

  std::string text(s);
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });

  const int n = static_cast<int>(text.size());
  const int maxw = std::min(model.max_word_len, n);

  // table[end][len-1]: best split ending at `end` with last word length `len`
  std::vector<std::vector<Cell>> table(
      static_cast<size_t>(n) + 1,
      std::vector<Cell>(static_cast<size_t>(maxw)));

  // Boundary positions of the split whose last word spans
  // [end-len, end) and whose predecessor word has length prev_len
  // (prev_len 0 when the last word starts the string). Most recent
  // boundary first; follows finalized table links below `end`.
  auto chain_cuts = [&](int end, int len, int prev_len) {
    std::vector<int> cuts;
    cuts.push_back(end - len);
    int e = end - len, l = prev_len;
    while (e > 0) {
      cuts.push_back(e - l);
      const int pl = table[e][l - 1].prev_len;
      e -= l;
      l = pl;
    }
    return cuts;
  };

  // True if candidate (score, words, boundary chain) beats the
  // incumbent cell under the score > fewer-words > earliest-cuts order.
  auto better = [&](const Cell& inc, double score, int words, int end, int len,
                    int prev_len) {
    if (!inc.valid) return true;
    if (score != inc.score) return score > inc.score;
    if (words != inc.words) return words < inc.words;
    std::vector<int> inc_cuts = chain_cuts(end, len, inc.prev_len);
    std::vector<int> cand_cuts = chain_cuts(end, len, prev_len);
    // Cut lists are built most-recent-first; earliest-split order
    // compares them ascending, hence the reversed iteration.
    return std::lexicographical_compare(cand_cuts.rbegin(), cand_cuts.rend(),
                                        inc_cuts.rbegin(), inc_cuts.rend());
  };

  for (int end = 1; end <= n; ++end) {
    for (int len = 1; len <= std::min(maxw, end); ++len) {
      const int start = end - len;
      const std::string word = text.substr(start, len);
      Cell& cell = table[end][len - 1];
      if (start == 0) {
        const double sc = word_score(model, word, std::nullopt);
        if (better(cell, sc, 1, end, len, 0)) {
          cell.score = sc;
          cell.words = 1;
          cell.prev_len = 0;
          cell.valid = true;
        }
        continue;
      }
      for (int plen = 1; plen <= std::min(maxw, start); ++plen) {
        const Cell& prev_cell = table[start][plen - 1];
        if (!prev_cell.valid) continue;
        const std::string prev = text.substr(start - plen, plen);
        const double sc =
            prev_cell.score + word_score(model, word, std::optional(prev));
        if (better(cell, sc, prev_cell.words + 1, end, len, plen)) {
          cell.score = sc;
          cell.words = prev_cell.words + 1;
          cell.prev_len = plen;
          cell.valid = true;
        }
      }
    }
  }

  // Pick the best final state the same way.
  int best_len = -1;
  for (int len = 1; len <= maxw; ++len) {
    const Cell& cell = table[n][len - 1];
    if (!cell.valid) continue;
    if (best_len < 0) {
      best_len = len;
      continue;
    }
    const Cell& inc = table[n][best_len - 1];
    if (cell.score != inc.score) {
      if (cell.score > inc.score) best_len = len;
    } else if (cell.words != inc.words) {
      if (cell.words < inc.words) best_len = len;
    } else {
      std::vector<int> a = chain_cuts(n, len, cell.prev_len);
      std::vector<int> b = chain_cuts(n, best_len, inc.prev_len);
      if (std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(),
                                       b.rend()))
        best_len = len;
    }
  }

  std::vector<std::string> words;
  int e = n, l = best_len;
  while (e > 0) {
    words.push_back(text.substr(e - l, l));
    const int pl = table[e][l - 1].prev_len;
    e -= l;
    l = pl;
  }
  std::reverse(words.begin(), words.end());
  return words;
}

}  // namespace mvsvm
