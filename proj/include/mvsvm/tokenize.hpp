#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mvsvm {

// Fixed list of ASCII emoticons that survive punctuation peeling as
// single tokens. Shipped as a one-per-line resource file.
class EmoticonSet {
public:
  static EmoticonSet load(const std::string& path);
  static EmoticonSet from_list(const std::vector<std::string>& emoticons);

  bool contains(std::string_view token) const {
    return set_.count(std::string(token)) > 0;
  }
  size_t size() const { return set_.size(); }
  size_t max_len() const { return max_len_; }

private:
  std::unordered_set<std::string> set_;
  size_t max_len_ = 0;
};

// Tweet-aware tokenizer: splits on whitespace, peels leading/trailing
// ASCII punctuation one character at a time, and protects "@USER",
// #hashtags, listed emoticons and emoji sequences as single tokens.
// Internal punctuation (contraction apostrophes etc.) is left alone.
// Case is preserved.
std::vector<std::string> tokenize(std::string_view text,
                                  const EmoticonSet& emoticons);

// True for codepoints in the common emoji blocks; used both for
// splitting unmapped emoji into their own tokens and for the tests.
bool is_emoji_codepoint(uint32_t cp);

}  // namespace mvsvm
