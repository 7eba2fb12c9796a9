#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mvsvm {

// Mapping from emoji codepoint sequences (UTF-8 encoded) to lowercase
// description words, e.g. U+1F44D -> "thumbs up". Loaded from a TSV
// resource with lines `emoji<TAB>word word ...`.
class EmojiMap {
public:
  static EmojiMap load(const std::string& path);
  static EmojiMap from_entries(
      const std::vector<std::pair<std::string, std::string>>& entries);

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  size_t max_key_bytes() const { return max_key_bytes_; }

  // Returns the description for the longest key that is a prefix of
  // s. Empty result means no key matches. match_len receives the byte
  // length of the matched key.
  const std::string* longest_match(std::string_view s, size_t* match_len) const;

private:
  std::unordered_map<std::string, std::string> entries_;
  size_t max_key_bytes_ = 0;
};

// Replaces every mapped emoji sequence in text with its description,
// space-separated from its neighbors. Longest match wins at each
// position; unmapped emoji pass through unchanged.
std::string replace_emoji(std::string_view text, const EmojiMap& map);

}  // namespace mvsvm
