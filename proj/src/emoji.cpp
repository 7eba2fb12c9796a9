#include "mvsvm/emoji.hpp"

#include <algorithm>
#include <fstream>

#include "mvsvm/types.hpp"

namespace mvsvm {

EmojiMap EmojiMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open emoji map: " + path);
  EmojiMap map;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw Error("emoji map " + path + ": malformed line " +
                  std::to_string(lineno));
    std::string key = line.substr(0, tab);
    std::string desc = line.substr(tab + 1);
    map.entries_[key] = desc;
    map.max_key_bytes_ = std::max(map.max_key_bytes_, key.size());
  }
  return map;
}

EmojiMap EmojiMap::from_entries(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  EmojiMap map;
  for (const auto& [key, desc] : entries) {
    if (key.empty() || desc.empty()) throw Error("emoji map entry empty");
    map.entries_[key] = desc;
    map.max_key_bytes_ = std::max(map.max_key_bytes_, key.size());
  }
  return map;
}

const std::string* EmojiMap::longest_match(std::string_view s,
                                           size_t* match_len) const {
  const size_t cap = std::min(max_key_bytes_, s.size());
  for (size_t len = cap; len >= 1; --len) {
    const auto it = entries_.find(std::string(s.substr(0, len)));
    if (it != entries_.end()) {
      *match_len = len;
      return &it->second;
    }
  }
  return nullptr;
}

std::string replace_emoji(std::string_view text, const EmojiMap& map) {
  if (map.empty()) return std::string(text);
  std::string out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) {
    size_t len = 0;
    const std::string* desc = map.longest_match(text.substr(pos), &len);
    if (desc == nullptr) {
      out.push_back(text[pos]);
      ++pos;
      continue;
    }
    if (!out.empty() && out.back() != ' ') out.push_back(' ');
    out.append(*desc);
    pos += len;
    if (pos < text.size() && text[pos] != ' ') out.push_back(' ');
  }
  return out;
}

}  // namespace mvsvm
