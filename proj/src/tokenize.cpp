#include "mvsvm/tokenize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "mvsvm/types.hpp"
#include "mvsvm/utf8.hpp"

namespace mvsvm {

EmoticonSet EmoticonSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open emoticon list: " + path);
  EmoticonSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    set.max_len_ = std::max(set.max_len_, line.size());
    set.set_.insert(line);
  }
  return set;
}

EmoticonSet EmoticonSet::from_list(const std::vector<std::string>& emoticons) {
  EmoticonSet set;
  for (const auto& e : emoticons) {
    if (e.empty()) continue;
    set.max_len_ = std::max(set.max_len_, e.size());
    set.set_.insert(e);
  }
  return set;
}

bool is_emoji_codepoint(uint32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) ||  // pictographs, smileys, symbols
         (cp >= 0x2600 && cp <= 0x27BF) ||    // misc symbols + dingbats
         cp == 0x2B50 || cp == 0x2B55 ||
         (cp >= 0x1F1E6 && cp <= 0x1F1FF);    // regional indicators
}

namespace {

bool is_emoji_modifier(uint32_t cp) {
  return cp == 0xFE0F ||                    // variation selector
         (cp >= 0x1F3FB && cp <= 0x1F3FF);  // skin tones
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && (std::isalnum(u) || c == '_');
}

bool is_hashtag(std::string_view s) {
  if (s.size() < 2 || s[0] != '#') return false;
  for (size_t i = 1; i < s.size(); ++i)
    if (!is_word_char(s[i])) return false;
  return true;
}

bool is_protected(std::string_view s, const EmoticonSet& emoticons) {
  return s == "@USER" || is_hashtag(s) || emoticons.contains(s);
}

void peel(std::string_view s, const EmoticonSet& emoticons,
          std::vector<std::string>& out) {
  if (s.empty()) return;
  if (is_protected(s, emoticons) || utf8_length(s) == 1) {
    out.emplace_back(s);
    return;
  }
  if (is_ascii_punct(s.front())) {
    out.emplace_back(1, s.front());
    peel(s.substr(1), emoticons, out);
    return;
  }
  if (is_ascii_punct(s.back())) {
    peel(s.substr(0, s.size() - 1), emoticons, out);
    out.emplace_back(1, s.back());
    return;
  }
  out.emplace_back(s);
}

// Length in bytes of the emoji sequence starting at pos, or 0 if the
// codepoint there is not an emoji. A sequence is a base emoji plus any
// modifiers and ZWJ-joined continuations; regional-indicator pairs
// count as one sequence.
size_t emoji_sequence_len(std::string_view s, size_t pos) {
  size_t len;
  const uint32_t cp = utf8_decode(s, pos, &len);
  if (!is_emoji_codepoint(cp)) return 0;
  size_t end = pos + len;
  if (cp >= 0x1F1E6 && cp <= 0x1F1FF && end < s.size()) {
    size_t len2;
    const uint32_t cp2 = utf8_decode(s, end, &len2);
    if (cp2 >= 0x1F1E6 && cp2 <= 0x1F1FF) return end + len2 - pos;
  }
  while (end < s.size()) {
    size_t len2;
    const uint32_t cp2 = utf8_decode(s, end, &len2);
    if (is_emoji_modifier(cp2)) {
      end += len2;
    } else if (cp2 == 0x200D && end + len2 < s.size()) {
      size_t len3;
      const uint32_t cp3 = utf8_decode(s, end + len2, &len3);
      if (!is_emoji_codepoint(cp3)) break;
      end += len2 + len3;
    } else {
      break;
    }
  }
  return end - pos;
}

// Length of a protected span starting at pos (emoji sequence, @USER,
// #hashtag or a listed emoticon), 0 if none. @USER and emoticons only
// match when not followed by a word character, so "@USERS" stays whole.
size_t protected_len(std::string_view chunk, size_t pos,
                     const EmoticonSet& emoticons) {
  const size_t elen = emoji_sequence_len(chunk, pos);
  if (elen > 0) return elen;
  const std::string_view rest = chunk.substr(pos);
  if (rest.rfind("@USER", 0) == 0 &&
      (rest.size() == 5 || !is_word_char(rest[5])))
    return 5;
  if (rest.size() >= 2 && rest[0] == '#' && is_word_char(rest[1])) {
    size_t n = 1;
    while (n < rest.size() && is_word_char(rest[n])) ++n;
    return n;
  }
  const size_t cap = std::min(emoticons.max_len(), rest.size());
  for (size_t n = cap; n >= 2; --n) {
    if (n < rest.size() && is_word_char(rest[n])) continue;
    if (emoticons.contains(rest.substr(0, n))) return n;
  }
  return 0;
}

void split_chunk(std::string_view chunk, const EmoticonSet& emoticons,
                 std::vector<std::string>& out) {
  size_t start = 0;
  size_t pos = 0;
  while (pos < chunk.size()) {
    const size_t plen = protected_len(chunk, pos, emoticons);
    if (plen > 0) {
      if (pos > start) peel(chunk.substr(start, pos - start), emoticons, out);
      out.emplace_back(chunk.substr(pos, plen));
      pos += plen;
      start = pos;
    } else {
      size_t len;
      utf8_decode(chunk, pos, &len);
      pos += len;
    }
  }
  if (pos > start) peel(chunk.substr(start, pos - start), emoticons, out);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text,
                                  const EmoticonSet& emoticons) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    const auto u = static_cast<unsigned char>(text[i]);
    if (u < 0x80 && std::isspace(u)) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size()) {
      const auto v = static_cast<unsigned char>(text[j]);
      if (v < 0x80 && std::isspace(v)) break;
      ++j;
    }
    split_chunk(text.substr(i, j - i), emoticons, tokens);
    i = j;
  }
  return tokens;
}

}  // namespace mvsvm
