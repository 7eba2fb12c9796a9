#include "mvsvm/preprocess.hpp"

#include <cctype>

namespace mvsvm {

std::vector<std::string> dedup_placeholders(std::vector<std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  size_t run = 0;
  for (auto& t : tokens) {
    if (t == "@USER") {
      if (++run > 3) continue;
    } else {
      run = 0;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> replace_url(std::vector<std::string> tokens) {
  for (auto& t : tokens)
    if (t == "URL") t = "http";
  return tokens;
}

namespace {

// Lowercased ASCII-alphanumeric content of a hashtag body; everything
// else is stripped.
std::string hashtag_body(std::string_view token) {
  std::string body;
  for (size_t i = 1; i < token.size(); ++i) {
    const auto u = static_cast<unsigned char>(token[i]);
    if (u < 0x80 && std::isalnum(u))
      body.push_back(static_cast<char>(std::tolower(u)));
  }
  return body;
}

}  // namespace

std::vector<std::string> Preprocessor::run_text(std::string_view text) const {
  const std::string textual = replace_emoji(text, *emoji_);
  std::vector<std::string> tokens = tokenize(textual, *emoticons_);

  std::vector<std::string> expanded;
  expanded.reserve(tokens.size());
  for (auto& t : tokens) {
    if (t.empty() || t[0] != '#') {
      expanded.push_back(std::move(t));
      continue;
    }
    const std::string body = hashtag_body(t);
    if (body.empty()) continue;  // bare '#' carries no content
    if (body.size() > 250) {
      expanded.push_back(body);  // too long to segment, keep whole
      continue;
    }
    for (auto& w : segment(*seg_, body)) expanded.push_back(std::move(w));
  }

  return replace_url(dedup_placeholders(std::move(expanded)));
}

TokenStream Preprocessor::run(const Tweet& tweet) const {
  return TokenStream{run_text(tweet.text), tweet.id};
}

}  // namespace mvsvm
