#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mvsvm {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raw tweet as it appears in the dataset: usernames already masked as
// "@USER" and links as "URL".
struct Tweet {
  std::string id;
  std::string text;
};

// Normalized token sequence produced by the preprocessing pipeline.
struct TokenStream {
  std::vector<std::string> tokens;
  std::string source_id;
};

}  // namespace mvsvm
