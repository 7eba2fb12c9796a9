#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mvsvm/emoji.hpp"
#include "mvsvm/segmentation.hpp"
#include "mvsvm/tokenize.hpp"
#include "mvsvm/types.hpp"

namespace mvsvm {

// Truncates every run of more than three consecutive "@USER" tokens to
// exactly three.
std::vector<std::string> dedup_placeholders(std::vector<std::string> tokens);

// Rewrites tokens exactly equal to "URL" as "http".
std::vector<std::string> replace_url(std::vector<std::string> tokens);

// The full normalization pipeline: emoji textualization, tweet
// tokenization, hashtag segmentation (the '#' is dropped and the
// segmented words spliced in place), placeholder dedup, URL rewrite.
// All three resources are immutable and shareable across threads.
class Preprocessor {
public:
  Preprocessor(const EmojiMap* emoji, const EmoticonSet* emoticons,
               const SegmentationModel* seg)
      : emoji_(emoji), emoticons_(emoticons), seg_(seg) {}

  TokenStream run(const Tweet& tweet) const;
  std::vector<std::string> run_text(std::string_view text) const;

private:
  const EmojiMap* emoji_;
  const EmoticonSet* emoticons_;
  const SegmentationModel* seg_;
};

}  // namespace mvsvm
