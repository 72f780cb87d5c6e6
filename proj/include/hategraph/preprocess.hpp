#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hategraph::preprocess {

// Tweet normalization. Removes, in order: URL tokens (http://, https://,
// www.), @mentions, the standalone token RT, #hashtag tokens (whole token),
// then punctuation characters; lowercases ASCII; collapses whitespace runs;
// trims. Idempotent.
std::string clean_tweet(std::string_view raw);

// Whitespace split of already-cleaned text.
std::vector<std::string> tokenize(std::string_view cleaned);

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::vector<std::string> words);

  // Newline-delimited UTF-8; '#'-prefixed lines are comments.
  static StopwordSet load(const std::filesystem::path& path);

  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordSet& stop);

// Canonical normalized form shared by every extractor: clean, tokenize,
// drop stopwords, re-join with single spaces.
std::string canonical_text(std::string_view raw, const StopwordSet& stop);

}  // namespace hategraph::preprocess
