#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pmikit/types.hpp"

namespace pmikit {

// Retained words, ordered by descending corpus frequency (ties: first
// occurrence). anchor_count(w) is the number of corpus positions holding w
// after min-count filtering; every position is an anchor, so these sum to
// total_anchors().
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<Count> anchor_counts);

  WordId id(const std::string& token) const;  // throws VocabularyError
  std::optional<WordId> find(const std::string& token) const;
  const std::string& word(WordId w) const;

  Count anchor_count(WordId w) const { return anchor_counts_.at(check(w)); }
  Count total_anchors() const { return total_anchors_; }
  WordId size() const { return static_cast<WordId>(words_.size()); }

 private:
  std::size_t check(WordId w) const;

  std::vector<std::string> words_;
  std::vector<Count> anchor_counts_;
  std::unordered_map<std::string, WordId> index_;
  Count total_anchors_ = 0;
};

// Counts raw tokens, drops words seen fewer than min_count times, and keeps
// at most max_vocab words (0 = unlimited) by frequency. Throws
// EmptyCorpusError when nothing survives.
Vocabulary build_vocabulary(const std::vector<std::string>& tokens, int min_count,
                            int max_vocab = 0);

// Maps tokens to ids, deleting out-of-vocabulary tokens from the sequence.
std::vector<WordId> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab);

}  // namespace pmikit
