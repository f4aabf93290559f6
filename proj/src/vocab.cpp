#include "pmikit/vocab.hpp"

#include <algorithm>

#include "pmikit/error.hpp"

namespace pmikit {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<Count> anchor_counts)
    : words_(std::move(words)), anchor_counts_(std::move(anchor_counts)) {
  if (words_.size() != anchor_counts_.size())
    throw UsageError("vocabulary: words and counts differ in length");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (anchor_counts_[i] <= 0) throw UsageError("vocabulary: nonpositive anchor count");
    auto [it, fresh] = index_.emplace(words_[i], static_cast<WordId>(i));
    if (!fresh) throw UsageError("vocabulary: duplicate word '" + words_[i] + "'");
    total_anchors_ += anchor_counts_[i];
  }
}

WordId Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw VocabularyError("unknown word '" + token + "'");
  return it->second;
}

std::optional<WordId> Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::word(WordId w) const { return words_[check(w)]; }

std::size_t Vocabulary::check(WordId w) const {
  if (w < 0 || static_cast<std::size_t>(w) >= words_.size())
    throw VocabularyError("word id " + std::to_string(w) + " out of range");
  return static_cast<std::size_t>(w);
}

Vocabulary build_vocabulary(const std::vector<std::string>& tokens, int min_count,
                            int max_vocab) {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  if (max_vocab < 0) throw UsageError("max_vocab must be >= 0");

  std::unordered_map<std::string, Count> freq;
  std::unordered_map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto [it, fresh] = freq.emplace(tokens[i], 0);
    it->second += 1;
    if (fresh) first_seen.emplace(tokens[i], i);
  }

  struct Entry {
    const std::string* word;
    Count count;
    std::size_t first;
  };
  std::vector<Entry> retained;
  retained.reserve(freq.size());
  for (const auto& [word, count] : freq)
    if (count >= min_count) retained.push_back({&word, count, first_seen.at(word)});
  if (retained.empty()) throw EmptyCorpusError("no tokens survive min-count filtering");

  std::sort(retained.begin(), retained.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });
  if (max_vocab > 0 && retained.size() > static_cast<std::size_t>(max_vocab))
    retained.resize(static_cast<std::size_t>(max_vocab));

  std::vector<std::string> words;
  std::vector<Count> counts;
  words.reserve(retained.size());
  counts.reserve(retained.size());
  for (const Entry& e : retained) {
    words.push_back(*e.word);
    counts.push_back(e.count);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

std::vector<WordId> encode(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::vector<WordId> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens)
    if (auto id = vocab.find(tok)) out.push_back(*id);
  return out;
}

}  // namespace pmikit
