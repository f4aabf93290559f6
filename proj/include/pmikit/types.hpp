#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pmikit/error.hpp"

namespace pmikit {

using WordId = std::int32_t;
using Count = std::int64_t;

// A set of distinct word ids, kept sorted so equal sets compare equal and
// can key a cache. Duplicates in the input are rejected.
class WordSet {
 public:
  WordSet() = default;

  explicit WordSet(std::vector<WordId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
      throw UsageError("word set contains a duplicate id");
  }

  static WordSet of(std::initializer_list<WordId> ids) {
    return WordSet(std::vector<WordId>(ids));
  }

  // {w} ∪ rest; throws if w already belongs to rest.
  static WordSet with(WordId w, const WordSet& rest) {
    std::vector<WordId> ids(rest.ids_.begin(), rest.ids_.end());
    ids.push_back(w);
    return WordSet(std::move(ids));
  }

  std::span<const WordId> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  bool contains(WordId w) const {
    return std::binary_search(ids_.begin(), ids_.end(), w);
  }

  friend bool operator==(const WordSet&, const WordSet&) = default;
  friend auto operator<=>(const WordSet&, const WordSet&) = default;

 private:
  std::vector<WordId> ids_;
};

}  // namespace pmikit
