#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <vector>

#include "pmikit/types.hpp"
#include "pmikit/vocab.hpp"

namespace pmikit {

struct WindowConfig {
  int window_radius = 4;  // l tokens on each side of the anchor
  int min_count = 1;

  void validate() const;
};

// Occurrence counts for one word set: how many anchors have every member of
// the set inside their window, in total and split by the anchor's token.
struct SetCounts {
  Count total = 0;
  std::vector<Count> per_center;  // indexed by center id
};

// Windowed co-occurrence events. Every corpus position t is an anchor; its
// window is positions [t-l, t+l] except t itself, truncated at the corpus
// boundary. pair_count(w, c) counts anchors with center token c whose window
// contains w at least once (presence, not multiplicity), so
// 0 <= pair_count(w, c) <= center_count(c).
class EventCounts {
 public:
  const Vocabulary& vocab() const { return vocab_; }
  const WindowConfig& config() const { return config_; }

  Count total_anchors() const { return vocab_.total_anchors(); }
  Count center_count(WordId c) const { return vocab_.anchor_count(c); }
  Count pair_count(WordId w, WordId c) const;
  // Number of anchors whose window contains w = sum over c of pair_count(w, c).
  Count window_count(WordId w) const;

  Count pair_total() const { return static_cast<Count>(pair_word_.size()); }

  // Row of pair counts for one center, sorted by word id.
  std::span<const WordId> center_row_words(WordId c) const;
  std::span<const Count> center_row_counts(WordId c) const;

  // Centers co-occurring with w, sorted. Built lazily, cached.
  std::span<const WordId> word_support(WordId w) const;

  // Anchors whose window contains every member of the set. Requires the token
  // sequence the counts were built from; results are cached per set. The set
  // must fit in a window: 1 <= |set| <= 2 * window_radius.
  std::shared_ptr<const SetCounts> set_counts(std::span<const WordId> tokens,
                                              const WordSet& set) const;

  friend EventCounts count_events(std::span<const WordId> tokens, Vocabulary vocab,
                                  const WindowConfig& config, int threads);
  friend EventCounts assemble_counts(Vocabulary vocab, const WindowConfig& config,
                                     std::vector<std::int64_t> center_offsets,
                                     std::vector<WordId> pair_word,
                                     std::vector<Count> pair_counts);
  friend void inject_pair_count_fault(EventCounts& counts);

 private:
  void check_id(WordId w) const;
  void build_word_major() const;

  Vocabulary vocab_;
  WindowConfig config_;

  // Pair counts in compressed rows, one row per center, sorted by word id.
  std::vector<std::int64_t> center_offsets_;  // size n+1
  std::vector<WordId> pair_word_;
  std::vector<Count> pair_counts_;
  std::vector<Count> window_counts_;  // per word

  // Lazily built derived data, shared across readers.
  struct LazyState {
    std::shared_mutex mutex;
    std::vector<std::int64_t> word_offsets;  // word -> sorted centers
    std::vector<WordId> word_center;
    bool word_major_built = false;
    std::map<WordSet, std::shared_ptr<const SetCounts>> set_cache;
  };
  mutable std::unique_ptr<LazyState> lazy_ = std::make_unique<LazyState>();
};

// Single pass over the anchors. threads > 1 shards the anchor range and merges
// partial counts; the merged result is identical to the single-threaded one.
// threads = 0 picks a default. Throws EmptyCorpusError on an empty sequence.
EventCounts count_events(std::span<const WordId> tokens, Vocabulary vocab,
                         const WindowConfig& config, int threads = 0);

// Same event space as EventCounts::set_counts, as a free operation.
std::shared_ptr<const SetCounts> count_set(const EventCounts& counts,
                                           std::span<const WordId> tokens,
                                           const WordSet& set);

// Rebuilds an EventCounts from already-counted rows (store loading). Validates
// shape, ordering, and the pair <= center bound; recomputes window counts.
EventCounts assemble_counts(Vocabulary vocab, const WindowConfig& config,
                            std::vector<std::int64_t> center_offsets,
                            std::vector<WordId> pair_word, std::vector<Count> pair_counts);

// Test hook: perturbs stored pair counts so that downstream identity checks
// must notice the inconsistency.
void inject_pair_count_fault(EventCounts& counts);

}  // namespace pmikit
