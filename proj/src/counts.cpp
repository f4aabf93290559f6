#include "pmikit/counts.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <thread>

#include "pmikit/error.hpp"

namespace pmikit {

void WindowConfig::validate() const {
  if (window_radius < 1) throw UsageError("window_radius must be >= 1");
  if (min_count < 1) throw UsageError("min_count must be >= 1");
}

namespace {

using Key = std::uint64_t;  // center id in the high word, window word in the low

inline Key make_key(WordId center, WordId word) {
  return (static_cast<Key>(static_cast<std::uint32_t>(center)) << 32) |
         static_cast<std::uint32_t>(word);
}

struct Aggregated {
  std::vector<Key> keys;
  std::vector<Count> counts;
};

// Counts one anchor range. Emits one event per (anchor, distinct window word),
// then sorts and run-length encodes.
Aggregated count_shard(std::span<const WordId> tokens, int l, std::int64_t begin,
                       std::int64_t end) {
  const std::int64_t n = static_cast<std::int64_t>(tokens.size());
  std::vector<Key> events;
  events.reserve(static_cast<std::size_t>((end - begin) * 2 * l));
  std::vector<WordId> distinct;
  distinct.reserve(static_cast<std::size_t>(2 * l));

  for (std::int64_t t = begin; t < end; ++t) {
    const WordId center = tokens[t];
    distinct.clear();
    const std::int64_t lo = std::max<std::int64_t>(0, t - l);
    const std::int64_t hi = std::min<std::int64_t>(n - 1, t + l);
    for (std::int64_t s = lo; s <= hi; ++s) {
      if (s == t) continue;
      const WordId w = tokens[s];
      if (std::find(distinct.begin(), distinct.end(), w) == distinct.end())
        distinct.push_back(w);
    }
    for (WordId w : distinct) events.push_back(make_key(center, w));
  }

  std::sort(events.begin(), events.end());
  Aggregated out;
  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i;
    while (j < events.size() && events[j] == events[i]) ++j;
    out.keys.push_back(events[i]);
    out.counts.push_back(static_cast<Count>(j - i));
    i = j;
  }
  return out;
}

}  // namespace

EventCounts count_events(std::span<const WordId> tokens, Vocabulary vocab,
                         const WindowConfig& config, int threads) {
  config.validate();
  if (tokens.empty()) throw EmptyCorpusError("no tokens to count");
  if (static_cast<Count>(tokens.size()) != vocab.total_anchors())
    throw UsageError("token sequence does not match vocabulary anchor total");
  const WordId n = vocab.size();
  for (WordId id : tokens)
    if (id < 0 || id >= n) throw VocabularyError("token id out of range: " + std::to_string(id));

  if (threads <= 0)
    threads = static_cast<int>(std::max(1u, std::min(std::thread::hardware_concurrency(), 8u)));
  const std::int64_t total = static_cast<std::int64_t>(tokens.size());
  const std::int64_t shard = std::max<std::int64_t>(1, (total + threads - 1) / threads);

  std::vector<Aggregated> parts;
  if (threads == 1) {
    // Bound memory by fixed-size shards even in the serial path.
    const std::int64_t step = std::max<std::int64_t>(shard, 1 << 20);
    for (std::int64_t b = 0; b < total; b += step)
      parts.push_back(count_shard(tokens, config.window_radius, b, std::min(total, b + step)));
  } else {
    parts.resize(static_cast<std::size_t>((total + shard - 1) / shard));
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (int i = 0; i < threads; ++i) {
      workers.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < parts.size(); k = next.fetch_add(1)) {
          const std::int64_t b = static_cast<std::int64_t>(k) * shard;
          parts[k] = count_shard(tokens, config.window_radius, b, std::min(total, b + shard));
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  // Merge the sorted shard tables; counts add, so shard boundaries are invisible.
  std::size_t total_entries = 0;
  for (const auto& p : parts) total_entries += p.keys.size();
  std::vector<std::pair<Key, Count>> merged;
  merged.reserve(total_entries);
  for (const auto& p : parts)
    for (std::size_t i = 0; i < p.keys.size(); ++i) merged.emplace_back(p.keys[i], p.counts[i]);
  parts.clear();
  std::sort(merged.begin(), merged.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  EventCounts out;
  out.vocab_ = std::move(vocab);
  out.config_ = config;
  out.center_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  out.window_counts_.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < merged.size();) {
    std::size_t j = i;
    Count c = 0;
    while (j < merged.size() && merged[j].first == merged[i].first) c += merged[j++].second;
    const WordId center = static_cast<WordId>(merged[i].first >> 32);
    const WordId word = static_cast<WordId>(merged[i].first & 0xFFFFFFFFu);
    out.center_offsets_[static_cast<std::size_t>(center) + 1] += 1;
    out.pair_word_.push_back(word);
    out.pair_counts_.push_back(c);
    out.window_counts_[static_cast<std::size_t>(word)] += c;
    i = j;
  }
  for (WordId c = 0; c < n; ++c)
    out.center_offsets_[static_cast<std::size_t>(c) + 1] +=
        out.center_offsets_[static_cast<std::size_t>(c)];
  return out;
}

EventCounts assemble_counts(Vocabulary vocab, const WindowConfig& config,
                            std::vector<std::int64_t> center_offsets,
                            std::vector<WordId> pair_word, std::vector<Count> pair_counts) {
  config.validate();
  const auto n = static_cast<std::size_t>(vocab.size());
  if (center_offsets.size() != n + 1 || center_offsets.front() != 0 ||
      center_offsets.back() != static_cast<std::int64_t>(pair_word.size()) ||
      pair_word.size() != pair_counts.size())
    throw FormatError("pair table shape is inconsistent");
  for (std::size_t c = 0; c < n; ++c) {
    if (center_offsets[c] > center_offsets[c + 1])
      throw FormatError("pair table offsets are not monotonic");
    Count row_total = 0;
    for (auto i = center_offsets[c]; i < center_offsets[c + 1]; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (pair_word[k] < 0 || pair_word[k] >= vocab.size())
        throw FormatError("pair table references an unknown word id");
      if (i > center_offsets[c] && pair_word[k] <= pair_word[k - 1])
        throw FormatError("pair table rows must be strictly sorted by word id");
      if (pair_counts[k] < 1) throw FormatError("pair counts must be positive");
      row_total = std::max(row_total, pair_counts[k]);
    }
    if (row_total > vocab.anchor_count(static_cast<WordId>(c)))
      throw FormatError("pair count exceeds its center count");
  }

  EventCounts out;
  out.vocab_ = std::move(vocab);
  out.config_ = config;
  out.center_offsets_ = std::move(center_offsets);
  out.pair_word_ = std::move(pair_word);
  out.pair_counts_ = std::move(pair_counts);
  out.window_counts_.assign(n, 0);
  for (std::size_t i = 0; i < out.pair_word_.size(); ++i)
    out.window_counts_[static_cast<std::size_t>(out.pair_word_[i])] += out.pair_counts_[i];
  return out;
}

void EventCounts::check_id(WordId w) const {
  if (w < 0 || w >= vocab_.size())
    throw VocabularyError("word id " + std::to_string(w) + " out of range");
}

Count EventCounts::pair_count(WordId w, WordId c) const {
  check_id(w);
  check_id(c);
  auto words = center_row_words(c);
  auto it = std::lower_bound(words.begin(), words.end(), w);
  if (it == words.end() || *it != w) return 0;
  return pair_counts_[static_cast<std::size_t>(
      center_offsets_[static_cast<std::size_t>(c)] + (it - words.begin()))];
}

Count EventCounts::window_count(WordId w) const {
  check_id(w);
  return window_counts_[static_cast<std::size_t>(w)];
}

std::span<const WordId> EventCounts::center_row_words(WordId c) const {
  check_id(c);
  const auto b = static_cast<std::size_t>(center_offsets_[static_cast<std::size_t>(c)]);
  const auto e = static_cast<std::size_t>(center_offsets_[static_cast<std::size_t>(c) + 1]);
  return {pair_word_.data() + b, e - b};
}

std::span<const Count> EventCounts::center_row_counts(WordId c) const {
  check_id(c);
  const auto b = static_cast<std::size_t>(center_offsets_[static_cast<std::size_t>(c)]);
  const auto e = static_cast<std::size_t>(center_offsets_[static_cast<std::size_t>(c) + 1]);
  return {pair_counts_.data() + b, e - b};
}

void EventCounts::build_word_major() const {
  const std::size_t n = static_cast<std::size_t>(vocab_.size());
  lazy_->word_offsets.assign(n + 1, 0);
  for (WordId w : pair_word_) lazy_->word_offsets[static_cast<std::size_t>(w) + 1] += 1;
  for (std::size_t i = 0; i < n; ++i) lazy_->word_offsets[i + 1] += lazy_->word_offsets[i];
  lazy_->word_center.resize(pair_word_.size());
  std::vector<std::int64_t> cursor(lazy_->word_offsets.begin(), lazy_->word_offsets.end() - 1);
  for (WordId c = 0; c < vocab_.size(); ++c) {
    for (WordId w : center_row_words(c))
      lazy_->word_center[static_cast<std::size_t>(cursor[static_cast<std::size_t>(w)]++)] = c;
  }
  // Centers arrive in ascending order per word because the outer loop is sorted.
}

std::span<const WordId> EventCounts::word_support(WordId w) const {
  check_id(w);
  {
    std::shared_lock lock(lazy_->mutex);
    if (lazy_->word_major_built) {
      const auto b = static_cast<std::size_t>(lazy_->word_offsets[static_cast<std::size_t>(w)]);
      const auto e =
          static_cast<std::size_t>(lazy_->word_offsets[static_cast<std::size_t>(w) + 1]);
      return {lazy_->word_center.data() + b, e - b};
    }
  }
  std::unique_lock lock(lazy_->mutex);
  if (!lazy_->word_major_built) {
    build_word_major();
    lazy_->word_major_built = true;
  }
  const auto b = static_cast<std::size_t>(lazy_->word_offsets[static_cast<std::size_t>(w)]);
  const auto e = static_cast<std::size_t>(lazy_->word_offsets[static_cast<std::size_t>(w) + 1]);
  return {lazy_->word_center.data() + b, e - b};
}

std::shared_ptr<const SetCounts> EventCounts::set_counts(std::span<const WordId> tokens,
                                                         const WordSet& set) const {
  if (set.empty()) throw UsageError("word set must not be empty");
  if (static_cast<int>(set.size()) > 2 * config_.window_radius)
    throw CapacityError("set of " + std::to_string(set.size()) +
                        " words cannot fit in a window of capacity " +
                        std::to_string(2 * config_.window_radius));
  for (WordId w : set.ids()) check_id(w);
  if (static_cast<Count>(tokens.size()) != total_anchors())
    throw UsageError("token sequence does not match these counts");

  {
    std::shared_lock lock(lazy_->mutex);
    auto it = lazy_->set_cache.find(set);
    if (it != lazy_->set_cache.end()) return it->second;
  }

  const int l = config_.window_radius;
  const std::int64_t n_tokens = static_cast<std::int64_t>(tokens.size());
  const std::size_t m = set.size();

  // Occurrence positions per member.
  std::vector<std::vector<std::int64_t>> pos(m);
  {
    std::vector<std::pair<WordId, std::size_t>> lookup;
    lookup.reserve(m);
    for (std::size_t i = 0; i < m; ++i) lookup.emplace_back(set.ids()[i], i);
    for (std::int64_t t = 0; t < n_tokens; ++t) {
      const WordId id = tokens[t];
      for (const auto& [w, i] : lookup)
        if (w == id) { pos[i].push_back(t); break; }
    }
  }

  auto result = std::make_shared<SetCounts>();
  result->per_center.assign(static_cast<std::size_t>(vocab_.size()), 0);

  bool any_empty = false;
  for (const auto& p : pos)
    if (p.empty()) any_empty = true;

  if (!any_empty) {
    std::size_t rarest = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (pos[i].size() < pos[rarest].size()) rarest = i;

    auto in_window = [&](const std::vector<std::int64_t>& ps, std::int64_t t) {
      auto it = std::lower_bound(ps.begin(), ps.end(), t - l);
      for (; it != ps.end() && *it <= t + l; ++it)
        if (*it != t) return true;
      return false;
    };

    // Anchors that can see the rarest member, visited once each.
    std::int64_t done = -1;
    for (std::int64_t p : pos[rarest]) {
      const std::int64_t lo = std::max({std::int64_t{0}, p - l, done + 1});
      const std::int64_t hi = std::min(n_tokens - 1, p + l);
      for (std::int64_t t = lo; t <= hi; ++t) {
        done = t;
        bool all = true;
        for (std::size_t i = 0; i < m; ++i)
          if (!in_window(pos[i], t)) { all = false; break; }
        if (all) {
          result->total += 1;
          result->per_center[static_cast<std::size_t>(tokens[t])] += 1;
        }
      }
    }
  }

  std::unique_lock lock(lazy_->mutex);
  auto [it, fresh] = lazy_->set_cache.emplace(set, std::move(result));
  return it->second;
}

std::shared_ptr<const SetCounts> count_set(const EventCounts& counts,
                                           std::span<const WordId> tokens,
                                           const WordSet& set) {
  return counts.set_counts(tokens, set);
}

void inject_pair_count_fault(EventCounts& counts) {
  bool touched = false;
  for (std::size_t i = 0; i < counts.pair_counts_.size(); i += 7) {
    counts.pair_counts_[i] += std::max<Count>(1, counts.pair_counts_[i] / 2);
    touched = true;
  }
  if (!touched) throw UsageError("no pair counts to corrupt");
  std::fill(counts.window_counts_.begin(), counts.window_counts_.end(), 0);
  for (std::size_t i = 0; i < counts.pair_word_.size(); ++i)
    counts.window_counts_[static_cast<std::size_t>(counts.pair_word_[i])] +=
        counts.pair_counts_[i];
}

}  // namespace pmikit
