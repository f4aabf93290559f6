#include <doctest.h>

#include <algorithm>
#include <random>

#include "pmikit/counts.hpp"
#include "pmikit/error.hpp"
#include "support/brute.hpp"
#include "support/util.hpp"

using namespace pmikit;
using testutil::build;

namespace {

// Compare every pair/center/window count against the brute enumerator.
void check_against_brute(const testutil::BuiltCorpus& c, int l) {
  brute::PairTable ref = brute::pair_counts(std::span<const WordId>(c.tokens), l);
  const WordId n = c.counts.vocab().size();
  REQUIRE(c.counts.total_anchors() == ref.total);
  for (WordId w = 0; w < n; ++w) {
    CHECK(c.counts.window_count(w) == ref.window_count(w));
    for (WordId ctr = 0; ctr < n; ++ctr)
      CHECK(c.counts.pair_count(w, ctr) == ref.pair_count(w, ctr));
  }
  for (WordId ctr = 0; ctr < n; ++ctr)
    CHECK(c.counts.center_count(ctr) == ref.center_count(ctr));
}

}  // namespace

TEST_CASE("six-token alternating corpus, radius 1") {
  auto c = build("a b a b a b", 1);
  const WordId a = c.counts.vocab().id("a");
  const WordId b = c.counts.vocab().id("b");

  CHECK(c.counts.total_anchors() == 6);
  CHECK(c.counts.pair_count(b, a) == 3);
  CHECK(c.counts.pair_count(a, b) == 3);
  CHECK(c.counts.pair_count(a, a) == 0);
  CHECK(c.counts.pair_count(b, b) == 0);
  CHECK(c.counts.center_count(a) == 3);
  CHECK(c.counts.center_count(b) == 3);

  // With radius 1 no window holds both letters; with radius 2 every one does.
  auto s1 = count_set(c.counts, c.tokens, WordSet::of({a, b}));
  CHECK(s1->total == 0);

  auto c2 = build("a b a b a b", 2);
  auto s2 = count_set(c2.counts, c2.tokens, WordSet::of({c2.counts.vocab().id("a"),
                                                         c2.counts.vocab().id("b")}));
  CHECK(s2->total == 6);
  CHECK(s2->per_center[0] + s2->per_center[1] == 6);
}

TEST_CASE("single-token corpus") {
  auto c = build("x", 1);
  CHECK(c.counts.total_anchors() == 1);
  CHECK(c.counts.center_count(0) == 1);
  CHECK(c.counts.pair_count(0, 0) == 0);
  CHECK(c.counts.window_count(0) == 0);
}

TEST_CASE("pair counts match brute enumeration on random corpora") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    for (int l : {1, 2, 3}) {
      auto toks = testutil::random_tokens(200, 8, seed);
      auto c = build(toks, l);
      check_against_brute(c, l);
    }
  }
}

TEST_CASE("boundary windows: corpora no longer than one window") {
  for (int len : {1, 2, 3, 4, 5, 9}) {
    auto toks = testutil::random_tokens(len, 3, 99 + len);
    auto c = build(toks, 4);
    check_against_brute(c, 4);
  }
}

TEST_CASE("set counts match brute enumeration") {
  auto toks = testutil::random_tokens(300, 6, 7);
  auto c = build(toks, 3);
  std::mt19937_64 gen(21);
  const WordId n = c.counts.vocab().size();
  for (int trial = 0; trial < 40; ++trial) {
    int size = 1 + static_cast<int>(gen() % 3);
    std::vector<WordId> ids(n);
    for (WordId i = 0; i < n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), gen);
    ids.resize(size);
    WordSet set(ids);

    auto got = count_set(c.counts, c.tokens, set);
    std::vector<brute::Id> bset(set.ids().begin(), set.ids().end());
    brute::SetTable ref = brute::set_counts(std::span<const WordId>(c.tokens), 3, bset);
    REQUIRE(got->total == ref.total);
    for (WordId ctr = 0; ctr < n; ++ctr) {
      brute::Count want = ref.per_center.count(ctr) ? ref.per_center.at(ctr) : 0;
      CHECK(got->per_center[ctr] == want);
    }
  }
}

TEST_CASE("singleton set counts equal pair counts") {
  auto toks = testutil::random_tokens(400, 10, 31);
  auto c = build(toks, 2);
  const WordId n = c.counts.vocab().size();
  for (WordId w = 0; w < n; ++w) {
    auto s = count_set(c.counts, c.tokens, WordSet::of({w}));
    CHECK(s->total == c.counts.window_count(w));
    for (WordId ctr = 0; ctr < n; ++ctr)
      CHECK(s->per_center[ctr] == c.counts.pair_count(w, ctr));
  }
}

TEST_CASE("set count monotonicity: supersets never count more") {
  auto toks = testutil::random_tokens(500, 6, 47);
  auto c = build(toks, 3);
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    WordId x = static_cast<WordId>(gen() % 6), y = static_cast<WordId>(gen() % 6),
           z = static_cast<WordId>(gen() % 6);
    if (x == y || y == z || x == z) continue;
    auto small = count_set(c.counts, c.tokens, WordSet::of({x, y}));
    auto large = count_set(c.counts, c.tokens, WordSet::of({x, y, z}));
    CHECK(large->total <= small->total);
    for (std::size_t i = 0; i < small->per_center.size(); ++i)
      CHECK(large->per_center[i] <= small->per_center[i]);
  }
}

TEST_CASE("sharded counting merges to the single-threaded result") {
  auto toks = testutil::random_tokens(3000, 12, 61);
  auto one = build(toks, 4, 1, 1);
  auto four = build(toks, 4, 1, 4);
  const WordId n = one.counts.vocab().size();
  REQUIRE(four.counts.vocab().size() == n);
  for (WordId w = 0; w < n; ++w) {
    CHECK(one.counts.window_count(w) == four.counts.window_count(w));
    CHECK(std::ranges::equal(one.counts.center_row_words(w), four.counts.center_row_words(w)));
    CHECK(std::ranges::equal(one.counts.center_row_counts(w), four.counts.center_row_counts(w)));
  }
}

TEST_CASE("set cache returns the same object and tolerates concurrent reads") {
  auto c = build("a b c a b c a b c", 2);
  WordSet set = WordSet::of({0, 1});
  auto first = count_set(c.counts, c.tokens, set);
  auto second = count_set(c.counts, c.tokens, set);
  CHECK(first.get() == second.get());
}

TEST_CASE("min-count filtering deletes rare tokens before counting") {
  // "q" appears once and is dropped; the survivors become adjacent.
  auto c = build(testutil::split("a q b a b a b"), 1, 2);
  CHECK(c.counts.vocab().size() == 2);
  CHECK(c.counts.total_anchors() == 6);
  const WordId a = c.counts.vocab().id("a");
  const WordId b = c.counts.vocab().id("b");
  CHECK(c.counts.pair_count(b, a) == 3);
  CHECK_THROWS_AS((void)c.counts.vocab().id("q"), VocabularyError);
}

TEST_CASE("vocabulary cap keeps the most frequent words") {
  auto toks = testutil::split("e e e e d d d c c b a");
  auto c = build(toks, 1, 1, 1, /*max_vocab=*/2);
  CHECK(c.counts.vocab().size() == 2);
  CHECK(c.counts.vocab().word(0) == "e");
  CHECK(c.counts.vocab().word(1) == "d");
  CHECK(c.counts.total_anchors() == 7);
}

TEST_CASE("error paths: capacity, vocabulary, duplicates, empty") {
  auto c = build("a b c a b c", 1);
  // |set| may not exceed the window capacity 2l.
  CHECK_THROWS_AS((void)count_set(c.counts, c.tokens, WordSet::of({0, 1, 2})), CapacityError);
  CHECK_THROWS_AS((void)count_set(c.counts, c.tokens, WordSet::of({0, 99})), VocabularyError);
  CHECK_THROWS_AS(WordSet::of({1, 1}), UsageError);
  CHECK_THROWS_AS((void)count_set(c.counts, c.tokens, WordSet()), UsageError);

  CHECK_THROWS_AS(build("a b c", 1, 5), EmptyCorpusError);
  WindowConfig bad;
  bad.window_radius = 0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
}
