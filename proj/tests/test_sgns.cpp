#include "pmikit/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "pmikit/error.hpp"
#include "pmikit/pmi.hpp"
#include "pmikit/prob.hpp"
#include "support/util.hpp"

using namespace pmikit;

namespace {

struct Fixture {
  testutil::BuiltCorpus built;
  ProbabilityModel model;

  Fixture(std::size_t n, int vocab, std::uint64_t seed, int radius, double zipf = 1.0)
      : built(testutil::build(testutil::random_tokens(n, vocab, seed, zipf), radius)),
        model(built.counts, built.tokens) {}
};

// Most frequent defined pairs (w != c), by pair count then id order.
std::vector<std::pair<WordId, WordId>> frequent_pairs(const EventCounts& counts,
                                                      std::size_t limit) {
  struct Entry {
    Count n;
    WordId w, c;
  };
  std::vector<Entry> entries;
  const WordId v = counts.vocab().size();
  for (WordId w = 0; w < v; ++w)
    for (WordId c = 0; c < v; ++c) {
      if (w == c) continue;
      if (Count n = counts.pair_count(w, c); n > 0) entries.push_back({n, w, c});
    }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(b.n, a.w, a.c) < std::tie(a.n, b.w, b.c);
  });
  if (entries.size() > limit) entries.resize(limit);
  std::vector<std::pair<WordId, WordId>> out;
  for (const Entry& e : entries) out.emplace_back(e.w, e.c);
  return out;
}

double mean_product_error(const EmbeddingPair& embeds, const PmiView& shifted,
                          const std::vector<std::pair<WordId, WordId>>& pairs) {
  double sum = 0.0;
  for (auto [w, c] : pairs) sum += std::abs(embeds.product(w, c) - shifted.value_or_throw(w, c));
  return sum / static_cast<double>(pairs.size());
}

}  // namespace

TEST_CASE("sgns config validation") {
  Fixture fx(400, 10, 3, 2);
  auto expect_usage = [&](SgnsConfig cfg) {
    CHECK_THROWS_AS(SgnsTrainer(fx.built.counts, fx.built.tokens, cfg), UsageError);
  };
  SgnsConfig cfg;
  cfg.dim = 0;
  expect_usage(cfg);
  cfg = {};
  cfg.negatives = 0;
  expect_usage(cfg);
  cfg = {};
  cfg.epochs = -1;
  expect_usage(cfg);
  cfg = {};
  cfg.learning_rate = 0.0;
  expect_usage(cfg);
  cfg = {};
  cfg.min_rate_fraction = 0.0;
  expect_usage(cfg);
  cfg = {};
  cfg.min_rate_fraction = 1.5;
  expect_usage(cfg);
  cfg = {};
  cfg.unigram_power = -0.1;
  expect_usage(cfg);

  CHECK_THROWS_AS(SgnsTrainer(fx.built.counts, std::span<const WordId>{}, SgnsConfig{}),
                  UsageError);
  std::vector<WordId> bad{0, 1, 999};
  CHECK_THROWS_AS(SgnsTrainer(fx.built.counts, bad, SgnsConfig{}), VocabularyError);
}

TEST_CASE("sgns products are exactly zero before the first epoch") {
  Fixture fx(600, 12, 5, 3);
  SgnsConfig cfg;
  cfg.dim = 8;
  cfg.seed = 11;
  SgnsTrainer trainer(fx.built.counts, fx.built.tokens, cfg);
  EmbeddingPair before = trainer.embeddings();
  CHECK(before.context_matrix().isZero(0.0));
  for (WordId w = 0; w < 12; ++w)
    for (WordId c = 0; c < 12; ++c) CHECK(before.product(w, c) == 0.0);
  CHECK(before.provenance().epochs == 0);
}

TEST_CASE("sgns training is bit-deterministic for a fixed seed") {
  Fixture fx(800, 15, 7, 3);
  SgnsConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 3;
  cfg.seed = 99;
  EmbeddingPair a = train_sgns(fx.built.counts, fx.built.tokens, cfg);
  EmbeddingPair b = train_sgns(fx.built.counts, fx.built.tokens, cfg);
  CHECK(a.word_matrix() == b.word_matrix());
  CHECK(a.context_matrix() == b.context_matrix());

  cfg.seed = 100;
  EmbeddingPair c = train_sgns(fx.built.counts, fx.built.tokens, cfg);
  CHECK(a.word_matrix() != c.word_matrix());
}

TEST_CASE("sgns drives products toward shifted pmi on frequent pairs") {
  Fixture fx(4000, 20, 17, 3, 1.0);
  SgnsConfig cfg;
  cfg.dim = 20;
  cfg.negatives = 5;
  cfg.epochs = 40;
  cfg.seed = 21;
  SgnsTrainer trainer(fx.built.counts, fx.built.tokens, cfg);

  PmiView shifted(fx.model, std::log(static_cast<double>(cfg.negatives)));
  auto pairs = frequent_pairs(fx.built.counts, 100);
  REQUIRE(pairs.size() == 100);

  const double baseline = mean_product_error(trainer.embeddings(), shifted, pairs);
  REQUIRE(baseline > 0.0);
  for (int e = 0; e < cfg.epochs; ++e) trainer.run_epoch();
  const double trained = mean_product_error(trainer.embeddings(), shifted, pairs);

  CHECK(trained < 0.5 * baseline);
  CHECK(trainer.epochs_done() == cfg.epochs);
  CHECK(std::isfinite(trainer.last_loss()));

  // Word and context spaces must not collapse onto each other.
  const EmbeddingPair embeds = trainer.embeddings();
  double max_cos = -1.0;
  for (WordId i = 0; i < embeds.words(); ++i) {
    Eigen::VectorXd w = embeds.word_vector(i);
    Eigen::VectorXd c = embeds.context_vector(i);
    const double den = w.norm() * c.norm();
    if (den > 0.0) max_cos = std::max(max_cos, w.dot(c) / den);
  }
  CHECK(max_cos < 0.999);
}

TEST_CASE("sgns reports the last stable epoch when the objective diverges") {
  Fixture fx(2000, 8, 29, 3);
  SgnsConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 5;
  cfg.learning_rate = 1e9;
  SgnsTrainer trainer(fx.built.counts, fx.built.tokens, cfg);
  CHECK_THROWS_WITH_AS(
      [&] {
        for (int e = 0; e < cfg.epochs; ++e) trainer.run_epoch();
      }(),
      doctest::Contains("last stable epoch"), TrainingError);
}
