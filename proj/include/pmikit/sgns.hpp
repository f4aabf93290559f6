#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmikit/counts.hpp"
#include "pmikit/embed.hpp"

namespace pmikit {

// Skip-gram with negative sampling, desk scale. Positives pair each window
// token (W side) with its anchor's center token (C side), with multiplicity.
// Negatives redraw the center from the unigram distribution raised to
// unigram_power. Single-threaded and bit-deterministic for a fixed seed.
struct SgnsConfig {
  int dim = 32;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;      // decays linearly over all planned updates
  double min_rate_fraction = 1e-4;   // floor as a fraction of learning_rate
  double unigram_power = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

class SgnsTrainer {
 public:
  // Window radius comes from the counts' config; tokens must be the encoded
  // sequence the counts were built from. W starts uniform in ±0.5/dim, C at
  // zero, so every product w^T c is exactly 0 before the first epoch.
  SgnsTrainer(const EventCounts& counts, std::span<const WordId> tokens, SgnsConfig config);

  // One full pass over the anchors. Throws TrainingError naming the last
  // stable epoch if the objective stops being finite.
  void run_epoch();

  int epochs_done() const { return epochs_done_; }
  double last_loss() const { return last_loss_; }  // mean per positive pair

  EmbeddingPair embeddings() const;

 private:
  const EventCounts* counts_;
  std::span<const WordId> tokens_;
  SgnsConfig config_;
  Eigen::MatrixXd w_, c_;  // dim × vocab
  std::vector<double> negative_cdf_;
  std::mt19937_64 gen_;
  std::int64_t updates_done_ = 0;
  std::int64_t updates_planned_ = 0;
  int epochs_done_ = 0;
  double last_loss_ = 0.0;
};

// Convenience wrapper: train for config.epochs and return the pair.
EmbeddingPair train_sgns(const EventCounts& counts, std::span<const WordId> tokens,
                         const SgnsConfig& config = {});

}  // namespace pmikit
