#include "pmikit/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmikit/error.hpp"

namespace pmikit {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -ln sigmoid(x), computed without underflowing to -inf for large |x|.
double softplus_neg(double x) {
  if (x < -30.0) return -x;
  return std::log1p(std::exp(-x));
}

}  // namespace

void SgnsConfig::validate() const {
  if (dim < 1) throw UsageError("sgns dimension must be at least 1");
  if (negatives < 1) throw UsageError("sgns needs at least one negative sample");
  if (epochs < 0) throw UsageError("sgns epoch count cannot be negative");
  if (!(learning_rate > 0.0)) throw UsageError("sgns learning rate must be positive");
  if (!(min_rate_fraction > 0.0) || min_rate_fraction > 1.0)
    throw UsageError("sgns min_rate_fraction must lie in (0, 1]");
  if (!(unigram_power >= 0.0)) throw UsageError("sgns unigram power cannot be negative");
}

SgnsTrainer::SgnsTrainer(const EventCounts& counts, std::span<const WordId> tokens,
                         SgnsConfig config)
    : counts_(&counts), tokens_(tokens), config_(config), gen_(config.seed) {
  config_.validate();
  if (tokens_.empty()) throw UsageError("sgns training needs a non-empty token sequence");
  const WordId n = counts.vocab().size();
  for (WordId t : tokens_) {
    if (t >= n)
      throw VocabularyError("token id " + std::to_string(t) +
                            " is outside the vocabulary of size " + std::to_string(n));
  }

  negative_cdf_.resize(static_cast<std::size_t>(n));
  double running = 0.0;
  for (WordId i = 0; i < n; ++i) {
    running += std::pow(static_cast<double>(counts.vocab().anchor_count(i)),
                        config_.unigram_power);
    negative_cdf_[static_cast<std::size_t>(i)] = running;
  }

  // C at zero makes every product w^T c exactly 0 before training, which the
  // accuracy trend in the tests measures against.
  w_.resize(config_.dim, n);
  c_ = Eigen::MatrixXd::Zero(config_.dim, n);
  const double half = 0.5 / static_cast<double>(config_.dim);
  std::uniform_real_distribution<double> init(-half, half);
  for (WordId col = 0; col < n; ++col)
    for (int row = 0; row < config_.dim; ++row) w_(row, col) = init(gen_);

  const auto total = static_cast<std::int64_t>(tokens_.size());
  const auto radius = static_cast<std::int64_t>(counts.config().window_radius);
  std::int64_t pairs_per_epoch = 0;
  for (std::int64_t t = 0; t < total; ++t) {
    const std::int64_t lo = std::max<std::int64_t>(0, t - radius);
    const std::int64_t hi = std::min<std::int64_t>(total - 1, t + radius);
    pairs_per_epoch += hi - lo;  // window size minus the anchor itself
  }
  updates_planned_ = pairs_per_epoch * std::max(config_.epochs, 1);
}

void SgnsTrainer::run_epoch() {
  const auto total = static_cast<std::int64_t>(tokens_.size());
  const auto radius = static_cast<std::int64_t>(counts_->config().window_radius);
  const double lr0 = config_.learning_rate;
  const double lr_floor = lr0 * config_.min_rate_fraction;
  const double cdf_total = negative_cdf_.back();
  std::uniform_real_distribution<double> pick(0.0, cdf_total);

  Eigen::VectorXd werr(config_.dim);
  double loss_sum = 0.0;
  std::int64_t groups = 0;

  for (std::int64_t t = 0; t < total; ++t) {
    const WordId center = tokens_[static_cast<std::size_t>(t)];
    const std::int64_t lo = std::max<std::int64_t>(0, t - radius);
    const std::int64_t hi = std::min<std::int64_t>(total - 1, t + radius);
    for (std::int64_t s = lo; s <= hi; ++s) {
      if (s == t) continue;
      const WordId word = tokens_[static_cast<std::size_t>(s)];

      double progress = updates_planned_ > 0
                            ? static_cast<double>(updates_done_) /
                                  static_cast<double>(updates_planned_)
                            : 1.0;
      const double lr = std::max(lr_floor, lr0 * (1.0 - progress));
      ++updates_done_;

      auto wcol = w_.col(word);
      werr.setZero();
      double group_loss = 0.0;

      // Positive target, then the negatives; outputs update immediately,
      // the input column once at the end (standard skip-gram order).
      {
        auto ccol = c_.col(center);
        const double x = wcol.dot(ccol);
        group_loss += softplus_neg(x);
        const double g = lr * (1.0 - sigmoid(x));
        werr += g * ccol;
        ccol += g * wcol;
      }
      for (int k = 0; k < config_.negatives; ++k) {
        const double u = pick(gen_);
        const auto it = std::upper_bound(negative_cdf_.begin(), negative_cdf_.end(), u);
        const auto neg = static_cast<WordId>(
            std::min<std::ptrdiff_t>(it - negative_cdf_.begin(),
                                     static_cast<std::ptrdiff_t>(negative_cdf_.size()) - 1));
        auto ccol = c_.col(neg);
        const double x = wcol.dot(ccol);
        group_loss += softplus_neg(-x);
        const double g = lr * (0.0 - sigmoid(x));
        werr += g * ccol;
        ccol += g * wcol;
      }
      wcol += werr;

      if (!std::isfinite(group_loss))
        throw TrainingError("sgns objective became non-finite during epoch " +
                            std::to_string(epochs_done_ + 1) + "; last stable epoch " +
                            std::to_string(epochs_done_));
      loss_sum += group_loss;
      ++groups;
    }
  }

  ++epochs_done_;
  last_loss_ = groups > 0 ? loss_sum / static_cast<double>(groups) : 0.0;
}

EmbeddingPair SgnsTrainer::embeddings() const {
  Provenance p;
  p.method = EmbeddingMethod::sgns;
  p.dim = config_.dim;
  p.negatives = config_.negatives;
  p.epochs = epochs_done_;
  p.seed = config_.seed;
  p.deterministic = true;
  return EmbeddingPair(w_, c_, p);
}

EmbeddingPair train_sgns(const EventCounts& counts, std::span<const WordId> tokens,
                         const SgnsConfig& config) {
  SgnsTrainer trainer(counts, tokens, config);
  for (int e = 0; e < config.epochs; ++e) trainer.run_epoch();
  return trainer.embeddings();
}

}  // namespace pmikit
