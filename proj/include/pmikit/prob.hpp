#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pmikit/counts.hpp"

namespace pmikit {

// Empirical probabilities over the anchor event space, as exact count ratios:
//   p(c)    = center_count(c) / T      (anchor has token c)
//   p(w)    = window_count(w) / T      (anchor's window contains w)
//   p(W)    = set_total(W) / T         (window contains every member of W)
//   p(W,c)  = set_per_center(W)[c] / T
// Conditionals are always ratios of the joints above. All logs funnel through
// this class and marginal logs are computed once, so the same probability
// yields the same double everywhere it appears. Identity checks downstream
// rely on that: shared terms cancel exactly instead of to rounding noise.
class ProbabilityModel {
 public:
  ProbabilityModel(const EventCounts& counts, std::span<const WordId> tokens);

  const EventCounts& counts() const { return *counts_; }
  const Vocabulary& vocab() const { return counts_->vocab(); }
  std::span<const WordId> tokens() const { return tokens_; }
  double total() const { return total_; }

  Count pair_count(WordId w, WordId c) const { return counts_->pair_count(w, c); }
  Count set_count(const WordSet& set) const;
  Count set_joint_count(const WordSet& set, WordId c) const;
  std::shared_ptr<const SetCounts> set(const WordSet& set) const;

  double p_center(WordId c) const;
  double p_word(WordId w) const;
  double p_set(const WordSet& set) const;
  double p_pair(WordId w, WordId c) const;
  double p_set_joint(const WordSet& set, WordId c) const;

  // Natural logs of the above; a zero count raises PositivityError naming the
  // event, since log-space callers are exactly the ones that assume support.
  double log_p_center(WordId c) const;
  double log_p_word(WordId w) const;
  double log_p_set(const WordSet& set) const;
  double log_p_pair(WordId w, WordId c) const;
  double log_p_set_joint(const WordSet& set, WordId c) const;

 private:
  const EventCounts* counts_;
  std::span<const WordId> tokens_;
  double total_;
  std::vector<double> log_p_center_;
  std::vector<double> log_p_word_;
};

}  // namespace pmikit
