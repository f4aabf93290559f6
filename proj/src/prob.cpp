#include "pmikit/prob.hpp"

#include <cmath>
#include <string>

#include "pmikit/error.hpp"

namespace pmikit {

namespace {

std::string set_label(const Vocabulary& vocab, const WordSet& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) s += ",";
    s += vocab.word(set.ids()[i]);
  }
  return s + "}";
}

}  // namespace

ProbabilityModel::ProbabilityModel(const EventCounts& counts, std::span<const WordId> tokens)
    : counts_(&counts),
      tokens_(tokens),
      total_(static_cast<double>(counts.total_anchors())) {
  if (static_cast<Count>(tokens.size()) != counts.total_anchors())
    throw UsageError("token sequence does not match these counts");
  const WordId n = counts.vocab().size();
  log_p_center_.resize(static_cast<std::size_t>(n));
  log_p_word_.resize(static_cast<std::size_t>(n));
  for (WordId i = 0; i < n; ++i) {
    log_p_center_[static_cast<std::size_t>(i)] =
        std::log(static_cast<double>(counts.center_count(i)) / total_);
    log_p_word_[static_cast<std::size_t>(i)] =
        std::log(static_cast<double>(counts.window_count(i)) / total_);
  }
}

Count ProbabilityModel::set_count(const WordSet& set) const {
  if (set.size() == 1) return counts_->window_count(set.ids()[0]);
  return counts_->set_counts(tokens_, set)->total;
}

Count ProbabilityModel::set_joint_count(const WordSet& set, WordId c) const {
  if (set.size() == 1) return counts_->pair_count(set.ids()[0], c);
  return counts_->set_counts(tokens_, set)->per_center[static_cast<std::size_t>(c)];
}

std::shared_ptr<const SetCounts> ProbabilityModel::set(const WordSet& set) const {
  return counts_->set_counts(tokens_, set);
}

double ProbabilityModel::p_center(WordId c) const {
  return static_cast<double>(counts_->center_count(c)) / total_;
}

double ProbabilityModel::p_word(WordId w) const {
  return static_cast<double>(counts_->window_count(w)) / total_;
}

double ProbabilityModel::p_set(const WordSet& set) const {
  return static_cast<double>(set_count(set)) / total_;
}

double ProbabilityModel::p_pair(WordId w, WordId c) const {
  return static_cast<double>(counts_->pair_count(w, c)) / total_;
}

double ProbabilityModel::p_set_joint(const WordSet& set, WordId c) const {
  return static_cast<double>(set_joint_count(set, c)) / total_;
}

double ProbabilityModel::log_p_center(WordId c) const {
  // Center counts are at least min_count, so this is always finite.
  counts_->center_count(c);
  return log_p_center_[static_cast<std::size_t>(c)];
}

double ProbabilityModel::log_p_word(WordId w) const {
  if (counts_->window_count(w) == 0)
    throw PositivityError("word '" + vocab().word(w) + "' never appears in any window");
  return log_p_word_[static_cast<std::size_t>(w)];
}

double ProbabilityModel::log_p_set(const WordSet& set) const {
  if (set.size() == 1) return log_p_word(set.ids()[0]);
  const Count n = set_count(set);
  if (n == 0)
    throw PositivityError("set " + set_label(vocab(), set) + " never fits in one window");
  return std::log(static_cast<double>(n) / total_);
}

double ProbabilityModel::log_p_pair(WordId w, WordId c) const {
  const Count n = counts_->pair_count(w, c);
  if (n == 0)
    throw PositivityError("pair (" + vocab().word(w) + ", " + vocab().word(c) +
                          ") has no co-occurrences");
  return std::log(static_cast<double>(n) / total_);
}

double ProbabilityModel::log_p_set_joint(const WordSet& set, WordId c) const {
  if (set.size() == 1) return log_p_pair(set.ids()[0], c);
  const Count n = set_joint_count(set, c);
  if (n == 0)
    throw PositivityError("set " + set_label(vocab(), set) + " never co-occurs with center '" +
                          vocab().word(c) + "'");
  return std::log(static_cast<double>(n) / total_);
}

}  // namespace pmikit
