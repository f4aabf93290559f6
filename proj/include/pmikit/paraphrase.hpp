#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmikit/embed.hpp"
#include "pmikit/pmi.hpp"

namespace pmikit {

// Contexts where every listed set has a positive joint count, ascending.
std::vector<WordId> defined_support(const ProbabilityModel& model,
                                    std::span<const WordSet> sets);

struct VectorNorms {
  double max_abs = 0.0;
  double rms = 0.0;
};
VectorNorms norms_of(const Eigen::VectorXd& v);

// Paraphrase error: rho_c = ln p(c|W*) - ln p(c|W). Zero iff the two sets
// induce the same context distribution on the support.
Eigen::VectorXd rho(const ProbabilityModel& model, const WordSet& w_set,
                    const WordSet& wstar_set, std::span<const WordId> support);

// Conditional-dependence and independence errors of a set:
//   sigma_c = ln p(W|c) - sum_i ln p(w_i|c)
//   tau     = ln p(W)   - sum_i ln p(w_i)
// Both vanish identically for singletons; that case does exact zeroes with no
// log calls so downstream identities stay bitwise consistent.
struct SigmaTau {
  Eigen::VectorXd sigma;
  double tau = 0.0;
};
SigmaTau sigma_tau(const ProbabilityModel& model, const WordSet& w_set,
                   std::span<const WordId> support);

// The full W -> W* error bundle on the shared defined support.
struct ErrorDecomposition {
  std::vector<WordId> support;
  Eigen::VectorXd rho;
  Eigen::VectorXd sigma_w;
  Eigen::VectorXd sigma_wstar;
  double tau_w = 0.0;
  double tau_wstar = 0.0;

  // rho + sigma_w - sigma_wstar - (tau_w - tau_wstar) 1: the gap between
  // sum-of-PMI columns of W* and W.
  Eigen::VectorXd total() const;
};
ErrorDecomposition decompose_paraphrase(const ProbabilityModel& model, const WordSet& w_set,
                                        const WordSet& wstar_set);

// Residual of: PMI_* = sum_{i in W} PMI_i + rho + sigma - tau 1. An identity
// over consistent count ratios, so the max-abs residual stays below 1e-9 at
// shift 0; at shift ln k every entry moves by exactly ln k (|W|-1).
Eigen::VectorXd lemma1_residual_vector(const PmiView& view, const WordSet& w_set,
                                       WordId wstar, std::span<const WordId> support);
double lemma1_residual(const PmiView& view, const WordSet& w_set, WordId wstar,
                       std::span<const WordId> support);

// Generalization to a set W*: sum_{W*} PMI_i - sum_W PMI_i = rho + sigma^W -
// sigma^W* - (tau^W - tau^W*) 1. A singleton W* reduces to lemma 1 bitwise.
Eigen::VectorXd lemma2_residual_vector(const PmiView& view, const WordSet& w_set,
                                       const WordSet& wstar_set,
                                       std::span<const WordId> support);
double lemma2_residual(const PmiView& view, const WordSet& w_set, const WordSet& wstar_set,
                       std::span<const WordId> support);

enum class KlDirection { forward, backward };

// KL divergence between the context distributions induced by W and by w*.
// forward is D[p(c|W) || p(c|w*)]. Requires the two supports to be equal;
// contexts with mass on one side only are listed in the error.
double kl_divergence(const ProbabilityModel& model, const WordSet& w_set, WordId wstar,
                     KlDirection direction);

// Scans the vocabulary for the words whose induced context distribution is
// closest to that of W. Candidates failing the equal-support precondition are
// skipped and reported; ties break by ascending word id.
struct KlSearchResult {
  struct Entry {
    WordId word;
    double divergence;
  };
  std::vector<Entry> ranked;
  std::vector<WordId> skipped;
};
KlSearchResult kl_search(const ProbabilityModel& model, const WordSet& w_set,
                         KlDirection direction, int top_m);

// Weak paraphrase identity: with c_hat the p(c|W)-expected context embedding,
//   w_*^T c_hat = w_W^T c_hat - Delta + sigma_hat - tau,
// where Delta is the expected log-ratio ln p(c|W) - ln p(c|w*) and sigma_hat
// the expected dependence error. Exact for explicit embeddings; for factored
// pairs the residual is reported without a bound. The expectation runs over
// the shared defined support with p(c|W) renormalized; the kept mass is
// reported.
struct WeakParaphrase {
  std::vector<WordId> support;
  double renormalization = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
WeakParaphrase weak_paraphrase_residual(const EmbeddingPair& embeds,
                                        const ProbabilityModel& model, const WordSet& w_set,
                                        WordId wstar);
// Same computation from PMI values alone, no matrix in memory; bitwise equal
// to the explicit-embedding route.
WeakParaphrase weak_paraphrase_explicit(const PmiView& view, const WordSet& w_set,
                                        WordId wstar);

// Probes the two ways a small total error can mislead: (i) large components
// that cancel in the sum, (ii) error mass lost to the projection null space.
struct FalsePositiveReport {
  double total_max_abs = 0.0;
  double component_max_abs = 0.0;  // largest single component norm
  double total_norm = 0.0;         // 2-norm in full context space
  double projected_norm = 0.0;     // 2-norm after projection
  double projected_ratio = 1.0;
  bool cancellation_flag = false;
  bool nullspace_flag = false;
};
FalsePositiveReport false_positive_probe(const ErrorDecomposition& decomp,
                                         const EmbeddingPair& embeds, double epsilon = 1e-2,
                                         double ratio_threshold = 0.1);

}  // namespace pmikit
