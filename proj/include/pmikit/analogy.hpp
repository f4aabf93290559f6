#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmikit/paraphrase.hpp"

namespace pmikit {

// A word transformation x -> x*: add the words in plus_set, drop the words in
// minus_set. The induced sets are w() = {source} ∪ plus_set and
// wstar() = {target} ∪ minus_set.
struct Transformation {
  WordId source = 0;
  WordId target = 0;
  WordSet plus_set;
  WordSet minus_set;

  WordSet w() const;      // throws UsageError if source ∈ plus_set
  WordSet wstar() const;  // throws UsageError if target ∈ minus_set
};

// Residual of the transformation identity
//   PMI_x* - PMI_x - sum_{W+} PMI_i + sum_{W-} PMI_i
//     = rho + sigma^W - sigma^W* - (tau^W - tau^W*) 1
// over the support, together with the error terms. At shift ln k the residual
// picks up the exact constant ln k (|W+| - |W-|) per entry.
struct TransformationReport {
  Eigen::VectorXd residual_vector;
  double residual = 0.0;  // max abs entry
  ErrorDecomposition decomposition;
};
TransformationReport transformation_residual(const PmiView& view, const Transformation& t,
                                             std::span<const WordId> support);
// Same, over the shared defined support of w() and wstar().
TransformationReport transformation_residual(const PmiView& view, const Transformation& t);

// "a is to a* as b is to b*", decomposed on the shared support:
//   offset_c = PMI_b* - PMI_a* + PMI_a - PMI_b
//            = PE + CE + IE   with W = {b, a*}, W* = {b*, a},
// PE = rho (paraphrase error), CE = sigma^W - sigma^W* (conditional
// dependence), IE = -(tau^W - tau^W*) 1 (independence). PE small is what makes
// the analogy genuine; it is reported, never assumed.
struct AnalogyDecomposition {
  WordId a = 0, astar = 0, b = 0, bstar = 0;
  std::vector<WordId> support;
  Eigen::VectorXd offset;
  Eigen::VectorXd pe;
  Eigen::VectorXd ce;
  Eigen::VectorXd ie;  // constant vector
  double tau_w = 0.0;
  double tau_wstar = 0.0;
  double identity_residual = 0.0;  // max abs of offset - pe - ce - ie
};
AnalogyDecomposition analogy_decomposition(const PmiView& view, WordId a, WordId astar,
                                           WordId b, WordId bstar,
                                           std::span<const WordId> support);
// Support = shared defined support of {b, a*} and {b*, a}, which already
// implies every singleton event is defined there.
AnalogyDecomposition analogy_decomposition(const PmiView& view, WordId a, WordId astar,
                                           WordId b, WordId bstar);

// The support-indexed components carried into embedding space: scatter to the
// full context dimension, then apply the pair's projection. With explicit
// embeddings the projection is the identity, so the projected components equal
// the full-space ones bitwise.
struct ProjectedComponents {
  Eigen::VectorXd offset;
  Eigen::VectorXd pe;
  Eigen::VectorXd ce;
  Eigen::VectorXd ie;
};
ProjectedComponents project_components(const AnalogyDecomposition& decomp,
                                       const EmbeddingPair& embeds);

// Checks the inference "parameters transforming a -> a* also transform
// b -> b*, up to dependence error". With W_i/W_i* the induced sets of the two
// transformations, exactly
//   rho_2 = rho_1 + offset + (D_1 - D_2),  D_i = sigma^{W_i} - sigma^{W_i*}
//                                                - (tau^{W_i} - tau^{W_i*}) 1,
// so the reported inequality drops the analogy offset and holds when the
// quadruple is a genuine analogy. Report only; pass is not a theorem.
struct EquivalenceReport {
  std::vector<WordId> support;
  VectorNorms rho1;
  VectorNorms rho2;
  VectorNorms dependence_diff;
  double tolerance = 0.0;
  bool pass = false;  // rho2.rms <= rho1.rms + dependence_diff.rms + tolerance
};
EquivalenceReport parameter_equivalence_check(const PmiView& view, WordId a, WordId astar,
                                              WordId b, WordId bstar, const WordSet& plus_set,
                                              const WordSet& minus_set,
                                              std::span<const WordId> support,
                                              double tolerance = 1e-9);
EquivalenceReport parameter_equivalence_check(const PmiView& view, WordId a, WordId astar,
                                              WordId b, WordId bstar, const WordSet& plus_set,
                                              const WordSet& minus_set, double tolerance = 1e-9);

enum class QueryMetric { cosine, euclidean };

// Nearest candidates to w_a* - w_a + w_b. Cosine ranks by descending
// similarity (zero-norm vectors score 0), euclidean by ascending distance;
// ties break by ascending word id. exclude drops {a, a*, b} from candidacy;
// turning it off is the diagnostic mode.
struct QueryResult {
  struct Candidate {
    WordId word;
    double score;  // similarity for cosine, distance for euclidean
  };
  std::vector<Candidate> ranked;
  Eigen::VectorXd target;
};
QueryResult analogy_query(const EmbeddingPair& embeds, WordId a, WordId astar, WordId b,
                          QueryMetric metric = QueryMetric::cosine, int top_m = 10,
                          bool exclude = true);

// Max abs difference between the shifted and unshifted analogy offsets on the
// support. Two plus and two minus terms, so the shifts cancel: ≤ 1e-12 for
// any k, exactly 0 when both views carry the same shift.
double shift_cancellation_check(const PmiView& view_pmi, const PmiView& view_spmi, WordId a,
                                WordId astar, WordId b, WordId bstar,
                                std::span<const WordId> support);

// 3-space coordinates for plotting a decomposed analogy: the four words, the
// point w_a* - w_a + w_b, and the zigzag of projected CE, IE, PE segments.
// Basis: e1, e2 from Gram-Schmidt on (w_a* - w_a, w_b* - w_a) anchored at w_a,
// e3 the normalized off-plane residual of the approximation point (zero when
// everything is coplanar). Visualization aid only.
struct PlotPoint {
  std::string label;
  Eigen::Vector3d xyz;
};
std::vector<PlotPoint> analogy_plot_points(const EmbeddingPair& embeds,
                                           const AnalogyDecomposition& decomp);

}  // namespace pmikit
