#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "pmikit/pmi.hpp"

namespace pmikit {

enum class EmbeddingMethod { explicit_pmi, svd, sgns };

struct Provenance {
  EmbeddingMethod method = EmbeddingMethod::explicit_pmi;
  int dim = 0;
  double shift = 0.0;
  SupportPolicy policy = SupportPolicy::clamp;
  double floor = 0.0;
  double gamma = 0.5;           // svd only
  int negatives = 0;            // sgns only
  int epochs = 0;               // sgns only
  std::uint64_t seed = 0;       // sgns only
  bool deterministic = true;    // sgns: false in the multithreaded mode

  std::string to_json() const;
  static Provenance from_json(const std::string& text);
};

// Paired word/context embeddings, columns indexed by word id. Explicit pairs
// keep C as an implicit identity instead of materializing n x n.
class EmbeddingPair {
 public:
  EmbeddingPair(Eigen::MatrixXd w, Eigen::MatrixXd c, Provenance provenance);
  static EmbeddingPair with_identity_context(Eigen::MatrixXd w, Provenance provenance);

  int dim() const { return static_cast<int>(w_.rows()); }
  WordId words() const { return static_cast<WordId>(w_.cols()); }
  const Provenance& provenance() const { return provenance_; }
  bool identity_context() const { return identity_context_; }

  const Eigen::MatrixXd& word_matrix() const { return w_; }
  // Materializes the identity when implicit; intended for small n.
  Eigen::MatrixXd context_matrix() const;

  Eigen::VectorXd word_vector(WordId i) const;
  Eigen::VectorXd context_vector(WordId j) const;

  // w_i . c_j without materializing anything.
  double product(WordId i, WordId j) const;

  // Least-squares projection (C C^T)^-1 C v of a full-space vector into the
  // embedding space; the identity for explicit pairs. Raises SingularityError
  // (reporting the smallest singular value) when C loses row rank.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  EmbeddingPair(Eigen::MatrixXd w, Provenance provenance, bool identity_tag);

  Eigen::MatrixXd w_;
  Eigen::MatrixXd c_;  // empty when identity_context_
  bool identity_context_ = false;
  Provenance provenance_;
  struct Solver;
  mutable std::shared_ptr<Solver> solver_;  // built on first projection
};

// Explicit construction: word vectors are the policy-resolved PMI columns,
// contexts are the standard basis.
EmbeddingPair explicit_embeddings(const PmiView& view,
                                  std::size_t max_bytes = std::size_t{4} << 30);

struct SvdOptions {
  double gamma = 0.5;  // singular-value split: W gets sigma^(1-gamma), C sigma^gamma
  // At most this many rows/cols for the exact solver; larger inputs use a
  // seeded randomized range finder (deterministic for fixed options).
  Eigen::Index exact_threshold = 2000;
  int oversample = 10;
  int power_iterations = 2;
  std::uint64_t seed = 0x9E3779B97F4A7C15ull;
};

// Rank-d factorization of a square matrix via SVD: W^T C equals the rank-d
// truncation. Deterministic, with the sign of each singular-vector pair fixed
// by making the first nonzero entry of the left vector positive.
EmbeddingPair factorize_svd(const PmiMatrix& matrix, int d, const SvdOptions& options = {});

// Binary layout: magic "PMIKITEM", u32 version, u8 dtype size (8), u8 identity
// flag, u64 d, u64 n, u32 provenance length, provenance JSON, then row-major
// f64 for W and (unless identity) C.
void export_embeddings(const std::filesystem::path& path, const EmbeddingPair& pair);
EmbeddingPair import_embeddings(const std::filesystem::path& path);

// Interoperable text form: "n d" header then "word v1 .. vd" per line (word
// matrix only).
void export_word2vec_text(const std::filesystem::path& path, const EmbeddingPair& pair,
                          const Vocabulary& vocab);

}  // namespace pmikit
