#include "pmikit/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "pmikit/error.hpp"

namespace pmikit {

namespace {

using nlohmann::json;

const char* method_name(EmbeddingMethod m) {
  switch (m) {
    case EmbeddingMethod::explicit_pmi: return "explicit";
    case EmbeddingMethod::svd: return "svd";
    case EmbeddingMethod::sgns: return "sgns";
  }
  return "?";
}

EmbeddingMethod method_from_name(const std::string& s) {
  if (s == "explicit") return EmbeddingMethod::explicit_pmi;
  if (s == "svd") return EmbeddingMethod::svd;
  if (s == "sgns") return EmbeddingMethod::sgns;
  throw FormatError("unknown embedding method '" + s + "'");
}

}  // namespace

std::string Provenance::to_json() const {
  json j;
  j["method"] = method_name(method);
  j["dim"] = dim;
  j["shift"] = shift;
  j["policy"] = policy == SupportPolicy::strict ? "strict" : "clamp";
  j["floor"] = floor;
  switch (method) {
    case EmbeddingMethod::svd:
      j["gamma"] = gamma;
      break;
    case EmbeddingMethod::sgns:
      j["negatives"] = negatives;
      j["epochs"] = epochs;
      j["seed"] = seed;
      j["deterministic"] = deterministic;
      break;
    case EmbeddingMethod::explicit_pmi:
      break;
  }
  return j.dump();
}

Provenance Provenance::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError("bad provenance: " + std::string(e.what()));
  }
  Provenance p;
  try {
    p.method = method_from_name(j.at("method").get<std::string>());
    p.dim = j.at("dim").get<int>();
    p.shift = j.at("shift").get<double>();
    p.policy = j.at("policy").get<std::string>() == "strict" ? SupportPolicy::strict
                                                             : SupportPolicy::clamp;
    p.floor = j.at("floor").get<double>();
    p.gamma = j.value("gamma", 0.5);
    p.negatives = j.value("negatives", 0);
    p.epochs = j.value("epochs", 0);
    p.seed = j.value("seed", std::uint64_t{0});
    p.deterministic = j.value("deterministic", true);
  } catch (const json::exception& e) {
    throw FormatError("incomplete provenance: " + std::string(e.what()));
  }
  return p;
}

struct EmbeddingPair::Solver {
  Eigen::LLT<Eigen::MatrixXd> llt;
};

EmbeddingPair::EmbeddingPair(Eigen::MatrixXd w, Eigen::MatrixXd c, Provenance provenance)
    : w_(std::move(w)), c_(std::move(c)), provenance_(std::move(provenance)) {
  if (w_.rows() != c_.rows() || w_.cols() != c_.cols())
    throw UsageError("word and context matrices must have matching shapes");
  if (w_.cols() == 0) throw UsageError("embeddings need at least one word");
}

EmbeddingPair::EmbeddingPair(Eigen::MatrixXd w, Provenance provenance, bool)
    : w_(std::move(w)), identity_context_(true), provenance_(std::move(provenance)) {
  if (w_.rows() != w_.cols())
    throw UsageError("an identity context requires a square word matrix");
  if (w_.cols() == 0) throw UsageError("embeddings need at least one word");
}

EmbeddingPair EmbeddingPair::with_identity_context(Eigen::MatrixXd w, Provenance provenance) {
  return EmbeddingPair(std::move(w), std::move(provenance), true);
}

Eigen::MatrixXd EmbeddingPair::context_matrix() const {
  if (identity_context_) return Eigen::MatrixXd::Identity(w_.rows(), w_.cols());
  return c_;
}

Eigen::VectorXd EmbeddingPair::word_vector(WordId i) const { return w_.col(i); }

Eigen::VectorXd EmbeddingPair::context_vector(WordId j) const {
  if (identity_context_) return Eigen::VectorXd::Unit(w_.rows(), j);
  return c_.col(j);
}

double EmbeddingPair::product(WordId i, WordId j) const {
  if (identity_context_) return w_(j, i);
  return w_.col(i).dot(c_.col(j));
}

Eigen::VectorXd EmbeddingPair::project(const Eigen::VectorXd& v) const {
  if (v.size() != static_cast<Eigen::Index>(words()))
    throw UsageError("projection input must have one entry per word");
  if (identity_context_) return v;
  if (!solver_) {
    auto s = std::make_shared<Solver>();
    s->llt.compute(c_ * c_.transpose());
    if (s->llt.info() != Eigen::Success) {
      const double sigma_min =
          Eigen::BDCSVD<Eigen::MatrixXd>(c_).singularValues().minCoeff();
      throw SingularityError("context matrix is rank-deficient (smallest singular value " +
                             std::to_string(sigma_min) + ")");
    }
    solver_ = std::move(s);
  }
  return solver_->llt.solve(c_ * v);
}

EmbeddingPair explicit_embeddings(const PmiView& view, std::size_t max_bytes) {
  const ProbabilityModel& model = view.model();
  const auto n = static_cast<std::size_t>(model.vocab().size());
  if (n * n > max_bytes / sizeof(double))
    throw CapacityError("explicit embeddings for " + std::to_string(n) +
                        " words exceed the memory budget; raise min_count");

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w;
  if (view.policy() == SupportPolicy::strict) {
    if (model.counts().pair_total() < static_cast<Count>(n * n))
      throw PositivityError("explicit embeddings have undefined entries under strict policy");
    w.resize(ni, ni);
  } else {
    w = Eigen::MatrixXd::Constant(ni, ni, view.floor());
  }

  // Row j of W holds every word's PMI at context j, which is center row j of
  // the counts. Same arithmetic as PmiView::value, kept bitwise equal.
  const double total = model.total();
  for (WordId c = 0; c < model.vocab().size(); ++c) {
    auto words = model.counts().center_row_words(c);
    auto counts = model.counts().center_row_counts(c);
    const double lc = model.log_p_center(c);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const WordId x = words[i];
      w(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(x)) =
          std::log(static_cast<double>(counts[i]) / total) - model.log_p_word(x) - lc -
          view.shift();
    }
  }

  Provenance prov;
  prov.method = EmbeddingMethod::explicit_pmi;
  prov.dim = static_cast<int>(n);
  prov.shift = view.shift();
  prov.policy = view.policy();
  prov.floor = view.floor();
  return EmbeddingPair::with_identity_context(std::move(w), std::move(prov));
}

namespace {

// Thin Q of a QR decomposition.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

struct ThinSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

ThinSvd exact_svd(const Eigen::MatrixXd& m, int d) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed to converge");
  return {svd.matrixU().leftCols(d), svd.singularValues().head(d), svd.matrixV().leftCols(d)};
}

ThinSvd randomized_svd(const Eigen::MatrixXd& m, int d, const SvdOptions& options) {
  const Eigen::Index n = m.rows();
  const Eigen::Index r =
      std::min<Eigen::Index>(n, static_cast<Eigen::Index>(d) + options.oversample);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd probe(n, r);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < n; ++i) probe(i, j) = gauss(rng);

  Eigen::MatrixXd q = orthonormalize(m * probe);
  for (int it = 0; it < options.power_iterations; ++it) {
    q = orthonormalize(m.transpose() * q);
    q = orthonormalize(m * q);
  }

  const Eigen::MatrixXd b = q.transpose() * m;  // r x n
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD failed to converge");
  return {q * svd.matrixU().leftCols(d), svd.singularValues().head(d),
          svd.matrixV().leftCols(d)};
}

}  // namespace

EmbeddingPair factorize_svd(const PmiMatrix& matrix, int d, const SvdOptions& options) {
  const Eigen::Index n = matrix.values.rows();
  if (matrix.values.cols() != n) throw UsageError("factorization expects a square matrix");
  if (d < 1) throw UsageError("embedding dimension must be at least 1");
  if (d > n)
    throw UsageError("embedding dimension " + std::to_string(d) + " exceeds matrix size " +
                     std::to_string(n));
  if (options.gamma < 0.0 || options.gamma > 1.0)
    throw UsageError("gamma must lie in [0, 1]");

  const bool exact = n <= options.exact_threshold ||
                     static_cast<Eigen::Index>(d) + options.oversample >= n;
  ThinSvd svd = exact ? exact_svd(matrix.values, d) : randomized_svd(matrix.values, d, options);

  for (int k = 0; k < d; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = svd.u(i, k);
      if (u != 0.0) {
        if (u < 0.0) {
          svd.u.col(k) = -svd.u.col(k);
          svd.v.col(k) = -svd.v.col(k);
        }
        break;
      }
    }
  }

  Eigen::VectorXd w_scale(d), c_scale(d);
  for (int k = 0; k < d; ++k) {
    w_scale[k] = std::pow(svd.sigma[k], 1.0 - options.gamma);
    c_scale[k] = std::pow(svd.sigma[k], options.gamma);
  }
  Eigen::MatrixXd w = w_scale.asDiagonal() * svd.u.transpose();
  Eigen::MatrixXd c = c_scale.asDiagonal() * svd.v.transpose();

  Provenance prov;
  prov.method = EmbeddingMethod::svd;
  prov.dim = d;
  prov.gamma = options.gamma;
  prov.shift = matrix.shift;
  prov.policy = matrix.policy;
  return EmbeddingPair(std::move(w), std::move(c), std::move(prov));
}

namespace {

constexpr char kEmbedMagic[8] = {'P', 'M', 'I', 'K', 'I', 'T', 'E', 'M'};
constexpr std::uint32_t kEmbedVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& p) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw FormatError("truncated embedding file " + p.string());
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put(out, m(r, c));
}

void take_matrix(std::istream& in, const std::filesystem::path& p, Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = take<double>(in, p);
}

}  // namespace

void export_embeddings(const std::filesystem::path& path, const EmbeddingPair& pair) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.write(kEmbedMagic, sizeof kEmbedMagic);
  put(f, kEmbedVersion);
  put(f, static_cast<std::uint8_t>(sizeof(double)));
  put(f, static_cast<std::uint8_t>(pair.identity_context() ? 1 : 0));
  put(f, static_cast<std::uint64_t>(pair.dim()));
  put(f, static_cast<std::uint64_t>(pair.words()));
  const std::string prov = pair.provenance().to_json();
  put(f, static_cast<std::uint32_t>(prov.size()));
  f.write(prov.data(), static_cast<std::streamsize>(prov.size()));
  put_matrix(f, pair.word_matrix());
  if (!pair.identity_context()) put_matrix(f, pair.context_matrix());
  if (!f) throw IoError("short write to " + path.string());
}

EmbeddingPair import_embeddings(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || !std::equal(magic, magic + 8, kEmbedMagic))
    throw FormatError(path.string() + " is not an embedding file");
  const auto version = take<std::uint32_t>(f, path);
  if (version != kEmbedVersion)
    throw FormatError("embedding format version " + std::to_string(version) +
                      " is not supported");
  const auto dtype = take<std::uint8_t>(f, path);
  if (dtype != sizeof(double))
    throw FormatError("unsupported embedding value width " + std::to_string(dtype));
  const bool identity = take<std::uint8_t>(f, path) != 0;
  const auto d = static_cast<Eigen::Index>(take<std::uint64_t>(f, path));
  const auto n = static_cast<Eigen::Index>(take<std::uint64_t>(f, path));
  const auto prov_len = take<std::uint32_t>(f, path);
  std::string prov_text(prov_len, '\0');
  f.read(prov_text.data(), prov_len);
  if (!f) throw FormatError("truncated embedding file " + path.string());
  Provenance prov = Provenance::from_json(prov_text);

  Eigen::MatrixXd w(d, n);
  take_matrix(f, path, w);
  if (identity) return EmbeddingPair::with_identity_context(std::move(w), std::move(prov));
  Eigen::MatrixXd c(d, n);
  take_matrix(f, path, c);
  return EmbeddingPair(std::move(w), std::move(c), std::move(prov));
}

void export_word2vec_text(const std::filesystem::path& path, const EmbeddingPair& pair,
                          const Vocabulary& vocab) {
  if (vocab.size() != pair.words())
    throw UsageError("vocabulary size does not match the embeddings");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f.precision(17);
  f << pair.words() << ' ' << pair.dim() << '\n';
  for (WordId i = 0; i < pair.words(); ++i) {
    f << vocab.word(i);
    for (int k = 0; k < pair.dim(); ++k) f << ' ' << pair.word_matrix()(k, i);
    f << '\n';
  }
  if (!f) throw IoError("short write to " + path.string());
}

}  // namespace pmikit
