#include "pmikit/paraphrase.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pmikit/error.hpp"

namespace pmikit {

namespace {

std::vector<WordId> support_of(const ProbabilityModel& model, const WordSet& set) {
  if (set.size() == 1) {
    auto span = model.counts().word_support(set.ids()[0]);
    return {span.begin(), span.end()};
  }
  auto counts = model.set(set);
  std::vector<WordId> out;
  for (WordId c = 0; c < model.vocab().size(); ++c)
    if (counts->per_center[static_cast<std::size_t>(c)] > 0) out.push_back(c);
  return out;
}

std::string label(const Vocabulary& vocab, const WordSet& set) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) s += ",";
    s += vocab.word(set.ids()[i]);
  }
  return s + "}";
}

}  // namespace

std::vector<WordId> defined_support(const ProbabilityModel& model,
                                    std::span<const WordSet> sets) {
  if (sets.empty()) throw UsageError("defined_support needs at least one set");
  std::vector<WordId> acc = support_of(model, sets[0]);
  for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) {
    std::vector<WordId> next = support_of(model, sets[i]);
    std::vector<WordId> merged;
    std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(),
                          std::back_inserter(merged));
    acc = std::move(merged);
  }
  return acc;
}

VectorNorms norms_of(const Eigen::VectorXd& v) {
  if (v.size() == 0) return {};
  return {v.cwiseAbs().maxCoeff(), std::sqrt(v.squaredNorm() / static_cast<double>(v.size()))};
}

Eigen::VectorXd rho(const ProbabilityModel& model, const WordSet& w_set,
                    const WordSet& wstar_set, std::span<const WordId> support) {
  const double log_p_w = model.log_p_set(w_set);
  const double log_p_wstar = model.log_p_set(wstar_set);
  Eigen::VectorXd out(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    const WordId c = support[j];
    out[static_cast<Eigen::Index>(j)] =
        (model.log_p_set_joint(wstar_set, c) - log_p_wstar) -
        (model.log_p_set_joint(w_set, c) - log_p_w);
  }
  return out;
}

SigmaTau sigma_tau(const ProbabilityModel& model, const WordSet& w_set,
                   std::span<const WordId> support) {
  SigmaTau out;
  out.sigma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.size()));
  if (w_set.size() == 1) return out;  // unary products: exactly zero

  double tau = model.log_p_set(w_set);
  for (WordId w : w_set.ids()) tau -= model.log_p_word(w);
  out.tau = tau;

  for (std::size_t j = 0; j < support.size(); ++j) {
    const WordId c = support[j];
    const double lc = model.log_p_center(c);
    double s = model.log_p_set_joint(w_set, c) - lc;
    for (WordId w : w_set.ids()) s -= model.log_p_pair(w, c) - lc;
    out.sigma[static_cast<Eigen::Index>(j)] = s;
  }
  return out;
}

Eigen::VectorXd ErrorDecomposition::total() const {
  Eigen::VectorXd t = rho;
  if (sigma_w.size()) t += sigma_w;
  if (sigma_wstar.size()) t -= sigma_wstar;
  t.array() -= tau_w - tau_wstar;
  return t;
}

ErrorDecomposition decompose_paraphrase(const ProbabilityModel& model, const WordSet& w_set,
                                        const WordSet& wstar_set) {
  const std::array<WordSet, 2> sets{w_set, wstar_set};
  ErrorDecomposition out;
  out.support = defined_support(model, sets);
  out.rho = rho(model, w_set, wstar_set, out.support);
  SigmaTau w = sigma_tau(model, w_set, out.support);
  SigmaTau wstar = sigma_tau(model, wstar_set, out.support);
  out.sigma_w = std::move(w.sigma);
  out.sigma_wstar = std::move(wstar.sigma);
  out.tau_w = w.tau;
  out.tau_wstar = wstar.tau;
  return out;
}

Eigen::VectorXd lemma2_residual_vector(const PmiView& view, const WordSet& w_set,
                                       const WordSet& wstar_set,
                                       std::span<const WordId> support) {
  const ProbabilityModel& model = view.model();
  Eigen::VectorXd gap(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    const WordId c = support[j];
    double sum_wstar = 0.0;
    for (WordId w : wstar_set.ids()) sum_wstar += view.value_or_throw(w, c);
    double sum_w = 0.0;
    for (WordId w : w_set.ids()) sum_w += view.value_or_throw(w, c);
    gap[static_cast<Eigen::Index>(j)] = sum_wstar - sum_w;
  }

  Eigen::VectorXd r = rho(model, w_set, wstar_set, support);
  SigmaTau st_w = sigma_tau(model, w_set, support);
  SigmaTau st_wstar = sigma_tau(model, wstar_set, support);
  Eigen::VectorXd residual = gap - r - st_w.sigma + st_wstar.sigma;
  residual.array() += st_w.tau - st_wstar.tau;
  return residual;
}

double lemma2_residual(const PmiView& view, const WordSet& w_set, const WordSet& wstar_set,
                       std::span<const WordId> support) {
  if (support.empty()) return 0.0;
  return lemma2_residual_vector(view, w_set, wstar_set, support).cwiseAbs().maxCoeff();
}

Eigen::VectorXd lemma1_residual_vector(const PmiView& view, const WordSet& w_set,
                                       WordId wstar, std::span<const WordId> support) {
  return lemma2_residual_vector(view, w_set, WordSet::of({wstar}), support);
}

double lemma1_residual(const PmiView& view, const WordSet& w_set, WordId wstar,
                       std::span<const WordId> support) {
  return lemma2_residual(view, w_set, WordSet::of({wstar}), support);
}

namespace {

void require_equal_support(const ProbabilityModel& model, const WordSet& w_set,
                           std::span<const WordId> sup_w, WordId wstar,
                           std::span<const WordId> sup_star) {
  if (std::ranges::equal(sup_w, sup_star)) return;
  std::vector<WordId> only_w, only_star;
  std::set_difference(sup_w.begin(), sup_w.end(), sup_star.begin(), sup_star.end(),
                      std::back_inserter(only_w));
  std::set_difference(sup_star.begin(), sup_star.end(), sup_w.begin(), sup_w.end(),
                      std::back_inserter(only_star));
  std::string msg = "context distributions of " + label(model.vocab(), w_set) + " and '" +
                    model.vocab().word(wstar) + "' have mismatched support:";
  auto describe = [&](const char* side, const std::vector<WordId>& ids) {
    if (ids.empty()) return;
    msg += std::string(" ") + side + " only:";
    for (std::size_t i = 0; i < ids.size() && i < 8; ++i)
      msg += " '" + model.vocab().word(ids[i]) + "'";
    if (ids.size() > 8) msg += " and " + std::to_string(ids.size() - 8) + " more";
    msg += " (" + std::to_string(ids.size()) + " total);";
  };
  describe("set side", only_w);
  describe("word side", only_star);
  throw PositivityError(msg);
}

double kl_over_support(const ProbabilityModel& model, const WordSet& w_set, WordId wstar,
                       std::span<const WordId> support, KlDirection direction) {
  const double set_total = static_cast<double>(model.set_count(w_set));
  const double star_total = static_cast<double>(model.counts().window_count(wstar));
  const double log_p_w = model.log_p_set(w_set);
  const double log_p_star = model.log_p_word(wstar);
  double d = 0.0;
  for (WordId c : support) {
    const double log_p = model.log_p_set_joint(w_set, c) - log_p_w;
    const double log_q = model.log_p_pair(wstar, c) - log_p_star;
    if (direction == KlDirection::forward) {
      const double p = static_cast<double>(model.set_joint_count(w_set, c)) / set_total;
      d += p * (log_p - log_q);
    } else {
      const double q = static_cast<double>(model.pair_count(wstar, c)) / star_total;
      d += q * (log_q - log_p);
    }
  }
  return d;
}

}  // namespace

double kl_divergence(const ProbabilityModel& model, const WordSet& w_set, WordId wstar,
                     KlDirection direction) {
  if (model.set_count(w_set) == 0)
    throw PositivityError("set " + label(model.vocab(), w_set) + " never fits in one window");
  std::vector<WordId> sup_w = support_of(model, w_set);
  auto sup_star = model.counts().word_support(wstar);
  require_equal_support(model, w_set, sup_w, wstar, sup_star);
  return kl_over_support(model, w_set, wstar, sup_w, direction);
}

KlSearchResult kl_search(const ProbabilityModel& model, const WordSet& w_set,
                         KlDirection direction, int top_m) {
  if (top_m < 1) throw UsageError("top_m must be at least 1");
  if (model.set_count(w_set) == 0)
    throw PositivityError("set " + label(model.vocab(), w_set) + " never fits in one window");
  const std::vector<WordId> sup_w = support_of(model, w_set);

  KlSearchResult out;
  for (WordId x = 0; x < model.vocab().size(); ++x) {
    auto sup_x = model.counts().word_support(x);
    if (!std::ranges::equal(sup_w, sup_x)) {
      out.skipped.push_back(x);
      continue;
    }
    out.ranked.push_back({x, kl_over_support(model, w_set, x, sup_w, direction)});
  }
  if (out.ranked.empty())
    throw SearchError("no vocabulary word shares the support of " +
                      label(model.vocab(), w_set));
  std::sort(out.ranked.begin(), out.ranked.end(), [](const auto& a, const auto& b) {
    if (a.divergence != b.divergence) return a.divergence < b.divergence;
    return a.word < b.word;
  });
  if (static_cast<int>(out.ranked.size()) > top_m) out.ranked.resize(top_m);
  return out;
}

namespace {

struct WeakCore {
  std::vector<WordId> support;
  std::vector<double> q;
  double z = 0.0;
  double delta = 0.0;
  double sigma_hat = 0.0;
  double tau = 0.0;
};

WeakCore weak_core(const ProbabilityModel& model, const WordSet& w_set, WordId wstar) {
  WeakCore core;
  const std::array<WordSet, 2> sets{w_set, WordSet::of({wstar})};
  core.support = defined_support(model, sets);
  if (core.support.empty())
    throw PositivityError("sets " + label(model.vocab(), w_set) + " and '" +
                          model.vocab().word(wstar) + "' share no defined context");

  // p(c|W) restricted to the shared support, renormalized; z is the kept mass.
  const double set_total = static_cast<double>(model.set_count(w_set));
  std::vector<double> raw(core.support.size());
  for (std::size_t j = 0; j < core.support.size(); ++j)
    raw[j] = static_cast<double>(model.set_joint_count(w_set, core.support[j])) / set_total;
  for (double r : raw) core.z += r;
  core.q.resize(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) core.q[j] = raw[j] / core.z;

  const double log_p_w = model.log_p_set(w_set);
  const double log_p_star = model.log_p_word(wstar);
  SigmaTau st = sigma_tau(model, w_set, core.support);
  core.tau = st.tau;
  for (std::size_t j = 0; j < core.support.size(); ++j) {
    const WordId c = core.support[j];
    const double log_cond_w = model.log_p_set_joint(w_set, c) - log_p_w;
    const double log_cond_star = model.log_p_pair(wstar, c) - log_p_star;
    core.delta += core.q[j] * (log_cond_w - log_cond_star);
    core.sigma_hat += core.q[j] * st.sigma[static_cast<Eigen::Index>(j)];
  }
  return core;
}

WeakParaphrase finish_weak(const WeakCore& core, double lhs, double wsum) {
  WeakParaphrase out;
  out.support = core.support;
  out.renormalization = core.z;
  out.lhs = lhs;
  out.rhs = wsum - core.delta + core.sigma_hat - core.tau;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace

WeakParaphrase weak_paraphrase_residual(const EmbeddingPair& embeds,
                                        const ProbabilityModel& model, const WordSet& w_set,
                                        WordId wstar) {
  if (embeds.words() != model.vocab().size())
    throw UsageError("embeddings and probability model cover different vocabularies");
  WeakCore core = weak_core(model, w_set, wstar);

  double lhs = 0.0, wsum = 0.0;
  if (embeds.identity_context()) {
    // Same accumulation order as the matrix-free route, so the two agree
    // bitwise when the word matrix holds the PMI values.
    const auto& w = embeds.word_matrix();
    for (std::size_t j = 0; j < core.support.size(); ++j) {
      const auto c = static_cast<Eigen::Index>(core.support[j]);
      lhs += core.q[j] * w(c, wstar);
      double members = 0.0;
      for (WordId i : w_set.ids()) members += w(c, static_cast<Eigen::Index>(i));
      wsum += core.q[j] * members;
    }
  } else {
    Eigen::VectorXd hat_c = Eigen::VectorXd::Zero(embeds.dim());
    for (std::size_t j = 0; j < core.support.size(); ++j)
      hat_c += core.q[j] * embeds.context_vector(core.support[j]);
    lhs = embeds.word_vector(wstar).dot(hat_c);
    Eigen::VectorXd w_sum_vec = Eigen::VectorXd::Zero(embeds.dim());
    for (WordId i : w_set.ids()) w_sum_vec += embeds.word_vector(i);
    wsum = w_sum_vec.dot(hat_c);
  }
  return finish_weak(core, lhs, wsum);
}

WeakParaphrase weak_paraphrase_explicit(const PmiView& view, const WordSet& w_set,
                                        WordId wstar) {
  const ProbabilityModel& model = view.model();
  WeakCore core = weak_core(model, w_set, wstar);
  double lhs = 0.0, wsum = 0.0;
  for (std::size_t j = 0; j < core.support.size(); ++j) {
    const WordId c = core.support[j];
    lhs += core.q[j] * view.value_or_throw(wstar, c);
    double members = 0.0;
    for (WordId i : w_set.ids()) members += view.value_or_throw(i, c);
    wsum += core.q[j] * members;
  }
  return finish_weak(core, lhs, wsum);
}

FalsePositiveReport false_positive_probe(const ErrorDecomposition& decomp,
                                         const EmbeddingPair& embeds, double epsilon,
                                         double ratio_threshold) {
  FalsePositiveReport out;
  const Eigen::VectorXd total = decomp.total();
  out.total_max_abs = total.size() ? total.cwiseAbs().maxCoeff() : 0.0;

  double component = decomp.rho.size() ? decomp.rho.cwiseAbs().maxCoeff() : 0.0;
  Eigen::VectorXd ce = Eigen::VectorXd::Zero(total.size());
  if (decomp.sigma_w.size()) ce += decomp.sigma_w;
  if (decomp.sigma_wstar.size()) ce -= decomp.sigma_wstar;
  if (ce.size()) component = std::max(component, ce.cwiseAbs().maxCoeff());
  component = std::max(component, std::abs(decomp.tau_w - decomp.tau_wstar));
  out.component_max_abs = component;
  out.cancellation_flag = out.total_max_abs < epsilon && out.component_max_abs >= epsilon;

  Eigen::VectorXd full = Eigen::VectorXd::Zero(embeds.words());
  for (std::size_t j = 0; j < decomp.support.size(); ++j) {
    const WordId c = decomp.support[j];
    if (c < 0 || c >= embeds.words())
      throw UsageError("decomposition support does not fit the embeddings");
    full[c] = total[static_cast<Eigen::Index>(j)];
  }
  out.total_norm = full.norm();
  out.projected_norm = embeds.project(full).norm();
  out.projected_ratio = out.total_norm > 0.0 ? out.projected_norm / out.total_norm : 1.0;
  out.nullspace_flag = out.total_norm > 0.0 && out.projected_ratio < ratio_threshold;
  return out;
}

}  // namespace pmikit
