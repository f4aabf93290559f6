#include "pmikit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>

#include "pmikit/analogy.hpp"
#include "pmikit/error.hpp"
#include "pmikit/paraphrase.hpp"
#include "pmikit/pmi.hpp"

namespace pmikit {
namespace {

// Thrown inside a draw to reject it and try again.
struct DrawReject {};

double max_abs(const Eigen::VectorXd& v) {
  return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
}

class Sampler {
 public:
  Sampler(std::uint64_t seed, WordId vocab, int max_set_size)
      : gen_(seed), vocab_(vocab), max_set_size_(max_set_size) {}

  WordId id() {
    return std::uniform_int_distribution<WordId>(0, vocab_ - 1)(gen_);
  }

  // k distinct ids; rejects the draw when the vocabulary is too small or
  // collisions keep winning.
  std::vector<WordId> distinct(int k) {
    if (static_cast<WordId>(k) > vocab_) throw DrawReject{};
    std::vector<WordId> out;
    out.reserve(static_cast<std::size_t>(k));
    int tries = 32 * k;
    while (static_cast<int>(out.size()) < k) {
      if (--tries < 0) throw DrawReject{};
      WordId w = id();
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
  }

  WordSet set() { return set_of_size(size()); }
  WordSet set_of_size(int k) { return WordSet(distinct(k)); }

  int size() {
    if (max_set_size_ < 1) throw DrawReject{};
    return std::uniform_int_distribution<int>(1, max_set_size_)(gen_);
  }

 private:
  std::mt19937_64 gen_;
  WordId vocab_;
  int max_set_size_;
};

// One attempt returning the draw's residual; DrawReject or an undefined
// event rejects the attempt.
using Attempt = std::function<double(Sampler&)>;

CheckResult run_check(const std::string& name, double bound, const VerifyOptions& opt,
                      std::uint64_t seed, WordId vocab, int max_set_size,
                      const Attempt& attempt) {
  CheckResult r;
  r.name = name;
  r.requested_draws = opt.draws;
  r.bound = bound;
  Sampler sampler(seed, vocab, max_set_size);
  for (int d = 0; d < opt.draws; ++d) {
    bool done = false;
    for (int a = 0; a < opt.attempts_per_draw && !done; ++a) {
      try {
        r.max_residual = std::max(r.max_residual, attempt(sampler));
        done = true;
      } catch (const DrawReject&) {
      } catch (const PositivityError&) {
      }
    }
    if (!done) {
      r.exhausted = true;
      break;
    }
    ++r.draws;
  }
  r.pass = !r.exhausted && r.draws == opt.draws && r.max_residual <= bound;
  return r;
}

std::vector<WordId> support_or_reject(const ProbabilityModel& model,
                                      std::span<const WordSet> sets) {
  std::vector<WordId> support = defined_support(model, sets);
  if (support.empty()) throw DrawReject{};
  return support;
}

// a, a*, b, b* with the degenerate overlaps (b = a*, b* = a) excluded and
// both induced sets {b, a*}, {b*, a} valid.
struct Quadruple {
  WordId a, astar, b, bstar;
  WordSet w, wstar;
};

Quadruple draw_quadruple(Sampler& sampler) {
  Quadruple q{};
  auto pair1 = sampler.distinct(2);
  auto pair2 = sampler.distinct(2);
  q.a = pair1[0];
  q.astar = pair1[1];
  q.b = pair2[0];
  q.bstar = pair2[1];
  if (q.b == q.astar || q.bstar == q.a) throw DrawReject{};
  q.w = WordSet::of({q.b, q.astar});
  q.wstar = WordSet::of({q.bstar, q.a});
  return q;
}

}  // namespace

void VerifyOptions::validate() const {
  if (draws < 1) throw UsageError("verification needs at least one draw");
  if (attempts_per_draw < 1) throw UsageError("attempts per draw must be at least 1");
  if (!(shift_k > 0.0)) throw UsageError("shift base must be positive");
  if (!(bound_identity > 0.0) || !(bound_cancellation > 0.0))
    throw UsageError("verification bounds must be positive");
  if (max_set_size < 1) throw UsageError("max set size must be at least 1");
}

std::vector<CheckResult> run_identity_suite(const ProbabilityModel& model,
                                            const VerifyOptions& options) {
  options.validate();
  const WordId vocab = model.counts().vocab().size();
  const int capacity = 2 * model.counts().config().window_radius;
  const int max_sz = std::min(options.max_set_size, capacity);
  const PmiView view(model);
  const PmiView shifted = view.with_shift(std::log(options.shift_k));
  const double lnk = shifted.shift();

  std::vector<std::pair<std::string, std::pair<double, Attempt>>> checks;

  // Data integrity: the lazily rescanned singleton set table must agree with
  // the stored pair row and window count, entry for entry. The identity
  // checks below are algebra over whatever values the model returns, so a
  // corrupted store is caught here, not there.
  checks.emplace_back("singleton_consistency",
                      std::make_pair(options.bound_cancellation, [&](Sampler& s) {
                        const WordId w = s.id();
                        auto table = model.set(WordSet::of({w}));
                        const EventCounts& counts = model.counts();
                        Count worst = std::abs(table->total - counts.window_count(w));
                        for (WordId c = 0; c < vocab; ++c) {
                          const Count diff = table->per_center[static_cast<std::size_t>(c)] -
                                             counts.pair_count(w, c);
                          worst = std::max(worst, std::abs(diff));
                        }
                        return static_cast<double>(worst);
                      }));

  checks.emplace_back("lemma1", std::make_pair(options.bound_identity, [&](Sampler& s) {
    WordSet w = s.set();
    WordId wstar = s.id();
    const WordSet sets[] = {w, WordSet::of({wstar})};
    auto support = support_or_reject(model, sets);
    return lemma1_residual(view, w, wstar, support);
  }));

  checks.emplace_back("lemma2", std::make_pair(options.bound_identity, [&](Sampler& s) {
    WordSet w = s.set();
    WordSet wstar = s.set();
    const WordSet sets[] = {w, wstar};
    auto support = support_or_reject(model, sets);
    return lemma2_residual(view, w, wstar, support);
  }));

  checks.emplace_back("transformation", std::make_pair(options.bound_identity, [&](Sampler& s) {
    Transformation t;
    t.source = s.id();
    t.target = s.id();
    t.plus_set = s.set_of_size(std::max(1, std::min(max_sz - 1, s.size())));
    t.minus_set = s.set_of_size(std::max(1, std::min(max_sz - 1, s.size())));
    if (t.plus_set.contains(t.source) || t.minus_set.contains(t.target)) throw DrawReject{};
    const WordSet sets[] = {t.w(), t.wstar()};
    auto support = support_or_reject(model, sets);
    return transformation_residual(view, t, support).residual;
  }));

  checks.emplace_back("analogy", std::make_pair(options.bound_identity, [&](Sampler& s) {
    Quadruple q = draw_quadruple(s);
    const WordSet sets[] = {q.w, q.wstar};
    auto support = support_or_reject(model, sets);
    return analogy_decomposition(view, q.a, q.astar, q.b, q.bstar, support).identity_residual;
  }));

  checks.emplace_back("weak_paraphrase", std::make_pair(options.bound_identity, [&](Sampler& s) {
    WordSet w = s.set();
    WordId wstar = s.id();
    return weak_paraphrase_explicit(view, w, wstar).residual;
  }));

  checks.emplace_back("shift_lemma1_constant",
                      std::make_pair(options.bound_cancellation, [&](Sampler& s) {
                        WordSet w = s.set();
                        WordId wstar = s.id();
                        const WordSet sets[] = {w, WordSet::of({wstar})};
                        auto support = support_or_reject(model, sets);
                        Eigen::VectorXd base = lemma1_residual_vector(view, w, wstar, support);
                        Eigen::VectorXd moved =
                            lemma1_residual_vector(shifted, w, wstar, support);
                        const double expected =
                            lnk * static_cast<double>(static_cast<int>(w.size()) - 1);
                        return ((moved - base).array() - expected).abs().maxCoeff();
                      }));

  checks.emplace_back("shift_analogy_cancellation",
                      std::make_pair(options.bound_cancellation, [&](Sampler& s) {
                        Quadruple q = draw_quadruple(s);
                        const WordSet sets[] = {q.w, q.wstar};
                        auto support = support_or_reject(model, sets);
                        return shift_cancellation_check(view, shifted, q.a, q.astar, q.b,
                                                        q.bstar, support);
                      }));

  checks.emplace_back("trivial_analogy",
                      std::make_pair(options.bound_cancellation, [&](Sampler& s) {
                        auto pair = s.distinct(2);
                        const WordSet w = WordSet::of({pair[0], pair[1]});
                        const WordSet sets[] = {w, w};
                        auto support = support_or_reject(model, sets);
                        AnalogyDecomposition d = analogy_decomposition(
                            view, pair[0], pair[1], pair[0], pair[1], support);
                        double res = std::max(max_abs(d.offset), max_abs(d.pe));
                        res = std::max(res, max_abs(d.ce + d.ie));
                        return std::max(res, d.identity_residual);
                      }));

  std::vector<CheckResult> results;
  results.reserve(checks.size());
  std::uint64_t salt = 0;
  for (const auto& [name, body] : checks) {
    results.push_back(run_check(name, body.first, options, options.seed + salt, vocab, max_sz,
                                body.second));
    ++salt;
  }
  return results;
}

bool all_pass(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace pmikit
