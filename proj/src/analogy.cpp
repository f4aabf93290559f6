#include "pmikit/analogy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pmikit/error.hpp"

namespace pmikit {

namespace {

void check_word(const EmbeddingPair& embeds, WordId w) {
  if (w < 0 || w >= embeds.words())
    throw VocabularyError("word id " + std::to_string(w) + " outside the embedding vocabulary");
}

void check_word(const ProbabilityModel& model, WordId w) {
  if (w < 0 || w >= model.vocab().size())
    throw VocabularyError("word id " + std::to_string(w) + " outside the vocabulary");
}

ErrorDecomposition decompose_on(const ProbabilityModel& model, const WordSet& w_set,
                                const WordSet& wstar_set, std::span<const WordId> support) {
  ErrorDecomposition d;
  d.support.assign(support.begin(), support.end());
  d.rho = rho(model, w_set, wstar_set, support);
  SigmaTau sw = sigma_tau(model, w_set, support);
  SigmaTau swstar = sigma_tau(model, wstar_set, support);
  d.sigma_w = std::move(sw.sigma);
  d.sigma_wstar = std::move(swstar.sigma);
  d.tau_w = sw.tau;
  d.tau_wstar = swstar.tau;
  return d;
}

Eigen::VectorXd scatter_and_project(const EmbeddingPair& embeds,
                                    std::span<const WordId> support,
                                    const Eigen::VectorXd& values) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(embeds.words());
  for (std::size_t j = 0; j < support.size(); ++j) {
    check_word(embeds, support[j]);
    full[support[j]] = values[static_cast<Eigen::Index>(j)];
  }
  return embeds.project(full);
}

}  // namespace

WordSet Transformation::w() const {
  if (plus_set.contains(source))
    throw UsageError("transformation source belongs to its own plus set");
  return WordSet::with(source, plus_set);
}

WordSet Transformation::wstar() const {
  if (minus_set.contains(target))
    throw UsageError("transformation target belongs to its own minus set");
  return WordSet::with(target, minus_set);
}

TransformationReport transformation_residual(const PmiView& view, const Transformation& t,
                                             std::span<const WordId> support) {
  const WordSet w = t.w();
  const WordSet wstar = t.wstar();
  TransformationReport report;
  report.decomposition = decompose_on(view.model(), w, wstar, support);
  report.residual_vector = lemma2_residual_vector(view, w, wstar, support);
  report.residual =
      report.residual_vector.size() ? report.residual_vector.cwiseAbs().maxCoeff() : 0.0;
  return report;
}

TransformationReport transformation_residual(const PmiView& view, const Transformation& t) {
  const std::array<WordSet, 2> sets{t.w(), t.wstar()};
  std::vector<WordId> support = defined_support(view.model(), sets);
  return transformation_residual(view, t, support);
}

AnalogyDecomposition analogy_decomposition(const PmiView& view, WordId a, WordId astar,
                                           WordId b, WordId bstar,
                                           std::span<const WordId> support) {
  const ProbabilityModel& model = view.model();
  for (WordId w : {a, astar, b, bstar}) check_word(model, w);
  if (b == astar) throw UsageError("degenerate analogy quadruple: b equals a*");
  if (bstar == a) throw UsageError("degenerate analogy quadruple: b* equals a");

  const WordSet w_set = WordSet::of({b, astar});
  const WordSet wstar_set = WordSet::of({bstar, a});

  AnalogyDecomposition d;
  d.a = a;
  d.astar = astar;
  d.b = b;
  d.bstar = bstar;
  d.support.assign(support.begin(), support.end());

  const Eigen::Index m = static_cast<Eigen::Index>(support.size());
  d.offset.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const WordId c = support[static_cast<std::size_t>(j)];
    d.offset[j] = view.value_or_throw(bstar, c) - view.value_or_throw(astar, c) +
                  view.value_or_throw(a, c) - view.value_or_throw(b, c);
  }

  d.pe = rho(model, w_set, wstar_set, support);
  SigmaTau sw = sigma_tau(model, w_set, support);
  SigmaTau swstar = sigma_tau(model, wstar_set, support);
  d.ce = sw.sigma - swstar.sigma;
  d.tau_w = sw.tau;
  d.tau_wstar = swstar.tau;
  d.ie = Eigen::VectorXd::Constant(m, -(sw.tau - swstar.tau));
  d.identity_residual = m ? (d.offset - d.pe - d.ce - d.ie).cwiseAbs().maxCoeff() : 0.0;
  return d;
}

AnalogyDecomposition analogy_decomposition(const PmiView& view, WordId a, WordId astar,
                                           WordId b, WordId bstar) {
  const ProbabilityModel& model = view.model();
  for (WordId w : {a, astar, b, bstar}) check_word(model, w);
  if (b == astar) throw UsageError("degenerate analogy quadruple: b equals a*");
  if (bstar == a) throw UsageError("degenerate analogy quadruple: b* equals a");
  const std::array<WordSet, 2> sets{WordSet::of({b, astar}), WordSet::of({bstar, a})};
  std::vector<WordId> support = defined_support(model, sets);
  return analogy_decomposition(view, a, astar, b, bstar, support);
}

ProjectedComponents project_components(const AnalogyDecomposition& decomp,
                                       const EmbeddingPair& embeds) {
  ProjectedComponents out;
  out.offset = scatter_and_project(embeds, decomp.support, decomp.offset);
  out.pe = scatter_and_project(embeds, decomp.support, decomp.pe);
  out.ce = scatter_and_project(embeds, decomp.support, decomp.ce);
  out.ie = scatter_and_project(embeds, decomp.support, decomp.ie);
  return out;
}

EquivalenceReport parameter_equivalence_check(const PmiView& view, WordId a, WordId astar,
                                              WordId b, WordId bstar, const WordSet& plus_set,
                                              const WordSet& minus_set,
                                              std::span<const WordId> support,
                                              double tolerance) {
  const ProbabilityModel& model = view.model();
  for (WordId w : {a, astar, b, bstar}) check_word(model, w);
  const Transformation t1{a, astar, plus_set, minus_set};
  const Transformation t2{b, bstar, plus_set, minus_set};
  const WordSet w1 = t1.w(), w1s = t1.wstar();
  const WordSet w2 = t2.w(), w2s = t2.wstar();

  auto dependence = [&](const WordSet& w_set, const WordSet& wstar_set) {
    SigmaTau sw = sigma_tau(model, w_set, support);
    SigmaTau ss = sigma_tau(model, wstar_set, support);
    Eigen::VectorXd d = sw.sigma - ss.sigma;
    d.array() -= sw.tau - ss.tau;
    return d;
  };

  EquivalenceReport report;
  report.support.assign(support.begin(), support.end());
  report.tolerance = tolerance;
  Eigen::VectorXd rho1 = rho(model, w1, w1s, support);
  Eigen::VectorXd rho2 = rho(model, w2, w2s, support);
  report.rho1 = norms_of(rho1);
  report.rho2 = norms_of(rho2);
  report.dependence_diff = norms_of(dependence(w2, w2s) - dependence(w1, w1s));
  report.pass = report.rho2.rms <= report.rho1.rms + report.dependence_diff.rms + tolerance;
  return report;
}

EquivalenceReport parameter_equivalence_check(const PmiView& view, WordId a, WordId astar,
                                              WordId b, WordId bstar, const WordSet& plus_set,
                                              const WordSet& minus_set, double tolerance) {
  const Transformation t1{a, astar, plus_set, minus_set};
  const Transformation t2{b, bstar, plus_set, minus_set};
  const std::array<WordSet, 4> sets{t1.w(), t1.wstar(), t2.w(), t2.wstar()};
  std::vector<WordId> support = defined_support(view.model(), sets);
  return parameter_equivalence_check(view, a, astar, b, bstar, plus_set, minus_set, support,
                                     tolerance);
}

QueryResult analogy_query(const EmbeddingPair& embeds, WordId a, WordId astar, WordId b,
                          QueryMetric metric, int top_m, bool exclude) {
  for (WordId w : {a, astar, b}) check_word(embeds, w);
  if (top_m < 1) throw UsageError("top_m must be at least 1");

  const Eigen::MatrixXd& w = embeds.word_matrix();
  QueryResult out;
  out.target = w.col(astar) - w.col(a) + w.col(b);
  const double target_norm = out.target.norm();

  out.ranked.reserve(static_cast<std::size_t>(embeds.words()));
  for (WordId id = 0; id < embeds.words(); ++id) {
    if (exclude && (id == a || id == astar || id == b)) continue;
    double score;
    if (metric == QueryMetric::cosine) {
      const double denom = w.col(id).norm() * target_norm;
      score = denom > 0.0 ? w.col(id).dot(out.target) / denom : 0.0;
    } else {
      score = (w.col(id) - out.target).norm();
    }
    out.ranked.push_back({id, score});
  }

  const bool descending = metric == QueryMetric::cosine;
  std::sort(out.ranked.begin(), out.ranked.end(),
            [descending](const QueryResult::Candidate& x, const QueryResult::Candidate& y) {
              if (x.score != y.score) return descending ? x.score > y.score : x.score < y.score;
              return x.word < y.word;
            });
  if (static_cast<int>(out.ranked.size()) > top_m) out.ranked.resize(top_m);
  return out;
}

double shift_cancellation_check(const PmiView& view_pmi, const PmiView& view_spmi, WordId a,
                                WordId astar, WordId b, WordId bstar,
                                std::span<const WordId> support) {
  if (&view_pmi.model() != &view_spmi.model())
    throw UsageError("shift cancellation requires two views over one probability model");
  auto offset_at = [&](const PmiView& view, WordId c) {
    return view.value_or_throw(bstar, c) - view.value_or_throw(astar, c) +
           view.value_or_throw(a, c) - view.value_or_throw(b, c);
  };
  double worst = 0.0;
  for (WordId c : support)
    worst = std::max(worst, std::abs(offset_at(view_spmi, c) - offset_at(view_pmi, c)));
  return worst;
}

std::vector<PlotPoint> analogy_plot_points(const EmbeddingPair& embeds,
                                           const AnalogyDecomposition& decomp) {
  for (WordId w : {decomp.a, decomp.astar, decomp.b, decomp.bstar}) check_word(embeds, w);
  ProjectedComponents pc = project_components(decomp, embeds);

  const Eigen::MatrixXd& w = embeds.word_matrix();
  const Eigen::VectorXd origin = w.col(decomp.a);
  const Eigen::VectorXd approx = w.col(decomp.astar) - w.col(decomp.a) + w.col(decomp.b);

  auto unit_or_zero = [](Eigen::VectorXd v) {
    const double n = v.norm();
    return n > 1e-12 ? Eigen::VectorXd(v / n) : Eigen::VectorXd(Eigen::VectorXd::Zero(v.size()));
  };
  const Eigen::VectorXd e1 = unit_or_zero(w.col(decomp.astar) - origin);
  Eigen::VectorXd v2 = w.col(decomp.bstar) - origin;
  v2 -= v2.dot(e1) * e1;
  const Eigen::VectorXd e2 = unit_or_zero(v2);
  Eigen::VectorXd r = approx - origin;
  r -= r.dot(e1) * e1 + r.dot(e2) * e2;
  const Eigen::VectorXd e3 = unit_or_zero(r);

  auto coords = [&](const Eigen::VectorXd& p) {
    const Eigen::VectorXd d = p - origin;
    return Eigen::Vector3d(d.dot(e1), d.dot(e2), d.dot(e3));
  };

  std::vector<PlotPoint> out;
  out.push_back({"a", coords(w.col(decomp.a))});
  out.push_back({"a*", coords(w.col(decomp.astar))});
  out.push_back({"b", coords(w.col(decomp.b))});
  out.push_back({"b*", coords(w.col(decomp.bstar))});
  out.push_back({"b* approx", coords(approx)});
  out.push_back({"+CE", coords(approx + pc.ce)});
  out.push_back({"+IE", coords(approx + pc.ce + pc.ie)});
  out.push_back({"+PE", coords(approx + pc.ce + pc.ie + pc.pe)});
  return out;
}

}  // namespace pmikit
