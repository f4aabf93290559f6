#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "pmikit/analogy.hpp"
#include "pmikit/error.hpp"
#include "support/textgen.hpp"
#include "support/util.hpp"

using namespace pmikit;
using doctest::Approx;

namespace {

struct Fixture {
  testutil::BuiltCorpus built;
  ProbabilityModel model;

  explicit Fixture(testutil::BuiltCorpus b)
      : built(std::move(b)), model(built.counts, built.tokens) {}
};

// Four distinct ids in random order.
std::array<WordId, 4> draw_quadruple(std::mt19937_64& gen, WordId vocab) {
  std::vector<WordId> pool(vocab);
  for (WordId i = 0; i < vocab; ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), gen);
  return {pool[0], pool[1], pool[2], pool[3]};
}

}  // namespace

TEST_CASE("transformation set construction rejects self-overlap") {
  Transformation t;
  t.source = 0;
  t.target = 1;
  t.plus_set = WordSet::of({0, 2});
  CHECK_THROWS_AS(t.w(), UsageError);
  t.plus_set = WordSet::of({2});
  CHECK(t.w() == WordSet::of({0, 2}));
  t.minus_set = WordSet::of({1});
  CHECK_THROWS_AS(t.wstar(), UsageError);
}

TEST_CASE("trivial transformation parameters leave no paraphrase error") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 301), 2));
  PmiView view(f.model);
  // W+ = {x*}, W- = {x} makes the two induced sets equal.
  Transformation t{1, 4, WordSet::of({4}), WordSet::of({1})};
  TransformationReport rep = transformation_residual(view, t);
  REQUIRE(!rep.decomposition.support.empty());
  CHECK(rep.decomposition.rho.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.residual <= 1e-9);
}

TEST_CASE("transformation identity holds over random parameters") {
  std::mt19937_64 gen(777);
  int checked = 0;
  for (int trial = 0; trial < 3; ++trial) {
    Fixture f(testutil::build(testutil::random_tokens(300, 7, 910 + trial), 2));
    PmiView view(f.model);
    const WordId n = f.model.vocab().size();
    for (int rep = 0; rep < 15; ++rep) {
      auto [x, xstar, p, q] = draw_quadruple(gen, n);
      Transformation t{x, xstar, WordSet::of({p}), gen() % 2 ? WordSet::of({q}) : WordSet()};
      TransformationReport report = transformation_residual(view, t);
      if (report.decomposition.support.empty()) continue;
      ++checked;
      CHECK(report.residual <= 1e-9);
    }
  }
  REQUIRE(checked >= 30);
}

TEST_CASE("unbalanced transformation under shift moves by exactly ln k per entry") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 55), 2));
  PmiView view(f.model);
  const double lnk = std::log(5.0);
  Transformation t{0, 1, WordSet::of({2, 3}), WordSet::of({4})};  // |W+| - |W-| = 1

  const std::array<WordSet, 2> sets{t.w(), t.wstar()};
  std::vector<WordId> support = defined_support(f.model, sets);
  REQUIRE(!support.empty());

  TransformationReport base = transformation_residual(view, t, support);
  TransformationReport moved = transformation_residual(view.with_shift(lnk), t, support);
  CHECK(((moved.residual_vector - base.residual_vector).array() - lnk).abs().maxCoeff() <=
        1e-12);
}

TEST_CASE("analogy decomposition satisfies its identity") {
  std::mt19937_64 gen(31337);
  int checked = 0;
  for (int trial = 0; trial < 3; ++trial) {
    Fixture f(testutil::build(testutil::random_tokens(350, 7, 620 + trial), 2));
    PmiView view(f.model);
    for (int rep = 0; rep < 15; ++rep) {
      auto [a, astar, b, bstar] = draw_quadruple(gen, f.model.vocab().size());
      AnalogyDecomposition d = analogy_decomposition(view, a, astar, b, bstar);
      if (d.support.empty()) continue;
      ++checked;
      CHECK(d.identity_residual <= 1e-9);

      const std::array<WordSet, 2> sets{WordSet::of({b, astar}), WordSet::of({bstar, a})};
      CHECK(d.support == defined_support(f.model, sets));
    }
  }
  REQUIRE(checked >= 30);
}

TEST_CASE("trivial analogy cancels exactly while individual terms stay visible") {
  Fixture f(testutil::build(testutil::random_tokens(400, 8, 47), 2));
  PmiView view(f.model);
  const WordId n = f.model.vocab().size();

  bool saw_large_tau = false;
  int checked = 0;
  for (WordId a = 0; a < n && checked < 12; ++a) {
    for (WordId astar = 0; astar < n && checked < 12; ++astar) {
      if (a == astar) continue;
      AnalogyDecomposition d = analogy_decomposition(view, a, astar, a, astar);
      if (d.support.empty()) continue;
      ++checked;
      CHECK(d.offset.cwiseAbs().maxCoeff() == 0.0);
      CHECK(d.pe.cwiseAbs().maxCoeff() == 0.0);
      CHECK((d.ce + d.ie).cwiseAbs().maxCoeff() == 0.0);
      CHECK(d.identity_residual == 0.0);
      if (std::abs(d.tau_w) > 1e-3) saw_large_tau = true;
    }
  }
  REQUIRE(checked == 12);
  CHECK(saw_large_tau);
}

TEST_CASE("degenerate quadruples are rejected") {
  Fixture f(testutil::build(testutil::random_tokens(300, 6, 2), 2));
  PmiView view(f.model);
  CHECK_THROWS_AS(analogy_decomposition(view, 0, 1, 1, 2), UsageError);  // b == a*
  CHECK_THROWS_AS(analogy_decomposition(view, 0, 1, 2, 0), UsageError);  // b* == a
  CHECK_THROWS_AS(analogy_decomposition(view, 0, 1, 2, 99), VocabularyError);
}

TEST_CASE("explicit embeddings preserve projected components bitwise") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 83), 2));
  PmiView view(f.model);
  EmbeddingPair embeds = explicit_embeddings(view.with_policy(SupportPolicy::clamp));
  AnalogyDecomposition d = analogy_decomposition(view, 0, 1, 2, 3);
  REQUIRE(!d.support.empty());

  ProjectedComponents pc = project_components(d, embeds);
  REQUIRE(pc.pe.size() == f.model.vocab().size());
  std::map<WordId, Eigen::Index> where;
  for (std::size_t j = 0; j < d.support.size(); ++j)
    where[d.support[j]] = static_cast<Eigen::Index>(j);
  for (WordId c = 0; c < f.model.vocab().size(); ++c) {
    auto it = where.find(c);
    if (it == where.end()) {
      CHECK(pc.pe[c] == 0.0);
      CHECK(pc.offset[c] == 0.0);
    } else {
      CHECK(pc.pe[c] == d.pe[it->second]);
      CHECK(pc.ce[c] == d.ce[it->second]);
      CHECK(pc.ie[c] == d.ie[it->second]);
      CHECK(pc.offset[c] == d.offset[it->second]);
    }
  }
}

TEST_CASE("parameter equivalence report") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 29), 2));
  PmiView view(f.model);

  SUBCASE("identical pairs pass with identical rho") {
    EquivalenceReport rep =
        parameter_equivalence_check(view, 0, 1, 0, 1, WordSet::of({2}), WordSet::of({3}));
    CHECK(rep.pass);
    CHECK(rep.rho1.rms == rep.rho2.rms);
    CHECK(rep.dependence_diff.max_abs == 0.0);
  }

  SUBCASE("trivial parameters make rho1 vanish") {
    // plus = {a*}, minus = {a}: the first transformation's sets coincide.
    EquivalenceReport rep =
        parameter_equivalence_check(view, 0, 1, 2, 3, WordSet::of({1}), WordSet::of({0}));
    CHECK(rep.rho1.max_abs == 0.0);
    CHECK(rep.pass == (rep.rho2.rms <= rep.dependence_diff.rms + rep.tolerance));
  }

  SUBCASE("reported verdict matches its own arithmetic") {
    EquivalenceReport rep =
        parameter_equivalence_check(view, 4, 2, 5, 6, WordSet::of({0}), WordSet::of({1}));
    CHECK(rep.pass ==
          (rep.rho2.rms <= rep.rho1.rms + rep.dependence_diff.rms + rep.tolerance));
  }
}

TEST_CASE("engineered swap corpus: PMI is permutation-symmetric and the query lands") {
  Fixture f(testutil::build(testutil::swap_pair_corpus(60), 2));
  PmiView view(f.model);
  const auto id = [&](const char* s) { return f.model.vocab().id(s); };
  const WordId x = id("x"), z = id("z"), y = id("y"), w = id("w"), j = id("j");

  std::map<WordId, WordId> pi{{x, y}, {y, x}, {z, w}, {w, z}, {j, j}};
  const WordId n = f.model.vocab().size();
  for (WordId u = 0; u < n; ++u) {
    for (WordId c = 0; c < n; ++c) {
      auto lhs = view.value(u, c);
      auto rhs = view.value(pi.at(u), pi.at(c));
      REQUIRE(lhs.has_value() == rhs.has_value());
      if (lhs) CHECK(*lhs == *rhs);
    }
  }

  // Junk's PMI row is identically zero here (it sits in every window), which
  // parks it closer to the target in L2 than any phrase word; direction is
  // what identifies w, so the rank-1 claim is a cosine claim.
  EmbeddingPair embeds = explicit_embeddings(view.with_policy(SupportPolicy::clamp));
  QueryResult res = analogy_query(embeds, x, z, y, QueryMetric::cosine, 3);
  REQUIRE(!res.ranked.empty());
  CHECK(res.ranked[0].word == w);
}

TEST_CASE("analogy query mechanics") {
  Fixture f(testutil::build(testutil::duplicate_row_corpus(40), 2));
  PmiView view(f.model);
  EmbeddingPair embeds = explicit_embeddings(view.with_policy(SupportPolicy::clamp));
  const WordId j = f.model.vocab().id("j");
  const WordId u = f.model.vocab().id("u");
  const WordId v = f.model.vocab().id("v");

  SUBCASE("identity offset with exclusion lifted finds b itself at distance zero") {
    QueryResult res = analogy_query(embeds, j, j, u, QueryMetric::euclidean, 5, false);
    REQUIRE(res.ranked.size() >= 2);
    CHECK(res.ranked[0].word == u);
    CHECK(res.ranked[0].score == 0.0);
    // v's PMI column is bit-identical to u's, so it ties at zero and loses
    // only on the id tiebreak.
    CHECK(res.ranked[1].word == v);
    CHECK(res.ranked[1].score == 0.0);
  }

  SUBCASE("exclusion removes the query words from candidacy") {
    QueryResult res = analogy_query(embeds, j, j, u, QueryMetric::euclidean,
                                    static_cast<int>(f.model.vocab().size()), true);
    for (const auto& cand : res.ranked) {
      CHECK(cand.word != j);
      CHECK(cand.word != u);
    }
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(analogy_query(embeds, j, j, u, QueryMetric::cosine, 0), UsageError);
    CHECK_THROWS_AS(analogy_query(embeds, 99, j, u), VocabularyError);
  }
}

TEST_CASE("shift terms cancel in the analogy offset") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 515), 2));
  PmiView view(f.model);
  PmiView shifted = view.with_shift(std::log(5.0));
  std::mt19937_64 gen(6);

  int checked = 0;
  for (int rep = 0; rep < 20 && checked < 8; ++rep) {
    auto [a, astar, b, bstar] = draw_quadruple(gen, f.model.vocab().size());
    AnalogyDecomposition d = analogy_decomposition(view, a, astar, b, bstar);
    if (d.support.empty()) continue;
    ++checked;
    CHECK(shift_cancellation_check(view, shifted, a, astar, b, bstar, d.support) <= 1e-12);
    CHECK(shift_cancellation_check(view, view, a, astar, b, bstar, d.support) == 0.0);
  }
  REQUIRE(checked == 8);

  Fixture other(testutil::build("a b a b a b", 1));
  CHECK_THROWS_AS(
      shift_cancellation_check(view, PmiView(other.model), 0, 1, 2, 3, std::vector<WordId>{}),
      UsageError);
}

TEST_CASE("plot points trace the component zigzag") {
  Fixture f(testutil::build(testutil::random_tokens(400, 7, 60), 2));
  PmiView view(f.model);
  EmbeddingPair embeds = explicit_embeddings(view.with_policy(SupportPolicy::clamp));
  AnalogyDecomposition d = analogy_decomposition(view, 0, 1, 2, 3);
  REQUIRE(!d.support.empty());

  std::vector<PlotPoint> pts = analogy_plot_points(embeds, d);
  REQUIRE(pts.size() == 8);
  CHECK(pts[0].label == "a");
  CHECK(pts[4].label == "b* approx");
  CHECK(pts[7].label == "+PE");
  CHECK(pts[0].xyz == Eigen::Vector3d::Zero());  // anchored at w_a
  for (const auto& p : pts) CHECK(p.xyz.allFinite());

  // Same basis, same coordinates on a rerun.
  std::vector<PlotPoint> again = analogy_plot_points(embeds, d);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].xyz == again[i].xyz);
}
