#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "pmikit/error.hpp"
#include "pmikit/pmi.hpp"
#include "pmikit/prob.hpp"
#include "support/brute.hpp"
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

Fixture toy() { return Fixture(testutil::build("a b a b a b", 1)); }

}  // namespace

TEST_CASE("pmi on the six-token corpus") {
  auto f = toy();
  PmiView view(f.model);
  const WordId a = f.model.vocab().id("a");
  const WordId b = f.model.vocab().id("b");

  auto ab = view.value(a, b);
  REQUIRE(ab.has_value());
  CHECK(*ab == Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(!view.value(a, a).has_value());
  CHECK(!view.value(b, b).has_value());
  CHECK(view.defined(b, a));
  CHECK_THROWS_AS(view.value_or_throw(a, a), PositivityError);

  SUBCASE("shift subtracts exactly") {
    PmiView shifted = view.with_shift(std::log(5.0));
    CHECK(*shifted.value(a, b) == *view.value(a, b) - std::log(5.0));
    CHECK_THROWS_AS(view.with_shift(-0.1), UsageError);
  }

  SUBCASE("column over explicit support") {
    const WordId support[] = {b};
    auto col = view.column(a, support);
    REQUIRE(col.size() == 1);
    CHECK(col[0] == Approx(std::log(2.0)).epsilon(1e-12));

    const WordId full[] = {a, b};
    CHECK_THROWS_AS(view.column(a, full), PositivityError);
    auto clamped = view.with_policy(SupportPolicy::clamp, -7.0).column(a, full);
    CHECK(clamped[0] == -7.0);
    CHECK(clamped[1] == col[0]);
  }
}

TEST_CASE("pmi agrees with the brute-force oracle") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const int radius = 1 + trial % 3;
    auto text = testutil::random_tokens(250, 7, 500 + trial);
    auto built = testutil::build(text, radius);
    ProbabilityModel model(built.counts, built.tokens);
    PmiView view(model);

    auto table = brute::pair_counts(built.tokens, radius);
    const WordId n = model.vocab().size();
    for (WordId w = 0; w < n; ++w) {
      for (WordId c = 0; c < n; ++c) {
        auto got = view.value(w, c);
        if (table.pair_count(w, c) == 0) {
          CHECK(!got.has_value());
        } else {
          REQUIRE(got.has_value());
          CHECK(*got == Approx(brute::pmi(table, built.tokens, radius, w, c)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("probability laws hold as count ratios") {
  auto text = testutil::random_tokens(400, 6, 321);
  auto built = testutil::build(text, 3);
  ProbabilityModel model(built.counts, built.tokens);

  // Central masses sum to 1 because the integer counts sum to T.
  Count sum = 0;
  for (WordId c = 0; c < model.vocab().size(); ++c)
    sum += built.counts.center_count(c);
  CHECK(sum == built.counts.total_anchors());

  std::mt19937 rng(7);
  std::uniform_int_distribution<WordId> pick(0, model.vocab().size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    WordId x = pick(rng), y = pick(rng);
    while (y == x) y = pick(rng);
    const auto set = WordSet::of({x, y});
    const WordId c = pick(rng);

    CHECK(model.p_set_joint(set, c) <= model.p_set(set) + 1e-15);
    CHECK(model.p_set_joint(set, c) <= model.p_center(c) + 1e-15);

    if (model.set_joint_count(set, c) > 0) {
      // Conditionals are ratios of joints; multiplying back is exact to ulp.
      const double cond = model.p_set_joint(set, c) / model.p_set(set);
      CHECK(cond * model.p_set(set) == Approx(model.p_set_joint(set, c)).epsilon(1e-15));
      const double log_cond = model.log_p_set_joint(set, c) - model.log_p_set(set);
      CHECK(std::exp(log_cond) == Approx(cond).epsilon(1e-12));
    }
  }

  // Singleton sets reduce to pair and window counts.
  const auto single = WordSet::of({0});
  CHECK(model.set_count(single) == built.counts.window_count(0));
  for (WordId c = 0; c < model.vocab().size(); ++c)
    CHECK(model.set_joint_count(single, c) == built.counts.pair_count(0, c));
}

TEST_CASE("positivity errors name the offending event") {
  auto f = toy();
  const WordId a = f.model.vocab().id("a");
  CHECK_THROWS_WITH_AS(f.model.log_p_pair(a, a), doctest::Contains("(a, a)"), PositivityError);
  auto set = WordSet::of({a, f.model.vocab().id("b")});
  CHECK(f.model.set_count(set) == 0);  // radius 1 cannot hold both
  CHECK_THROWS_AS(f.model.log_p_set(set), PositivityError);

  auto lone = testutil::build("a", 1);
  ProbabilityModel lone_model(lone.counts, lone.tokens);
  CHECK_THROWS_AS(lone_model.log_p_word(0), PositivityError);
}

TEST_CASE("pmi matrix") {
  SUBCASE("toy corpus") {
    auto f = toy();
    PmiView view(f.model, 0.0, SupportPolicy::clamp, 0.0);
    auto m = pmi_matrix(view);
    REQUIRE(m.values.rows() == 2);
    const WordId a = f.model.vocab().id("a");
    const WordId b = f.model.vocab().id("b");
    CHECK(m.values(a, b) == Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(m.values(b, a) == Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(m.values(a, a) == 0.0);
    CHECK(m.values(b, b) == 0.0);
    CHECK(m.coverage == Approx(0.5));
    CHECK_THROWS_AS(pmi_matrix(PmiView(f.model)), PositivityError);
  }

  SUBCASE("one-word vocabulary") {
    auto built = testutil::build("a a a", 1);
    ProbabilityModel model(built.counts, built.tokens);
    auto m = pmi_matrix(PmiView(model));  // strict works: the one entry is defined
    REQUIRE(m.values.rows() == 1);
    CHECK(m.values(0, 0) == Approx(0.0));
    CHECK(m.coverage == 1.0);
  }

  SUBCASE("entries match the scalar path bitwise") {
    auto text = testutil::random_tokens(300, 9, 42);
    auto built = testutil::build(text, 2);
    ProbabilityModel model(built.counts, built.tokens);
    PmiView view(model, std::log(3.0), SupportPolicy::clamp, 0.0);
    auto m = pmi_matrix(view);
    int defined = 0;
    for (WordId w = 0; w < model.vocab().size(); ++w) {
      for (WordId c = 0; c < model.vocab().size(); ++c) {
        auto v = view.value(w, c);
        if (v) {
          CHECK(m.values(w, c) == *v);  // bitwise
          ++defined;
        } else {
          CHECK(m.values(w, c) == 0.0);
        }
      }
    }
    const auto n = static_cast<double>(model.vocab().size());
    CHECK(m.coverage == Approx(defined / (n * n)));
  }

  SUBCASE("memory budget") {
    auto f = toy();
    CHECK_THROWS_AS(pmi_matrix(PmiView(f.model), 8), CapacityError);
  }
}

TEST_CASE("pmi matrix file round trip") {
  namespace fs = std::filesystem;
  auto text = testutil::random_tokens(200, 5, 17);
  auto built = testutil::build(text, 2);
  ProbabilityModel model(built.counts, built.tokens);
  auto m = pmi_matrix(PmiView(model, std::log(2.0), SupportPolicy::clamp, -1.0));

  const fs::path path = fs::temp_directory_path() / "pmikit_test_matrix.bin";
  export_pmi_matrix(path, m);
  auto back = import_pmi_matrix(path);
  CHECK(back.shift == m.shift);
  CHECK(back.policy == m.policy);
  REQUIRE(back.values.rows() == m.values.rows());
  CHECK(back.values == m.values);

  export_pmi_matrix_csv(fs::temp_directory_path() / "pmikit_test_matrix.csv", m);
  PmiMatrix big;
  big.values.resize(513, 513);
  CHECK_THROWS_AS(export_pmi_matrix_csv(fs::temp_directory_path() / "nope.csv", big),
                  CapacityError);

  std::ofstream junk(path, std::ios::binary);
  junk << "NOTAMATRIX";
  junk.close();
  CHECK_THROWS_AS(import_pmi_matrix(path), FormatError);
}
