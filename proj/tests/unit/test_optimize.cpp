#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gpt/info.hpp"
#include "gpt/models.hpp"
#include "gpt/optimize.hpp"
#include "test_support.hpp"

using namespace gpt;
using Catch::Approx;

namespace {

double s2prime_body(const Ensemble& ens) {
  double v = squared_accinfo_closed(ens);
  for (std::size_t x = 0; x < ens.size(); ++x) v += ens.weights[x] * squared_s2_closed(ens.states[x]);
  return v;
}

}  // namespace

TEST_CASE("local_search", "[optimize]") {
  const Box unit({0.0}, {1.0});
  const SearchBudget budget{8, 200, 1, 1};

  const auto quad = local_search([](auto x) { return -(x[0] - 0.3) * (x[0] - 0.3); }, unit, Sense::Maximize, budget);
  CHECK(quad.feasible);
  CHECK(quad.best_point[0] == Approx(0.3).margin(1e-6));
  CHECK(quad.best_value == Approx(0.0).margin(1e-6));

  const auto affine = local_search([](auto x) { return 2.0 * x[0] + 1.0; }, unit, Sense::Maximize, budget);
  CHECK(affine.best_point[0] == 1.0);
  CHECK(affine.best_value == 3.0);

  const auto h = local_search([](auto x) { return binary_entropy(x[0]); }, unit, Sense::Maximize, budget);
  CHECK(h.best_point[0] == Approx(0.5).margin(1e-6));
  CHECK(h.best_value == Approx(1.0).margin(1e-9));

  SECTION("bad arguments") {
    CHECK_THROWS_AS(local_search([](auto) { return 0.0; }, Box({1.0}, {0.0}), Sense::Maximize, budget), InputError);
    CHECK_THROWS_AS(local_search([](auto) { return 0.0; }, unit, Sense::Maximize, SearchBudget{0, 10, 0, 1}),
                    InputError);
  }
  SECTION("infeasible everywhere") {
    const auto none = local_search([](auto) { return infeasible_value(Sense::Maximize); }, unit, Sense::Maximize,
                                   SearchBudget{2, 10, 0, 1});
    CHECK_FALSE(none.feasible);
  }
  SECTION("minimisation") {
    const auto m = local_search([](auto x) { return std::abs(x[0] - 0.7) + std::abs(x[1] + 0.2); },
                                Box({0.0, -1.0}, {1.0, 1.0}), Sense::Minimize, budget);
    CHECK(m.best_point[0] == Approx(0.7).margin(1e-6));
    CHECK(m.best_point[1] == Approx(-0.2).margin(1e-6));
  }
}

TEST_CASE("decode_decomposition", "[optimize]") {
  const Model sq = Model::squared();
  const auto one = decode_decomposition(sq, State{0.4, 0.6}, DecompositionCode{1, {}}, false);
  REQUIRE(one);
  REQUIRE(one->size() == 1);
  CHECK(one->weights[0] == 1.0);
  CHECK(one->states[0].coords == std::vector<double>{0.4, 0.6});

  const auto edge = decode_decomposition(sq, State{0.5, 0.3}, DecompositionCode{2, {0.5, 1.0, 0.3}}, false);
  REQUIRE(edge);
  REQUIRE(edge->size() == 2);
  CHECK(edge->weights[0] == 0.5);
  CHECK(edge->weights[1] == 0.5);
  CHECK(edge->states[1][0] == Approx(0.0).margin(1e-15));
  CHECK(edge->states[1][1] == Approx(0.3).margin(1e-15));

  CHECK_FALSE(decode_decomposition(sq, State{0.9, 0.5}, DecompositionCode{2, {0.5, 0.1, 0.5}}, false));
  CHECK_THROWS_AS(decode_decomposition(sq, State{0.5, 0.5}, DecompositionCode{2, {0.5}}, false), InputError);

  SECTION("negligible weights drop their member") {
    const auto d = decode_decomposition(sq, State{0.5, 0.5}, DecompositionCode{2, {1e-12, 1.0, 1.0}}, false);
    REQUIRE(d);
    CHECK(d->size() == 1);
  }
}

TEST_CASE("decoded ensembles reproduce the state", "[optimize][property]") {
  Rng rng(41);
  for (const Model& model : test::all_models()) {
    for (bool pure : {false, true}) {
      for (int k = 1; k <= 5; ++k) {
        for (int i = 0; i < 200; ++i) {
          const State s = test::random_state(model, rng);
          const DecompositionCode code{k, sample_decomposition(model, k, pure, rng, i)};
          const auto ens = decode_decomposition(model, s, code, pure);
          if (!ens) continue;
          REQUIRE(validate_ensemble(model, *ens));
          const State m = mix(model, *ens);
          for (std::size_t j = 0; j < model.dim(); ++j) REQUIRE(m[j] == Approx(s[j]).margin(1e-9));
          if (pure) {
            for (const auto& st : ens->states) REQUIRE(is_pure(model, st));
          }
        }
      }
    }
  }
}

TEST_CASE("encode inverts the mixed chart", "[optimize][property]") {
  Rng rng(42);
  for (const Model& model : test::all_models()) {
    for (int i = 0; i < 200; ++i) {
      const int members = 1 + static_cast<int>(rng.next() % 4);
      const Ensemble ens = test::random_ensemble(model, rng, members, false);
      const State s = mix(model, ens);
      const auto code = encode_decomposition(model, s, ens, 4);
      const auto back = decode_decomposition(model, s, code, false);
      REQUIRE(back);
      REQUIRE(back->size() == ens.size());
      for (std::size_t x = 0; x < ens.size(); ++x) {
        REQUIRE(back->weights[x] == Approx(ens.weights[x]).margin(1e-9));
        for (std::size_t j = 0; j < model.dim(); ++j) {
          REQUIRE(back->states[x][j] == Approx(ens.states[x][j]).margin(1e-9));
        }
      }
    }
  }
}

TEST_CASE("optimize_decomposition", "[optimize]") {
  const Model sq = Model::squared();
  const SearchBudget budget{16, 200, 0, 1};

  SECTION("constant objective keeps the trivial ensemble") {
    const auto o = optimize_decomposition(
        sq, State{0.4, 0.7}, [](const Ensemble&, auto) { return 0.0; }, DecompositionSearch{.components = 4}, budget);
    REQUIRE(o.feasible);
    CHECK(o.value == 0.0);
    REQUIRE(o.ensemble.size() == 1);
    CHECK(o.ensemble.states[0].coords == std::vector<double>{0.4, 0.7});
  }
  SECTION("induction body with closed S2 reaches h(c1) + h(c2)") {
    const auto o = optimize_decomposition(
        sq, State{0.5, 0.5}, [](const Ensemble& e, auto) { return s2prime_body(e); }, DecompositionSearch{.components = 4}, budget);
    CHECK(o.value == Approx(2.0).margin(5e-3));
    CHECK(o.value <= 2.0 + 1e-9);
  }
  SECTION("pure decompositions minimising H(p)") {
    DecompositionSearch search{.components = 4, .pure_only = true, .sense = Sense::Minimize};
    const auto o = optimize_decomposition(
        sq, State{0.5, 0.5}, [](const Ensemble& e, auto) { return shannon_entropy(e.weights); }, search, budget);
    CHECK(o.value == Approx(1.0).margin(5e-3));
    for (const auto& st : o.ensemble.states) CHECK(is_pure(sq, st));
  }
}

TEST_CASE("results do not depend on the thread count", "[optimize][property]") {
  const Model sq = Model::squared();
  const State s{0.3, 0.65};
  const auto body = [](const Ensemble& e, auto) { return s2prime_body(e); };
  const auto a = optimize_decomposition(sq, s, body, DecompositionSearch{.components = 4}, SearchBudget{12, 100, 5, 1});
  const auto b = optimize_decomposition(sq, s, body, DecompositionSearch{.components = 4}, SearchBudget{12, 100, 5, 4});
  CHECK(a.value == b.value);
  CHECK(a.code.values == b.code.values);
  CHECK(a.best_restart == b.best_restart);
  CHECK(a.evals == b.evals);

  const Objective f = [](auto x) { return std::sin(7 * x[0]) * std::cos(5 * x[1]); };
  const Box box({0.0, 0.0}, {1.0, 1.0});
  const auto p = local_search(f, box, Sense::Maximize, SearchBudget{9, 50, 3, 1});
  const auto q = local_search(f, box, Sense::Maximize, SearchBudget{9, 50, 3, 3});
  CHECK(p.best_point == q.best_point);
  CHECK(p.best_value == q.best_value);
}

TEST_CASE("optimum never falls below the trivial ensemble", "[optimize][property]") {
  Rng rng(43);
  const Model sq = Model::squared();
  for (int i = 0; i < 30; ++i) {
    const State s = test::random_state(sq, rng);
    // Deliberately rugged objective; the baseline guarantee must hold anyway.
    const auto body = [](const Ensemble& e, auto) {
      double v = 0.0;
      for (std::size_t x = 0; x < e.size(); ++x) v += e.weights[x] * std::sin(9 * e.states[x][0] + 4 * e.states[x][1]);
      return v;
    };
    const double baseline = body(Ensemble{{1.0}, {s}, false}, std::span<const double>{});
    const auto o = optimize_decomposition(sq, s, body, DecompositionSearch{.components = 3}, SearchBudget{2, 20, 7u + i, 1});
    REQUIRE(o.feasible);
    REQUIRE(o.value >= baseline);
    REQUIRE(body(o.ensemble, std::span<const double>{}) == Approx(o.value).margin(1e-12));
  }
}

TEST_CASE("affine coordinates end on the box boundary", "[optimize][property]") {
  Rng rng(44);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.uniform(-2.0, 2.0);
    if (std::abs(a) < 1e-3) continue;
    const Objective f = [a](auto x) { return a * x[0] - (x[1] - 0.4) * (x[1] - 0.4); };
    const auto o = local_search(f, Box({-1.0, 0.0}, {2.0, 1.0}), Sense::Maximize, SearchBudget{4, 200, 9u + i, 1});
    REQUIRE(o.best_point[0] == Approx(a > 0 ? 2.0 : -1.0).margin(1e-6));
    REQUIRE(f(o.best_point) == o.best_value);
  }
}
