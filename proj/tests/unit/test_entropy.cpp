#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>

#include "gpt/entropy.hpp"
#include "test_support.hpp"

using namespace gpt;
using Catch::Approx;

namespace {

EvalConfig quick() {
  EvalConfig c;
  c.threads = 1;
  return c;
}

const EntropyFunctional kS1{EntropyBase::S1, 0, {}};
const EntropyFunctional kS2{EntropyBase::S2, 0, {}};
const EntropyFunctional kS3{EntropyBase::S3, 0, {}};

const State kQubit06{0.0, 0.36, 0.48};  // |r| = 0.6

std::vector<double> interior_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(i * 0.05);
  return g;
}

}  // namespace

TEST_CASE("eval_s1", "[entropy]") {
  const auto sq = eval_s1(Model::squared(), State{0.2, 0.5}, quick());
  CHECK(sq.value == Approx(test::kH02).margin(5e-3));
  CHECK(sq.bound == BoundDirection::Upper);
  CHECK(sq.value >= test::kH02 - 1e-12);
  REQUIRE(sq.reference);
  CHECK(*sq.reference == Approx(test::kH02).margin(1e-12));

  const auto cl = eval_s1(Model::classical(3), State{0.5, 0.25, 0.25}, quick());
  CHECK(cl.value == Approx(1.5).margin(1e-9));
  CHECK(cl.bound == BoundDirection::Exact);

  CHECK(eval_s1(Model::qubit(), kQubit06, quick()).value == Approx(test::kH02).margin(5e-3));
}

TEST_CASE("eval_s2", "[entropy]") {
  CHECK(eval_s2(Model::squared(), State{0.2, 0.5}, quick()).value == Approx(1.0).margin(5e-3));
  CHECK(eval_s2(Model::squared(), State{1.0, 1.0}, quick()).value == Approx(0.0).margin(1e-12));
  const auto q = eval_s2(Model::qubit(), kQubit06, quick());
  CHECK(q.value == Approx(test::kH02).margin(5e-3));
  CHECK(q.bound == BoundDirection::Lower);
  REQUIRE(q.certificate.ensemble);
  for (const auto& st : q.certificate.ensemble->states) CHECK(is_pure(Model::qubit(), st));
}

TEST_CASE("eval_s3", "[entropy]") {
  CHECK(eval_s3(Model::squared(), State{0.5, 0.5}, quick()).value == Approx(1.0).margin(5e-3));
  const State p{0.2, 0.3, 0.1, 0.4};
  CHECK(eval_s3(Model::classical(4), p, quick()).value == Approx(shannon_entropy(p.coords)).margin(1e-9));
  const auto q = eval_s3(Model::qubit(), kQubit06, quick());
  CHECK(q.value == Approx(test::kH02).margin(5e-3));
  CHECK_FALSE(q.certificate.measurement);

  SECTION("squared S3 follows the corner-family oracle") {
    for (const State& s : {State{0.3, 0.65}, State{0.5, 0.25}, State{0.9, 0.15}}) {
      CHECK(eval_s3(Model::squared(), s, quick()).value == Approx(squared_s3_exact(s)).margin(5e-3));
    }
  }
}

TEST_CASE("induce_once", "[entropy]") {
  const Model sq = Model::squared();
  CHECK(induce_once(kS1, sq, State{0.2, 0.5}, quick()).value == Approx(1.0).margin(5e-3));
  CHECK(induce_once(kS2, sq, State{0.5, 0.5}, quick()).value == Approx(2.0).margin(5e-3));

  EvalConfig pure = quick();
  pure.pure_only = true;
  const double restricted = induce_once(kS2, sq, State{0.5, 0.3}, pure).value;
  CHECK(restricted == Approx(1.0).margin(5e-3));
  CHECK(restricted < squared_s2prime_closed(State{0.5, 0.3}) - 0.8);

  SECTION("numerical inner entropies") {
    EvalConfig numeric = quick();
    numeric.use_closed_forms = false;
    numeric.restarts = 8;
    numeric.iters = 100;
    const auto r = induce_once(kS1, sq, State{0.2, 0.5}, numeric);
    CHECK(r.value == Approx(1.0).margin(5e-3));
    CHECK(r.certificate.inner_values.size() == r.certificate.ensemble->size());
  }
}

TEST_CASE("evaluate", "[entropy]") {
  CHECK(evaluate({EntropyBase::S2, 2, {}}, Model::squared(), State{0.5, 0.5}, quick()).value ==
        Approx(2.0).margin(5e-3));
  CHECK(evaluate({EntropyBase::Shannon, 1, {}}, Model::classical(2), State{0.3, 0.7}, quick()).value ==
        Approx(test::kH03).margin(5e-3));
  CHECK(evaluate({EntropyBase::VonNeumann, 1, {}}, Model::qubit(), kQubit06, quick()).value ==
        Approx(test::kH02).margin(5e-3));
  CHECK(evaluate(EntropyFunctional::closed("squared.s2prime"), Model::squared(), State{0.5, 0.3}, quick()).value ==
        Approx(1.0 + test::kH03).margin(1e-12));

  SECTION("unresolvable pairs are input errors") {
    CHECK_THROWS_AS(evaluate({EntropyBase::VonNeumann, 0, {}}, Model::squared(), State{0.5, 0.5}), InputError);
    CHECK_THROWS_AS(evaluate({EntropyBase::Shannon, 1, {}}, Model::qubit(), kQubit06), InputError);
    CHECK_THROWS_AS(evaluate(EntropyFunctional::closed("qubit.vn"), Model::squared(), State{0.5, 0.5}), InputError);
    CHECK_THROWS_AS(evaluate({EntropyBase::S1, -1, {}}, Model::squared(), State{0.5, 0.5}), InputError);
    CHECK_THROWS_AS(evaluate(kS1, Model::squared(), State{1.5, 0.5}), InputError);
  }
  SECTION("bad configurations are input errors") {
    EvalConfig bad = quick();
    bad.restarts = 0;
    CHECK_THROWS_AS(evaluate(kS1, Model::squared(), State{0.5, 0.5}, bad), InputError);
  }
  SECTION("names use prime notation") {
    CHECK(EntropyFunctional{EntropyBase::S2, 2, {}}.name() == "S2''");
    CHECK(EntropyFunctional{EntropyBase::VonNeumann, 1, {}}.name() == "Sq'");
    CHECK(EntropyFunctional::closed("squared.s2").induced().name() == "closed:squared.s2'");
  }
}

TEST_CASE("accessible_information", "[entropy]") {
  const auto sq = accessible_information(
      Model::squared(), Ensemble{{0.5, 0.5}, {State{1.0, 0.0}, State{0.0, 1.0}}, false}, quick());
  CHECK(sq.value == Approx(1.0).margin(5e-3));
  REQUIRE(sq.reference);
  CHECK(*sq.reference == Approx(1.0).margin(1e-12));

  CHECK(accessible_information(Model::qubit(), Ensemble{{1.0}, {kQubit06}, false}, quick()).value ==
        Approx(0.0).margin(1e-9));
  CHECK(accessible_information(Model::qubit(), Ensemble{{0.5, 0.5}, {State{0, 0, 1}, State{0, 0, -1}}, true}, quick())
            .value == Approx(1.0).margin(5e-3));
  CHECK_THROWS_AS(accessible_information(Model::squared(), Ensemble{{0.5, 0.6}, {State{1, 0}, State{0, 1}}, false}),
                  InputError);
}

TEST_CASE("holevo_report", "[entropy]") {
  const Model sq = Model::squared();
  const auto tight = holevo_report(sq, Ensemble{{0.5, 0.5}, {State{1, 1}, State{0, 0}}, false}, kS1, quick());
  CHECK(tight.accessible == Approx(1.0).margin(5e-3));
  CHECK(tight.bound == Approx(1.0).margin(1e-12));
  CHECK(tight.gap == Approx(0.0).margin(5e-3));
  CHECK(tight.induced_closed);
  CHECK(tight.gap_ok);

  const auto loose = holevo_report(sq, Ensemble{{0.5, 0.5}, {State{1, 0}, State{0, 1}}, false}, kS2, quick());
  CHECK(loose.accessible == Approx(1.0).margin(5e-3));
  CHECK(loose.induced_at_mix == 2.0);
  CHECK(loose.bound == 2.0);
  CHECK(loose.gap == Approx(1.0).margin(5e-3));

  const auto q = holevo_report(Model::qubit(), Ensemble{{0.5, 0.5}, {State{0, 0, 1}, State{1, 0, 0}}, true},
                               {EntropyBase::VonNeumann, 0, {}}, quick());
  CHECK(q.accessible <= test::kChiZX + 1e-9);
  CHECK(q.bound == Approx(test::kChiZX).margin(1e-12));
  CHECK(q.gap_ok);

  SECTION("numerical bounds are flagged") {
    EvalConfig numeric = quick();
    numeric.use_closed_forms = false;
    numeric.restarts = 4;
    numeric.iters = 60;
    const auto r = holevo_report(sq, Ensemble{{0.5, 0.5}, {State{1, 0}, State{0, 1}}, false}, kS1, numeric);
    CHECK_FALSE(r.induced_closed);
    CHECK(r.note.find("shortfall") != std::string::npos);
  }
}

TEST_CASE("induction never lowers an entropy", "[entropy][property]") {
  Rng rng(51);
  const Model sq = Model::squared();
  for (int i = 0; i < 50; ++i) {
    const State s = test::random_state(sq, rng);
    for (const auto& f : {kS1, kS2, kS3}) {
      const double base = find_closed_form(sq, f.base, 0)->value(s);
      REQUIRE(induce_once(f, sq, s, quick()).value >= base - 1e-6);
    }
  }
}

TEST_CASE("induced entropies vanish exactly on pure states", "[entropy][property]") {
  const Model sq = Model::squared();
  for (const State& corner : {State{0, 0}, State{0, 1}, State{1, 0}, State{1, 1}}) {
    for (const auto& f : {kS1, kS2, kS3}) REQUIRE(induce_once(f, sq, corner, quick()).value <= 1e-6);
  }
  for (double c1 : interior_grid()) {
    for (double c2 : interior_grid()) {
      for (const auto& f : {kS1, kS2, kS3}) {
        REQUIRE(induce_once(f, sq, State{c1, c2}, quick()).value >= test::kH005);
      }
    }
  }
}

TEST_CASE("certificates reproduce their values", "[entropy][property]") {
  Rng rng(52);
  for (const Model& model : {Model::squared(), Model::qubit(), Model::classical(3)}) {
    const Evaluator ev(model, quick());
    for (int i = 0; i < 5; ++i) {
      const State s = test::random_state(model, rng);
      for (const auto& f : {kS1, kS2, kS3, kS1.induced(), kS2.induced()}) {
        const auto r = ev.evaluate(f, s);
        REQUIRE(ev.certificate_objective(f, s, r) == Approx(r.value).margin(1e-9));
      }
    }
  }
  SECTION("numerical inner values") {
    EvalConfig numeric = quick();
    numeric.use_closed_forms = false;
    numeric.restarts = 4;
    numeric.iters = 60;
    const Evaluator ev(Model::squared(), numeric);
    const State s{0.35, 0.6};
    const auto r = ev.evaluate(kS2.induced(), s);
    REQUIRE(ev.certificate_objective(kS2.induced(), s, r) == Approx(r.value).margin(1e-9));
  }
}

TEST_CASE("more restarts never hurt", "[entropy][property]") {
  Rng rng(53);
  for (const Model& model : {Model::squared(), Model::qubit()}) {
    for (int i = 0; i < 3; ++i) {
      const State s = test::random_state(model, rng);
      for (const auto& f : {kS1, kS2, kS3, kS1.induced()}) {
        const bool sup = f.base == EntropyBase::S2 || f.depth > 0;
        auto cache = std::make_shared<EvalCache>();
        double previous = sup ? -INFINITY : INFINITY;
        for (int restarts : {1, 2, 4, 8}) {
          EvalConfig c = quick();
          c.restarts = restarts;
          c.iters = 60;
          const double v = Evaluator(model, c, cache).evaluate(f, s).value;
          if (sup) {
            REQUIRE(v >= previous);
          } else {
            REQUIRE(v <= previous);
          }
          previous = v;
        }
      }
    }
  }
}

TEST_CASE("numerical S1 and S2 agree with the closed forms on the grid", "[entropy][property]") {
  const Model sq = Model::squared();
  const Evaluator ev(sq, quick());
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const State s{i * 0.05, j * 0.05};
      REQUIRE(std::abs(ev.s1(s).value - squared_s1_closed(s)) <= 5e-3);
      REQUIRE(std::abs(ev.s2(s).value - squared_s2_closed(s)) <= 5e-3);
    }
  }
}

TEST_CASE("evaluation is independent of threads and cache sharing", "[entropy][property]") {
  const Model q = Model::qubit();
  const State s{0.2, -0.3, 0.4};
  EvalConfig one = quick();
  EvalConfig many = quick();
  many.threads = 4;
  const auto a = evaluate(kS2, q, s, one);
  const auto b = evaluate(kS2, q, s, many);
  CHECK(a.value == b.value);
  CHECK(a.certificate.code == b.certificate.code);

  EvalConfig numeric = quick();
  numeric.use_closed_forms = false;
  numeric.restarts = 4;
  numeric.iters = 40;
  const Model sq = Model::squared();
  const std::vector<State> states{State{0.3, 0.6}, State{0.7, 0.2}, State{0.5, 0.5}, State{0.1, 0.9}};
  std::vector<double> sequential;
  for (const auto& st : states) sequential.push_back(evaluate(kS1.induced(), sq, st, numeric).value);

  auto shared = std::make_shared<EvalCache>();
  std::vector<double> concurrent(states.size());
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < states.size(); ++k) {
    workers.emplace_back([&, k] {
      auto own = numeric;
      concurrent[k] = Evaluator(sq, own, shared).evaluate(kS1.induced(), states[k]).value;
    });
  }
  for (auto& w : workers) w.join();
  CHECK(concurrent == sequential);
}
