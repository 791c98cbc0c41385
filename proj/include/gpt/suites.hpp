#pragma once

// Seeded verification suites. Each check aggregates many evaluations into
// its worst case, so a report stays short while still naming the state that
// came closest to failing.

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gpt/entropy.hpp"
#include "gpt/io.hpp"
#include "gpt/random.hpp"

namespace gpt::suites {

struct Check {
  std::string name;
  double expected = 0.0;
  double got = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::string budget = "quick";
  /// Tolerance for the checks that use the default accuracy target.
  double tol = 5e-3;
  int threads = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool pass = true;
  SuiteOptions options;
  int restarts = 0;
  int iters = 0;
  double wall_seconds = 0.0;
};

inline EvalConfig budget_config(const SuiteOptions& o) {
  EvalConfig c;
  if (o.budget == "full") {
    c = EvalConfig::full();
  } else if (o.budget != "quick") {
    throw InputError("budget must be quick or full");
  }
  c.seed = o.seed;
  c.tol = o.tol;
  c.threads = o.threads;
  return c;
}

namespace detail {

inline std::string where(const State& s) {
  std::string w = "(";
  for (std::size_t i = 0; i < s.size(); ++i) w += (i ? "," : "") + io::format_number(s[i]);
  return w + ")";
}

/// Largest excess seen so far, with the location that produced it.
class Worst {
 public:
  void add(double excess, const std::string& at) {
    if (!(excess <= worst_)) {
      worst_ = excess;
      at_ = at;
    }
    ++count_;
  }
  double value() const { return worst_; }

  /// Passing means the worst excess stays within `slack`.
  Check check(std::string name, double slack) const {
    Check c{std::move(name), 0.0, worst_, slack, worst_ <= slack, ""};
    c.detail = "worst of " + std::to_string(count_) + " at " + at_;
    return c;
  }

 private:
  double worst_ = -std::numeric_limits<double>::infinity();
  std::string at_ = "-";
  long count_ = 0;
};

inline Check near(std::string name, double expected, double got, double tol) {
  return {std::move(name), expected, got, tol, std::abs(got - expected) <= tol, ""};
}

inline State interior_state(Rng& rng, double margin) {
  return State{rng.uniform(margin, 1.0 - margin), rng.uniform(margin, 1.0 - margin)};
}

inline std::vector<double> grid_05() { return io::unit_grid(0.05); }

const EntropyFunctional kS1{EntropyBase::S1, 0, {}};
const EntropyFunctional kS2{EntropyBase::S2, 0, {}};
const EntropyFunctional kS3{EntropyBase::S3, 0, {}};

}  // namespace detail

/// Numerical S1, S2, S3 against the squared closed forms on the 0.05 grid,
/// and the closed-form chain S1 <= S2 <= S3 <= S2'.
inline std::vector<Check> squared_chain_grid(const SuiteOptions& o) {
  const Model sq = Model::squared();
  const Evaluator ev(sq, budget_config(o));
  detail::Worst s1, s2, s3, chain;
  for (double c1 : detail::grid_05()) {
    for (double c2 : detail::grid_05()) {
      const State s{c1, c2};
      const auto at = detail::where(s);
      const double exact3 = squared_s3_exact(s);
      s1.add(std::abs(ev.s1(s).value - squared_s1_closed(s)), at);
      s2.add(std::abs(ev.s2(s).value - squared_s2_closed(s)), at);
      s3.add(std::abs(ev.s3(s).value - exact3), at);
      chain.add(std::max({squared_s1_closed(s) - squared_s2_closed(s), squared_s2_closed(s) - exact3,
                          exact3 - squared_s2prime_closed(s)}),
                at);
    }
  }
  return {s1.check("|S1 - min h| on grid", o.tol), s2.check("|S2 - max h| on grid", o.tol),
          s3.check("|S3 - corner-family minimum| on grid", o.tol),
          chain.check("closed chain S1 <= S2 <= S3 <= S2' violation", 1e-9)};
}

/// Induction identities at random interior states.
inline std::vector<Check> squared_chain_induction(const SuiteOptions& o) {
  const Model sq = Model::squared();
  const Evaluator ev(sq, budget_config(o));
  Rng rng(o.seed);
  detail::Worst s1p, s2p, s3p, s2pp;
  for (int i = 0; i < 25; ++i) {
    const State s = detail::interior_state(rng, 0.05);
    const auto at = detail::where(s);
    const double hh = squared_s2prime_closed(s);
    s1p.add(std::abs(ev.induce_once(detail::kS1, s).value - squared_s2_closed(s)), at);
    s2p.add(std::abs(ev.induce_once(detail::kS2, s).value - hh), at);
    s3p.add(std::abs(ev.induce_once(detail::kS3, s).value - hh), at);
    s2pp.add(std::abs(ev.evaluate({EntropyBase::S2, 2, {}}, s).value - hh), at);
  }
  std::vector<Check> out{s1p.check("|S1' - max h|", o.tol), s2p.check("|S2' - (h + h)|", o.tol),
                         s3p.check("|S3' - (h + h)|", o.tol), s2pp.check("|S2'' - (h + h)|", 1e-2)};

  // Sensitivity to the decomposition size bound; reported, never asserted.
  const State probe{0.3, 0.6};
  for (int k = 2; k <= 6; ++k) {
    EvalConfig cfg = budget_config(o);
    cfg.components_k = k;
    const double v = induce_once(detail::kS2, sq, probe, cfg).value;
    out.push_back({"S2' at (0.3,0.6) with k = " + std::to_string(k), squared_s2prime_closed(probe), v, 0.0, true,
                   "reported only"});
  }
  return out;
}

inline std::vector<Check> squared_holevo(const SuiteOptions& o) {
  const Model sq = Model::squared();
  const Evaluator ev(sq, budget_config(o));
  Rng rng(o.seed);
  detail::Worst closed, numeric;
  for (int i = 0; i < 1000; ++i) {
    const Ensemble ens = random_ensemble(sq, rng, 2 + static_cast<int>(rng.next() % 3), false);
    double avg = 0.0;
    for (std::size_t x = 0; x < ens.size(); ++x) avg += ens.weights[x] * squared_s2_closed(ens.states[x]);
    const double acc = squared_accinfo_closed(ens);
    const auto at = "ensemble " + std::to_string(i);
    closed.add(acc - (squared_s2prime_closed(mix(sq, ens)) - avg), at);
    numeric.add(ev.accessible_information(ens).value - acc, at);
  }
  return {closed.check("closed I_acc - [S2'(mix) - avg S2] (1000 ensembles)", 1e-9),
          numeric.check("numerical I_acc - closed I_acc", 1e-6)};
}

inline std::vector<Check> classical_invariance(const SuiteOptions& o) {
  Rng rng(o.seed);
  detail::Worst below, above;
  for (int i = 0; i < 50; ++i) {
    const Model m = Model::classical(2 + i % 3);
    const State p = random_state(m, rng);
    const double h = shannon_entropy(p.coords);
    const double v = evaluate({EntropyBase::Shannon, 1, {}}, m, p, budget_config(o)).value;
    const auto at = detail::where(p);
    below.add(h - v, at);
    above.add(v - h, at);
  }
  return {below.check("H - H' (lower end)", 1e-6), above.check("H' - H (upper end)", o.tol)};
}

inline std::vector<Check> qubit_invariance(const SuiteOptions& o) {
  const Model q = Model::qubit();
  const Evaluator ev(q, budget_config(o));
  Rng rng(o.seed);
  detail::Worst dev;
  for (int i = 0; i < 25; ++i) {
    const State r = random_state(q, rng);
    dev.add(std::abs(ev.evaluate({EntropyBase::VonNeumann, 1, {}}, r).value - qubit_vn_entropy(r)), detail::where(r));
  }
  return {dev.check("|Sq' - Sq| at random Bloch vectors", 1e-2)};
}

inline std::vector<Check> qubit_holevo(const SuiteOptions& o) {
  const Model q = Model::qubit();
  const Evaluator ev(q, budget_config(o));
  Rng rng(o.seed);
  detail::Worst chi, orth;
  for (int i = 0; i < 200; ++i) {
    const Ensemble ens = random_ensemble(q, rng, 2 + static_cast<int>(rng.next() % 3), true);
    chi.add(ev.accessible_information(ens).value - qubit_chi(ens), "ensemble " + std::to_string(i));
  }
  for (int i = 0; i < 10; ++i) {
    const State u = random_pure_state(q, rng);
    const State v{-u[0], -u[1], -u[2]};
    const Ensemble ens{{0.5, 0.5}, {u, v}, true};
    orth.add(std::abs(ev.accessible_information(ens).value - 1.0), detail::where(u));
  }
  return {chi.check("I_acc - chi (200 pure ensembles)", 1e-6),
          orth.check("|I_acc - 1| for orthogonal pure pairs", o.tol)};
}

inline std::vector<Check> footnote_pure(const SuiteOptions& o) {
  const Model sq = Model::squared();
  const State s{0.5, 0.3};
  EvalConfig pure = budget_config(o);
  pure.pure_only = true;
  const double restricted = induce_once(detail::kS2, sq, s, pure).value;
  const double closed = squared_s2prime_closed(s);
  Check upper{"pure-restricted S2' at (0.5,0.3)", 1.0, restricted, o.tol, restricted <= 1.0 + o.tol, "at most"};
  Check sep{"closed S2' - pure-restricted S2'", 0.8, closed - restricted, 0.0, closed - restricted >= 0.8, "at least"};
  return {upper, detail::near("closed S2' at (0.5,0.3)", 1.881291, closed, 5e-7), sep};
}

/// Induced entropies vanish on pure states, are bounded below away from
/// them, and never fall below the base entropy.
inline std::vector<Check> mixedness(const SuiteOptions& o) {
  const Model sq = Model::squared();
  const Evaluator ev(sq, budget_config(o));
  detail::Worst corners, floor, monotone;
  for (const auto& f : {detail::kS1, detail::kS2, detail::kS3}) {
    const std::string tag = f.induced().name() + " ";
    for (const State& c : {State{0, 0}, State{0, 1}, State{1, 0}, State{1, 1}}) {
      corners.add(ev.induce_once(f, c).value, tag + detail::where(c));
    }
    for (double c1 : detail::grid_05()) {
      for (double c2 : detail::grid_05()) {
        if (std::min({c1, 1 - c1, c2, 1 - c2}) < 0.05 - 1e-12) continue;
        const State s{c1, c2};
        floor.add(binary_entropy(0.05) - ev.induce_once(f, s).value, tag + detail::where(s));
      }
    }
  }
  Rng rng(o.seed);
  for (int i = 0; i < 50; ++i) {
    const State s{rng.uniform(), rng.uniform()};
    for (const auto& f : {detail::kS1, detail::kS2, detail::kS3}) {
      const double base = find_closed_form(sq, f.base, 0)->value(s);
      monotone.add(base - ev.induce_once(f, s).value, f.name() + " " + detail::where(s));
    }
  }
  return {corners.check("S' at pure corners", 1e-6), floor.check("h(0.05) - S' at margin-0.05 grid", 0.0),
          monotone.check("S - S' at random states", 1e-6)};
}

inline std::vector<Check> concavity(const SuiteOptions& o) {
  Rng rng(o.seed);
  detail::Worst concave;
  for (int i = 0; i < 1000; ++i) {
    const State a{rng.uniform(), rng.uniform()}, b{rng.uniform(), rng.uniform()};
    const double lambda = rng.uniform();
    const State m{lambda * a[0] + (1 - lambda) * b[0], lambda * a[1] + (1 - lambda) * b[1]};
    concave.add(lambda * squared_s2prime_closed(a) + (1 - lambda) * squared_s2prime_closed(b) -
                    squared_s2prime_closed(m),
                detail::where(a) + "/" + detail::where(b));
  }
  const double deficit =
      0.5 * squared_s2_closed(State{0.5, 0.01}) + 0.5 * squared_s2_closed(State{0.01, 0.5}) -
      squared_s2_closed(State{0.255, 0.255});
  Check witness{"max h midpoint deficit at (0.5,0.01)/(0.01,0.5)", 0.15, deficit, 0.0, deficit >= 0.15, "at least"};
  return {concave.check("h + h concavity violation (1000 pairs)", 1e-9), witness};
}

using SuiteFn = std::function<std::vector<Check>(const SuiteOptions&)>;

inline const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"squared-chain",
       [](const SuiteOptions& o) {
         auto c = squared_chain_grid(o);
         auto d = squared_chain_induction(o);
         c.insert(c.end(), d.begin(), d.end());
         return c;
       }},
      {"squared-holevo", squared_holevo},
      {"classical-invariance", classical_invariance},
      {"qubit-invariance", qubit_invariance},
      {"qubit-holevo", qubit_holevo},
      {"footnote-pure", footnote_pure},
      {"mixedness", mixedness},
      {"concavity", concavity},
  };
  return r;
}

inline SuiteReport run_checks(const std::string& name, const SuiteFn& fn, const SuiteOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep;
  rep.suite = name;
  rep.options = o;
  const EvalConfig cfg = budget_config(o);
  rep.restarts = cfg.restarts;
  rep.iters = cfg.iters;
  rep.checks = fn(o);
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Runs a named suite; "all" runs every registered suite in order.
inline std::vector<SuiteReport> run(const std::string& name, const SuiteOptions& o) {
  std::vector<SuiteReport> out;
  for (const auto& [n, fn] : registry()) {
    if (name == "all" || name == n) out.push_back(run_checks(n, fn, o));
  }
  if (out.empty()) throw InputError("unknown suite '" + name + "'");
  return out;
}

inline io::json report_json(const SuiteReport& r, bool timing) {
  io::json checks = io::json::array();
  for (const auto& c : r.checks) {
    checks.push_back(io::json{{"name", c.name},
                              {"expected", io::number(c.expected)},
                              {"got", io::number(c.got)},
                              {"tolerance", io::number(c.tolerance)},
                              {"pass", c.pass},
                              {"detail", c.detail}});
  }
  io::json j{{"suite", r.suite},
             {"pass", r.pass},
             {"config",
              {{"seed", r.options.seed},
               {"budget", r.options.budget},
               {"restarts", r.restarts},
               {"iters", r.iters},
               {"tol", io::number(r.options.tol)}}},
             {"checks", std::move(checks)}};
  if (timing) j["wall_seconds"] = io::number(r.wall_seconds);
  return j;
}

}  // namespace gpt::suites
