// Acceptance run: one PASS/FAIL line per criterion, followed by the checks
// that failed. Criterion numbers given on the command line restrict the run.
// Exit status is 0 only when every selected criterion passes.

#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "gpt/suites.hpp"

namespace {

using namespace gpt::suites;

struct Criterion {
  int id;
  std::string title;
  std::string budget;
  double max_seconds;  // 0 means no runtime bound
  std::vector<SuiteFn> parts;
};

std::vector<Criterion> criteria() {
  return {
      {1, "squared closed-form chain on the 0.05 grid", "quick", 120.0, {squared_chain_grid}},
      {2, "squared induction identities", "full", 600.0, {squared_chain_induction}},
      {3, "pure-restricted S2' separation at (0.5, 0.3)", "full", 0.0, {footnote_pure}},
      {4, "squared Holevo bound over 1000 ensembles", "full", 60.0, {squared_holevo}},
      {5, "classical invariance H' = H", "full", 0.0, {classical_invariance}},
      {6, "qubit invariance and Holevo bound", "full", 900.0, {qubit_invariance, qubit_holevo}},
      {7, "mixedness and induction monotonicity", "full", 0.0, {mixedness}},
      {8, "concavity of h + h and the max h witness", "full", 0.0, {concavity}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    SuiteOptions o;
    o.budget = c.budget;
    double seconds = 0.0;
    std::vector<Check> checks;
    for (const auto& part : c.parts) {
      const auto rep = run_checks("criterion", part, o);
      seconds += rep.wall_seconds;
      checks.insert(checks.end(), rep.checks.begin(), rep.checks.end());
    }
    bool pass = true;
    for (const auto& ch : checks) pass = pass && ch.pass;
    const bool in_time = c.max_seconds <= 0.0 || seconds <= c.max_seconds;
    pass = pass && in_time;
    all_pass = all_pass && pass;

    std::printf("%s criterion %d: %s [%s budget, %.1f s", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                c.budget.c_str(), seconds);
    if (c.max_seconds > 0.0) std::printf(" of %.0f s allowed", c.max_seconds);
    std::printf("]\n");
    for (const auto& ch : checks) {
      if (ch.pass) continue;
      std::printf("    failed: %s: expected %.9g, got %.9g, tolerance %.3g %s\n", ch.name.c_str(), ch.expected, ch.got,
                  ch.tolerance, ch.detail.c_str());
    }
    if (!in_time) std::printf("    failed: runtime bound exceeded\n");
    std::fflush(stdout);
  }
  std::printf("%s\n", all_pass ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return all_pass ? 0 : 1;
}
