// gpt-entropy: compute, sweep, accinfo, holevo and verify.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error,
// 3 file I/O error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gpt/io.hpp"
#include "gpt/suites.hpp"

namespace {

using gpt::io::json;

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

struct BudgetFlags {
  std::string budget = "quick";
  std::optional<int> restarts, iters, k, threads, max_outcomes;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  bool pure_only = false;
  bool force_numerical = false;

  void attach(CLI::App* app) {
    app->add_option("--budget", budget, "quick (16 restarts, 200 iters) or full (64, 1000)")
        ->check(CLI::IsMember({"quick", "full"}));
    app->add_option("--restarts", restarts, "restarts per search");
    app->add_option("--iters", iters, "pattern sweeps per restart");
    app->add_option("--seed", seed, "base seed");
    app->add_option("--k", k, "decomposition size bound (default dim + 2)");
    app->add_option("--threads", threads, "worker threads (default GPT_ENTROPY_THREADS or all cores)");
    app->add_option("--max-outcomes", max_outcomes, "qubit POVM outcome cap (2..4)");
    app->add_option("--tol", tol, "accuracy target in bits");
    app->add_flag("--pure-only", pure_only, "restrict induction to pure decompositions");
    app->add_flag("--force-numerical", force_numerical, "ignore registered closed forms");
  }

  gpt::EvalConfig config() const {
    gpt::EvalConfig c = budget == "full" ? gpt::EvalConfig::full() : gpt::EvalConfig::quick();
    if (restarts) c.restarts = *restarts;
    if (iters) c.iters = *iters;
    if (k) c.components_k = *k;
    if (threads) c.threads = *threads;
    if (max_outcomes) c.max_outcomes = *max_outcomes;
    if (tol) c.tol = *tol;
    c.seed = seed;
    c.pure_only = pure_only;
    c.use_closed_forms = !force_numerical;
    c.validate();
    if (k && *k < 1) throw gpt::InputError("--k must be >= 1");
    return c;
  }
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct ComputeArgs {
  std::string model, state, entropy;
  BudgetFlags flags;
};

int cmd_compute(const ComputeArgs& a) {
  const auto coords = gpt::io::parse_list(a.state);
  const gpt::Model model = gpt::io::parse_model(a.model, coords.size());
  const gpt::State s = gpt::io::parse_state(model, coords);
  const gpt::EntropyFunctional f = gpt::io::parse_entropy(a.entropy);
  const gpt::EvalConfig cfg = a.flags.config();
  const auto r = gpt::evaluate(f, model, s, cfg);
  json j{{"model", model.name()}, {"state", gpt::io::numbers(s.coords)}, {"entropy", f.name()}};
  j.update(gpt::io::result_json(r, cfg, model));
  print(j);
  return kOk;
}

struct SweepArgs {
  std::string model = "squared", entropies = "S1,S2,S3,S2'", out;
  double step = 0.05;
  BudgetFlags flags;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.model != "squared") throw gpt::InputError("sweep supports the squared model only");
  const gpt::Model sq = gpt::Model::squared();
  std::vector<gpt::EntropyFunctional> fs;
  for (const auto& name : gpt::io::split(a.entropies, ',')) fs.push_back(gpt::io::parse_entropy(name));
  if (fs.empty()) throw gpt::InputError("no entropies requested");
  const auto grid = gpt::io::unit_grid(a.step);
  const gpt::EvalConfig cfg = a.flags.config();
  const gpt::Evaluator ev(sq, cfg);

  gpt::io::CsvTable t;
  t.header = {"c1", "c2"};
  for (const auto& f : fs) t.header.push_back(f.name());
  for (double c1 : grid) {
    for (double c2 : grid) {
      const gpt::State s{c1, c2};
      std::vector<double> row{c1, c2};
      for (const auto& f : fs) {
        std::optional<gpt::ClosedForm> cf;
        if (f.base == gpt::EntropyBase::ClosedForm) {
          if (f.depth == 0) cf = gpt::closed_form_by_name(f.closed_name);
        } else if (!a.flags.force_numerical) {
          cf = gpt::find_closed_form(sq, f.base, f.depth);
        }
        row.push_back(cf ? cf->value(s) : ev.evaluate(f, s).value);
      }
      t.rows.push_back(std::move(row));
    }
  }
  const std::string text = gpt::io::csv_text(t);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    gpt::io::write_text(a.out, text);
    print(json{{"out", a.out}, {"rows", t.rows.size()}, {"columns", t.header}});
  }
  return kOk;
}

struct EnsembleArgs {
  std::string path, entropy = "S2";
  BudgetFlags flags;
};

int cmd_accinfo(const EnsembleArgs& a) {
  const auto file = gpt::io::read_ensemble_file(a.path);
  const gpt::EvalConfig cfg = a.flags.config();
  const auto r = gpt::accessible_information(file.model, file.ensemble, cfg);
  json j{{"model", file.model.name()}, {"I_acc", gpt::io::number(r.value)}, {"bound_direction", to_string(r.bound)}};
  if (r.reference) j["reference"] = json{{"name", r.reference_name}, {"value", gpt::io::number(*r.reference)}};
  j["certificate"] = gpt::io::certificate_json(r.certificate);
  j["budget"] = gpt::io::budget_json(r, cfg, file.model);
  print(j);
  return kOk;
}

int cmd_holevo(const EnsembleArgs& a) {
  const auto file = gpt::io::read_ensemble_file(a.path);
  const gpt::EvalConfig cfg = a.flags.config();
  const auto base = gpt::io::parse_entropy(a.entropy);
  const auto rep = gpt::holevo_report(file.model, file.ensemble, base, cfg);
  json j{{"model", file.model.name()}, {"entropy", base.name()}};
  j.update(gpt::io::holevo_json(rep, cfg, file.model));
  print(j);
  return kOk;
}

struct VerifyArgs {
  std::string suite;
  gpt::suites::SuiteOptions options;
  bool no_timing = false;
};

int cmd_verify(const VerifyArgs& a) {
  if (!(a.options.tol > 0.0)) throw gpt::InputError("--tol must be positive");
  const auto reports = gpt::suites::run(a.suite, a.options);
  bool pass = true;
  for (const auto& r : reports) pass = pass && r.pass;
  if (a.suite == "all") {
    json all = json::array();
    for (const auto& r : reports) all.push_back(gpt::suites::report_json(r, !a.no_timing));
    print(json{{"suite", "all"}, {"pass", pass}, {"suites", std::move(all)}});
  } else {
    print(gpt::suites::report_json(reports.front(), !a.no_timing));
  }
  return pass ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropies of general probabilistic theories"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "evaluate one entropy at one state");
  c->add_option("--model", compute.model, "classical, squared or qubit")->required();
  c->add_option("--state", compute.state, "comma-separated coordinates")->required();
  c->add_option("--entropy", compute.entropy, "S1, S2, S3, H, Sq or closed:<name>, with primes")->required();
  compute.flags.attach(c);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "tabulate entropies on a squared-model grid");
  s->add_option("--model", sweep.model, "squared");
  s->add_option("--grid-step", sweep.step, "grid spacing; must divide 1");
  s->add_option("--entropies", sweep.entropies, "comma-separated entropy names");
  s->add_option("--out", sweep.out, "CSV path (stdout when omitted)");
  sweep.flags.attach(s);

  EnsembleArgs acc;
  auto* ai = app.add_subcommand("accinfo", "accessible information of an ensemble");
  ai->add_option("--ensemble", acc.path, "ensemble JSON file")->required();
  acc.flags.attach(ai);

  EnsembleArgs hol;
  auto* ho = app.add_subcommand("holevo", "generalized Holevo bound report");
  ho->add_option("--ensemble", hol.path, "ensemble JSON file")->required();
  ho->add_option("--entropy", hol.entropy, "base entropy S whose induced S' bounds I_acc");
  hol.flags.attach(ho);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "run a seeded verification suite");
  v->add_option("--suite", ver.suite,
                "squared-chain, squared-holevo, classical-invariance, qubit-invariance, qubit-holevo, "
                "footnote-pure, mixedness, concavity or all")
      ->required();
  v->add_option("--tol", ver.options.tol, "tolerance for the default-accuracy checks");
  v->add_option("--seed", ver.options.seed, "suite seed");
  v->add_option("--budget", ver.options.budget, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  v->add_option("--threads", ver.options.threads, "worker threads");
  v->add_flag("--no-timing", ver.no_timing, "omit wall time so reports are byte-identical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*c) return cmd_compute(compute);
    if (*s) return cmd_sweep(sweep);
    if (*ai) return cmd_accinfo(acc);
    if (*ho) return cmd_holevo(hol);
    if (*v) return cmd_verify(ver);
  } catch (const gpt::io::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const gpt::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const gpt::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
