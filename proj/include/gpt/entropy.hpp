#pragma once

// Entropy functionals of a model: the measurement entropy S1, the
// preparation information S2, the decomposition entropy S3, their induced
// entropies, accessible information and the generalised Holevo bound.
//
// Everything numerical here is a one-sided estimate. Suprema are searched
// from below and infima from above; EvalResult::bound records which.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/info.hpp"
#include "gpt/models.hpp"
#include "gpt/optimize.hpp"

namespace gpt {

/// A base entropy with `depth` inductions applied: (S2, 1) is S2', (S2, 2) is S2''.
struct EntropyFunctional {
  EntropyBase base = EntropyBase::S1;
  int depth = 0;
  /// Registry name, used only when base is ClosedForm.
  std::string closed_name;

  static EntropyFunctional closed(std::string name, int depth = 0) {
    return {EntropyBase::ClosedForm, depth, std::move(name)};
  }

  EntropyFunctional induced() const { return {base, depth + 1, closed_name}; }
  EntropyFunctional inner() const { return {base, depth - 1, closed_name}; }

  /// Prime notation: S2'', H', Sq', closed:squared.s2'.
  std::string name() const {
    std::string n = base == EntropyBase::ClosedForm ? "closed:" + closed_name : to_string(base);
    n.append(static_cast<std::size_t>(std::max(depth, 0)), '\'');
    return n;
  }

  friend bool operator==(const EntropyFunctional&, const EntropyFunctional&) = default;
};

enum class BoundDirection { Exact, Lower, Upper };

inline const char* to_string(BoundDirection b) {
  switch (b) {
    case BoundDirection::Exact: return "exact";
    case BoundDirection::Lower: return "lower";
    case BoundDirection::Upper: return "upper";
  }
  return "?";
}

struct EvalConfig {
  int restarts = 16;
  int iters = 200;
  std::uint64_t seed = 0;
  /// Size bound for decompositions; 0 selects dim + 2.
  int components_k = 0;
  /// Restrict induction to pure-state decompositions.
  bool pure_only = false;
  /// Accuracy target in bits, used for closed-form agreement flags.
  double tol = 5e-3;
  /// Grid used to key memoised inner entropies.
  double cache_quantum = 1e-6;
  /// Worker threads for restarts; 0 reads GPT_ENTROPY_THREADS, else hardware.
  int threads = 0;
  /// Resolve inner entropies from registered closed forms when available.
  bool use_closed_forms = true;
  /// Squared model: take the inner measurement at alpha in {0, 1}.
  bool measurement_shortcut = true;
  /// Outcome cap for the qubit measurement family.
  int max_outcomes = 4;

  void validate() const {
    if (restarts < 1) throw InputError("restarts must be >= 1");
    if (iters < 1) throw InputError("iters must be >= 1");
    if (components_k < 0) throw InputError("components_k must be >= 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (!(cache_quantum > 0.0)) throw InputError("cache_quantum must be positive");
    if (max_outcomes < 2 || max_outcomes > 4) throw InputError("max_outcomes must be 2, 3 or 4");
  }

  int components(const Model& model) const {
    return components_k > 0 ? components_k : static_cast<int>(model.dim()) + 2;
  }

  static EvalConfig quick() { return EvalConfig{}; }
  static EvalConfig full() {
    EvalConfig c;
    c.restarts = 64;
    c.iters = 1000;
    return c;
  }
};

/// Threads to use when the config asks for automatic selection.
inline int default_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GPT_ENTROPY_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n > 0 ? n : cap, cap);
  }
  return std::max(n, 1);
}

struct Certificate {
  std::optional<Ensemble> ensemble;
  std::optional<Measurement> measurement;
  /// Measurement-family coordinates of `measurement`, when it was searched.
  std::vector<double> fg_param;
  /// Decomposition chart coordinates of `ensemble`, when it was searched.
  std::vector<double> code;
  /// Inner entropy of each ensemble member (induction only).
  std::vector<double> inner_values;
};

struct EvalBudget {
  long evals = 0;
  int restarts = 0;
  int iters = 0;
};

struct EvalResult {
  double value = 0.0;
  BoundDirection bound = BoundDirection::Exact;
  Certificate certificate;
  EvalBudget budget;
  /// "numerical", "exact" or "closed-form".
  std::string method;
  /// Registered closed form of the same functional, for cross-checks.
  std::optional<double> reference;
  std::string reference_name;
};

struct HolevoReport {
  double accessible = 0.0;
  double induced_at_mix = 0.0;
  double average_inner = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  std::string induced_name;
  bool induced_closed = false;
  bool average_closed = false;
  /// False only when the accessible information beats a closed-form bound.
  bool gap_ok = true;
  std::string note;
  EvalResult accessible_result;
};

/// Memoised inner entropies and warm starts, shareable between evaluators
/// and threads.
class EvalCache {
 public:
  using Key = std::tuple<int, int, std::string, std::vector<long long>, std::string>;

  std::optional<double> value(const Key& k) const {
    std::shared_lock lock(mutex_);
    auto it = values_.find(k);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  void store_value(const Key& k, double v) {
    std::unique_lock lock(mutex_);
    values_.emplace(k, v);
  }

  std::optional<std::vector<double>> warm_start(const Key& k) const {
    std::shared_lock lock(mutex_);
    auto it = warm_.find(k);
    if (it == warm_.end()) return std::nullopt;
    return it->second;
  }
  void store_warm_start(const Key& k, std::vector<double> code) {
    std::unique_lock lock(mutex_);
    warm_[k] = std::move(code);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return values_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<Key, double> values_;
  std::map<Key, std::vector<double>> warm_;
};

namespace detail {

// Joint law of an ensemble read out by a measurement known to be valid.
inline JointDistribution joint_unchecked(const Ensemble& ens, const Measurement& m) {
  JointDistribution j(ens.size(), m.outcomes());
  thread_local std::vector<double> probs;
  for (std::size_t x = 0; x < ens.size(); ++x) {
    probs_unchecked(m, ens.states[x].coords, probs);
    for (std::size_t y = 0; y < probs.size(); ++y) j(x, y) = ens.weights[x] * probs[y];
  }
  return j;
}

inline double information(const Ensemble& ens, const Measurement& m) {
  return mutual_information_unchecked(joint_unchecked(ens, m));
}

inline double readout_entropy(const Measurement& m, const State& s) {
  thread_local std::vector<double> probs;
  probs_unchecked(m, s.coords, probs);
  return entropy_bits(probs);
}

}  // namespace detail

/// Evaluates entropy functionals on one model under one configuration.
class Evaluator {
 public:
  Evaluator(Model model, EvalConfig cfg, std::shared_ptr<EvalCache> cache = std::make_shared<EvalCache>())
      : model_(model), cfg_(std::move(cfg)), cache_(std::move(cache)), family_(model, cfg_.max_outcomes) {
    cfg_.validate();
  }

  const Model& model() const { return model_; }
  const EvalConfig& config() const { return cfg_; }
  const std::shared_ptr<EvalCache>& cache() const { return cache_; }

  /// S1: least outcome entropy over fine-grained measurements.
  EvalResult s1(const State& s) const {
    require_valid_state(model_, s);
    const auto f = [&](std::span<const double> v) {
      const auto m = family_.decode(v);
      if (!m) return infeasible_value(Sense::Minimize);
      return detail::readout_entropy(*m, s);
    };
    SearchOptions opts;
    opts.sampler = [&](Rng& rng, int r) { return family_.sample(rng, r); };
    const auto o = local_search(f, family_.box(), Sense::Minimize, budget(), opts);
    EvalResult res = start_result(EntropyFunctional{EntropyBase::S1, 0, {}}, s);
    res.value = o.best_value;
    res.bound = model_.kind() == ModelKind::Classical ? BoundDirection::Exact : BoundDirection::Upper;
    res.budget.evals = o.evals;
    res.certificate.measurement = family_.decode(o.best_point);
    res.certificate.fg_param = o.best_point;
    return res;
  }

  /// S2: largest mutual information over pure decompositions and
  /// fine-grained measurements, searched jointly.
  EvalResult s2(const State& s) const {
    require_valid_state(model_, s);
    const EntropyFunctional f{EntropyBase::S2, 0, {}};
    auto search = measurement_search(true, Sense::Maximize);
    add_warm_start(f, s, search);
    const auto o = optimize_decomposition(
        model_, s, [&](const Ensemble& ens, std::span<const double> extra) { return best_information(ens, extra).first; },
        search, budget());
    EvalResult res = finish_decomposition(f, s, o, BoundDirection::Lower);
    if (model_.kind() == ModelKind::Classical) res.bound = BoundDirection::Exact;
    return res;
  }

  /// S3: least mixing entropy over pure decompositions.
  EvalResult s3(const State& s) const {
    require_valid_state(model_, s);
    const EntropyFunctional f{EntropyBase::S3, 0, {}};
    DecompositionSearch search;
    search.components = cfg_.components(model_);
    search.pure_only = true;
    search.sense = Sense::Minimize;
    add_warm_start(f, s, search);
    const auto o = optimize_decomposition(
        model_, s, [](const Ensemble& ens, std::span<const double>) { return detail::entropy_bits(ens.weights); },
        search, budget());
    EvalResult res = finish_decomposition(f, s, o, BoundDirection::Upper, false);
    if (model_.kind() == ModelKind::Classical) res.bound = BoundDirection::Exact;
    return res;
  }

  /// One induction of `inner` at s: the supremum over decompositions of
  /// [sup_M I(X:Y) + sum_x p_x inner(s_x)].
  EvalResult induce_once(const EntropyFunctional& inner, const State& s) const {
    require_valid_state(model_, s);
    require_resolvable(inner);
    const EntropyFunctional f = inner.induced();
    auto search = measurement_search(cfg_.pure_only, Sense::Maximize);
    add_warm_start(f, s, search);
    if (model_.kind() == ModelKind::Squared && !cfg_.pure_only) {
      const auto mid = search.extra_box.midpoint();
      for (const auto& ens : squared_edge_decompositions(s)) {
        auto code = encode_decomposition(model_, s, ens, search.components).values;
        code.insert(code.end(), mid.begin(), mid.end());
        search.seeds.push_back(std::move(code));
      }
    }
    const auto objective = [&](const Ensemble& ens, std::span<const double> extra) {
      double v = best_information(ens, extra).first;
      for (std::size_t x = 0; x < ens.size(); ++x) v += ens.weights[x] * inner_value(inner, ens.states[x]);
      return v;
    };
    const auto o = optimize_decomposition(model_, s, objective, search, budget());
    EvalResult res = finish_decomposition(f, s, o, BoundDirection::Lower);
    if (o.feasible) {
      for (const auto& member : o.ensemble.states) res.certificate.inner_values.push_back(inner_value(inner, member));
    }
    return res;
  }

  /// Dispatch over base and depth; depth n applies induce_once to depth n-1.
  EvalResult evaluate(const EntropyFunctional& f, const State& s) const {
    require_valid_state(model_, s);
    require_resolvable(f);
    if (f.depth < 0) throw InputError("induction depth must be >= 0");
    if (f.depth > 0) return induce_once(f.inner(), s);
    switch (f.base) {
      case EntropyBase::S1: return s1(s);
      case EntropyBase::S2: return s2(s);
      case EntropyBase::S3: return s3(s);
      case EntropyBase::Shannon:
      case EntropyBase::VonNeumann:
      case EntropyBase::ClosedForm: {
        EvalResult res = start_result(f, s);
        res.value = closed_value(f, s);
        res.method = f.base == EntropyBase::ClosedForm ? "closed-form" : "exact";
        return res;
      }
    }
    throw InputError("unknown entropy base");
  }

  /// Largest mutual information between message and outcome over the
  /// fine-grained family.
  EvalResult accessible_information(const Ensemble& ens) const {
    if (!validate_ensemble(model_, ens)) throw InputError("invalid ensemble for " + model_.name());
    const auto f = [&](std::span<const double> v) {
      const auto m = family_.decode(v);
      if (!m) return infeasible_value(Sense::Maximize);
      return detail::information(ens, *m);
    };
    SearchOptions opts;
    opts.sampler = [&](Rng& rng, int r) { return family_.sample(rng, r); };
    const auto o = local_search(f, family_.box(), Sense::Maximize, budget(), opts);
    EvalResult res;
    res.value = o.best_value;
    res.method = "numerical";
    res.bound = model_.kind() == ModelKind::Classical ? BoundDirection::Exact : BoundDirection::Lower;
    res.budget = {o.evals, cfg_.restarts, cfg_.iters};
    res.certificate.ensemble = ens;
    res.certificate.measurement = family_.decode(o.best_point);
    res.certificate.fg_param = o.best_point;
    if (model_.kind() == ModelKind::Squared) {
      res.reference = squared_accinfo_closed(ens);
      res.reference_name = "squared.accinfo";
    }
    return res;
  }

  /// I_acc against S'(mix) - sum_x p_x S(s_x) for the given base entropy.
  HolevoReport holevo_report(const Ensemble& ens, const EntropyFunctional& base) const {
    require_resolvable(base);
    const State rho = mix(model_, ens);
    HolevoReport rep;
    rep.accessible_result = accessible_information(ens);
    rep.accessible = rep.accessible_result.value;

    const EntropyFunctional induced = base.induced();
    rep.induced_name = induced.name();
    if (auto cf = closed_for(induced)) {
      rep.induced_at_mix = cf->value(rho);
      rep.induced_closed = true;
    } else {
      rep.induced_at_mix = evaluate(induced, rho).value;
    }
    rep.average_closed = static_cast<bool>(closed_for(base)) || (base.depth == 0 && is_direct(base.base));
    for (std::size_t x = 0; x < ens.size(); ++x) {
      rep.average_inner += ens.weights[x] * inner_value(base, ens.states[x]);
    }
    rep.bound = rep.induced_at_mix - rep.average_inner;
    rep.gap = rep.bound - rep.accessible;
    if (rep.induced_closed && rep.average_closed) {
      rep.gap_ok = rep.gap >= -1e-9;
      rep.note = rep.gap_ok ? "closed-form bound holds" : "closed-form bound violated";
    } else {
      rep.note = "numerical bound: a negative gap indicates optimizer shortfall, not a violation";
    }
    return rep;
  }

  /// Re-evaluates the objective stored in a certificate.
  double certificate_objective(const EntropyFunctional& f, const State& s, const EvalResult& res) const {
    const auto& c = res.certificate;
    if (f.depth == 0) {
      switch (f.base) {
        case EntropyBase::S1: return shannon_entropy(measurement_probs(model_, *c.measurement, s));
        case EntropyBase::S2: return mutual_information(joint_distribution(model_, *c.ensemble, *c.measurement));
        case EntropyBase::S3: return shannon_entropy(c.ensemble->weights);
        default: return closed_value(f, s);
      }
    }
    const Ensemble& ens = *c.ensemble;
    double v = mutual_information(joint_distribution(model_, ens, *c.measurement));
    for (std::size_t x = 0; x < ens.size(); ++x) v += ens.weights[x] * inner_value(f.inner(), ens.states[x]);
    return v;
  }

  /// Inner entropy of a decomposition member: registered closed form, else
  /// memoised value at the quantised state, else a fresh numerical
  /// evaluation at a quarter of the iteration budget.
  double inner_value(const EntropyFunctional& f, const State& s) const {
    if (f.depth == 0 && is_direct(f.base)) return closed_value(f, s);
    if (auto cf = closed_for(f)) return cf->value(s);

    auto key_state = quantize(s);
    EvalCache::Key key{static_cast<int>(f.base), f.depth, f.closed_name, key_state.first, fingerprint()};
    if (auto v = cache_->value(key)) return *v;

    EvalConfig sub = cfg_;
    sub.iters = std::max(1, cfg_.iters / 4);
    sub.threads = 1;
    Evaluator nested(model_, sub, cache_);
    const double v = nested.evaluate(f, key_state.second).value;
    cache_->store_value(key, v);
    return v;
  }

 private:
  static bool is_direct(EntropyBase b) {
    return b == EntropyBase::Shannon || b == EntropyBase::VonNeumann || b == EntropyBase::ClosedForm;
  }

  SearchBudget budget() const {
    return {cfg_.restarts, cfg_.iters, cfg_.seed, cfg_.threads > 0 ? cfg_.threads : default_threads()};
  }

  void require_resolvable(const EntropyFunctional& f) const {
    switch (f.base) {
      case EntropyBase::Shannon:
        if (model_.kind() != ModelKind::Classical) throw InputError("Shannon entropy needs the classical model");
        break;
      case EntropyBase::VonNeumann:
        if (model_.kind() != ModelKind::Qubit) throw InputError("von Neumann entropy needs the qubit model");
        break;
      case EntropyBase::ClosedForm: {
        const auto cf = closed_form_by_name(f.closed_name);
        if (!cf || cf->model != model_.kind()) {
          throw InputError("closed form '" + f.closed_name + "' is not registered for " + model_.name());
        }
        break;
      }
      default: break;
    }
  }

  std::optional<ClosedForm> closed_for(const EntropyFunctional& f) const {
    if (f.base == EntropyBase::ClosedForm) return f.depth == 0 ? closed_form_by_name(f.closed_name) : std::nullopt;
    if (!cfg_.use_closed_forms && !is_direct(f.base)) return std::nullopt;
    return find_closed_form(model_, f.base, f.depth);
  }

  // Depth-0 value of a directly computable entropy.
  double closed_value(const EntropyFunctional& f, const State& s) const {
    switch (f.base) {
      case EntropyBase::Shannon: return shannon_entropy(s.coords);
      case EntropyBase::VonNeumann: return qubit_vn_entropy(s);
      case EntropyBase::ClosedForm: return closed_form_by_name(f.closed_name)->value(s);
      default: break;
    }
    throw InputError("no direct value for " + f.name());
  }

  EvalResult start_result(const EntropyFunctional& f, const State& s) const {
    EvalResult res;
    res.method = "numerical";
    res.budget.restarts = cfg_.restarts;
    res.budget.iters = cfg_.iters;
    if (auto cf = find_closed_form(model_, f.base, f.depth); cf && !is_direct(f.base)) {
      res.reference_name = cf->name;
      res.reference = cf->value(s);
    }
    return res;
  }

  std::pair<std::vector<long long>, State> quantize(const State& s) const {
    std::vector<long long> key;
    State q(std::vector<double>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      key.push_back(std::llround(s.coords[i] / cfg_.cache_quantum));
      q.coords[i] = static_cast<double>(key.back()) * cfg_.cache_quantum;
    }
    auto projected = detail::project_near(model_, q, 10.0 * cfg_.cache_quantum * static_cast<double>(s.size()));
    return {std::move(key), projected ? *projected : s};
  }

  std::string fingerprint() const {
    return std::to_string(cfg_.restarts) + "/" + std::to_string(cfg_.iters) + "/" + std::to_string(cfg_.seed) + "/" +
           std::to_string(cfg_.components(model_)) + "/" + (cfg_.pure_only ? "p" : "d") + "/" +
           (cfg_.use_closed_forms ? "c" : "n");
  }

  EvalCache::Key warm_key(const EntropyFunctional& f, const State& s) const {
    return {static_cast<int>(f.base), f.depth, f.closed_name, quantize(s).first,
            std::to_string(cfg_.components(model_)) + (cfg_.pure_only ? "p" : "d")};
  }

  void add_warm_start(const EntropyFunctional& f, const State& s, DecompositionSearch& search) const {
    if (auto code = cache_->warm_start(warm_key(f, s))) search.seeds.push_back(*code);
  }

  // Decomposition search whose extra block is the measurement family, or
  // empty when the measurement is fixed or taken from the squared extremes.
  DecompositionSearch measurement_search(bool pure_only, Sense sense) const {
    DecompositionSearch search;
    search.components = cfg_.components(model_);
    search.pure_only = pure_only;
    search.sense = sense;
    if (model_.kind() == ModelKind::Qubit ||
        (model_.kind() == ModelKind::Squared && !cfg_.measurement_shortcut)) {
      search.extra_box = family_.box();
      search.extra_sampler = [this](Rng& rng, int r) { return family_.sample(rng, r); };
    }
    return search;
  }

  bool shortcut() const { return model_.kind() == ModelKind::Squared && cfg_.measurement_shortcut; }

  // Mutual information of an ensemble under the measurement chosen by the
  // extra coordinates, with the index of the squared extreme used (if any).
  std::pair<double, int> best_information(const Ensemble& ens, std::span<const double> extra) const {
    if (shortcut()) {
      const auto& ms = squared_extreme_measurements();
      const double first = detail::information(ens, ms[0]);
      const double second = detail::information(ens, ms[1]);
      return second > first ? std::pair{second, 1} : std::pair{first, 0};
    }
    const auto m = family_.decode(extra);
    if (!m) return {-std::numeric_limits<double>::infinity(), -1};
    return {detail::information(ens, *m), -1};
  }

  EvalResult finish_decomposition(const EntropyFunctional& f, const State& s, const DecompositionOutcome& o,
                                  BoundDirection bound, bool with_measurement = true) const {
    EvalResult res = start_result(f, s);
    res.value = o.value;
    res.bound = bound;
    res.budget.evals = o.evals;
    if (!o.feasible) return res;
    res.certificate.ensemble = o.ensemble;
    res.certificate.code = o.code.values;
    if (with_measurement && shortcut()) {
      const int which = best_information(o.ensemble, {}).second;
      res.certificate.measurement = squared_extreme_measurements()[static_cast<std::size_t>(which)];
      res.certificate.fg_param = {which == 0 ? 1.0 : 0.0};
    } else if (with_measurement) {
      res.certificate.measurement = family_.decode(o.extra);
      res.certificate.fg_param = o.extra;
    }
    std::vector<double> full = o.code.values;
    full.insert(full.end(), o.extra.begin(), o.extra.end());
    cache_->store_warm_start(warm_key(f, s), std::move(full));
    return res;
  }

  Model model_;
  EvalConfig cfg_;
  std::shared_ptr<EvalCache> cache_;
  MeasurementFamily family_;
};

// Free-function entry points, each on a fresh cache.

inline EvalResult eval_s1(const Model& model, const State& s, const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).s1(s);
}
inline EvalResult eval_s2(const Model& model, const State& s, const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).s2(s);
}
inline EvalResult eval_s3(const Model& model, const State& s, const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).s3(s);
}
inline EvalResult induce_once(const EntropyFunctional& inner, const Model& model, const State& s,
                              const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).induce_once(inner, s);
}
inline EvalResult evaluate(const EntropyFunctional& f, const Model& model, const State& s, const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).evaluate(f, s);
}
inline EvalResult accessible_information(const Model& model, const Ensemble& ens, const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).accessible_information(ens);
}
inline HolevoReport holevo_report(const Model& model, const Ensemble& ens, const EntropyFunctional& base,
                                  const EvalConfig& cfg = {}) {
  return Evaluator(model, cfg).holevo_report(ens, base);
}

}  // namespace gpt
