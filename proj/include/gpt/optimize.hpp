#pragma once

// Multi-start compass (coordinate pattern) search over boxes, plus the
// charts that turn decompositions of a fixed state into box coordinates.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "gpt/core.hpp"

namespace gpt {

enum class Sense { Minimize, Maximize };

/// Value the objective reports for points that decode to nothing.
inline double infeasible_value(Sense sense) {
  return sense == Sense::Maximize ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::infinity();
}

inline bool improves(Sense sense, double candidate, double incumbent) {
  if (!std::isfinite(candidate)) return false;
  if (!std::isfinite(incumbent)) return true;
  return sense == Sense::Maximize ? candidate > incumbent : candidate < incumbent;
}

struct Box {
  std::vector<double> lower, upper;

  Box() = default;
  Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {}

  std::size_t size() const { return lower.size(); }
  double width(std::size_t i) const { return upper[i] - lower[i]; }

  bool empty() const {
    if (lower.size() != upper.size()) return true;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(lower[i] <= upper[i])) return true;
    }
    return false;
  }
  bool contains(std::span<const double> x) const {
    if (x.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i) {
      if (x[i] < lower[i] || x[i] > upper[i]) return false;
    }
    return true;
  }
  std::vector<double> midpoint() const {
    std::vector<double> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
    return m;
  }

  /// Concatenation: this box's coordinates first.
  Box operator+(const Box& other) const {
    Box out = *this;
    out.lower.insert(out.lower.end(), other.lower.begin(), other.lower.end());
    out.upper.insert(out.upper.end(), other.upper.begin(), other.upper.end());
    return out;
  }
};

/// 64-bit Mersenne twister with a platform-independent mapping to [0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<double> uniform_point(const Box& box, Rng& rng) {
  std::vector<double> x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) x[i] = rng.uniform(box.lower[i], box.upper[i]);
  return x;
}

using Objective = std::function<double(std::span<const double>)>;
/// Draws a start point for a given restart index.
using StartSampler = std::function<std::vector<double>(Rng&, int restart)>;

struct SearchBudget {
  int restarts = 16;
  int iters = 200;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SearchOptions {
  /// Candidate points evaluated before the restarts; restart 0 starts from the best of them.
  std::vector<std::vector<double>> seeds;
  StartSampler sampler;
};

struct OptimOutcome {
  std::vector<double> best_point;
  double best_value = 0.0;
  long evals = 0;
  bool feasible = false;
  /// Restart that produced the optimum, -1 when a seed was never improved on.
  int best_restart = -1;
};

inline constexpr double kMinStep = 1e-9;
inline constexpr int kMaxStartDraws = 1000;

namespace detail {

struct RestartResult {
  std::vector<double> point;
  double value;
  long evals = 0;
};

inline RestartResult compass_search(const Objective& f, const Box& box, Sense sense, std::vector<double> x,
                                    double fx, int iters) {
  RestartResult r{std::move(x), fx, 0};
  if (!std::isfinite(r.value)) return r;
  std::vector<double> step(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) step[i] = 0.25 * box.width(i);

  for (int it = 0; it < iters; ++it) {
    double largest = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i) largest = std::max(largest, step[i]);
    if (largest < kMinStep) break;

    bool moved = false;
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (step[i] < kMinStep) continue;
      const double here = r.point[i];
      for (double dir : {1.0, -1.0}) {
        const double trial = std::clamp(here + dir * step[i], box.lower[i], box.upper[i]);
        if (trial == here) continue;
        r.point[i] = trial;
        const double ft = f(r.point);
        ++r.evals;
        if (improves(sense, ft, r.value)) {
          r.value = ft;
          moved = true;
          break;
        }
        r.point[i] = here;
      }
    }
    if (!moved) {
      for (double& s : step) s *= 0.5;
    }
  }
  return r;
}

inline int resolve_threads(int requested, int jobs) {
  return std::max(1, std::min(requested, jobs));
}

}  // namespace detail

/// Multi-start compass search. Restart r draws its start from an RNG seeded
/// with seed + r; restart 0 instead starts from the best seed when seeds are
/// given. The best value wins, lowest restart index on ties, so the outcome
/// does not depend on the thread count.
inline OptimOutcome local_search(const Objective& f, const Box& box, Sense sense, const SearchBudget& budget,
                                 const SearchOptions& options = {}) {
  if (box.empty()) throw InputError("local_search: empty box");
  if (budget.restarts < 1 || budget.iters < 1) throw InputError("local_search: restarts and iters must be >= 1");

  OptimOutcome out;
  out.best_value = infeasible_value(sense);

  std::vector<double> warm;
  double warm_value = infeasible_value(sense);
  bool has_warm = false;
  for (const auto& seed : options.seeds) {
    if (!box.contains(seed)) continue;
    const double v = f(seed);
    ++out.evals;
    if (improves(sense, v, warm_value)) {
      warm = seed;
      warm_value = v;
      has_warm = true;
    }
  }

  std::vector<detail::RestartResult> results(static_cast<std::size_t>(budget.restarts));
  auto run = [&](int r) {
    Rng rng(budget.seed + static_cast<std::uint64_t>(r));
    detail::RestartResult res;
    std::vector<double> start;
    double fs = infeasible_value(sense);
    long draws = 0;
    if (r == 0 && has_warm) {
      start = warm;
      fs = warm_value;
    } else {
      for (int attempt = 0; attempt < kMaxStartDraws; ++attempt) {
        start = options.sampler ? options.sampler(rng, r) : uniform_point(box, rng);
        for (std::size_t i = 0; i < box.size(); ++i) start[i] = std::clamp(start[i], box.lower[i], box.upper[i]);
        fs = f(start);
        ++draws;
        if (std::isfinite(fs)) break;
      }
    }
    res = detail::compass_search(f, box, sense, std::move(start), fs, budget.iters);
    res.evals += draws;
    results[static_cast<std::size_t>(r)] = std::move(res);
  };

  const int threads = detail::resolve_threads(budget.threads, budget.restarts);
  if (threads == 1) {
    for (int r = 0; r < budget.restarts; ++r) run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < budget.restarts; r = next++) run(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (int r = 0; r < budget.restarts; ++r) {
    auto& res = results[static_cast<std::size_t>(r)];
    out.evals += res.evals;
    if (improves(sense, res.value, out.best_value)) {
      out.best_value = res.value;
      out.best_point = res.point;
      out.best_restart = r;
    }
  }
  if (has_warm && improves(sense, warm_value, out.best_value)) {
    out.best_value = warm_value;
    out.best_point = warm;
    out.best_restart = -1;
  }
  out.feasible = std::isfinite(out.best_value);
  if (!out.feasible) out.best_point = box.midpoint();
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition charts

/// Box coordinates of a decomposition of a fixed state into at most
/// `components` members.
///
/// Mixed chart (arbitrary member states): k-1 stick-breaking weights followed
/// by k-1 free member states in state-chart coordinates; member k is solved
/// from the barycentre constraint s_k = (s - sum_{x<k} p_x s_x) / p_k.
///
/// Pure charts: classical has no freedom (the vertex weights are the state);
/// squared uses one coordinate u in [0,1] for the weight t = p(1,1) over its
/// feasible interval; qubit uses k-2 stick-breaking weights and k-1 unit
/// directions (z, phi), with the overall weight of the free members and the
/// last direction solved so that every member lies on the sphere.
struct DecompositionCode {
  int components = 1;
  std::vector<double> values;
};

inline constexpr double kDropWeight = 1e-9;

namespace detail {

inline std::size_t state_chart_dim(const Model& model) {
  return model.kind() == ModelKind::Classical ? model.dim() - 1 : model.dim();
}

inline Box state_chart_box(const Model& model) {
  const std::size_t n = state_chart_dim(model);
  if (model.kind() == ModelKind::Qubit) return Box(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0));
  return Box(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
}

inline std::vector<double> state_to_chart(const Model& model, const State& s) {
  return {s.coords.begin(), s.coords.begin() + static_cast<std::ptrdiff_t>(state_chart_dim(model))};
}

inline std::optional<State> chart_to_state(const Model& model, std::span<const double> c) {
  State s(std::vector<double>(c.begin(), c.end()));
  if (model.kind() == ModelKind::Classical) {
    double rest = 1.0;
    for (double x : c) rest -= x;
    if (rest < -kMembershipTol) return std::nullopt;
    s.coords.push_back(std::max(rest, 0.0));
  }
  if (!validate_state(model, s)) return std::nullopt;
  return s;
}

// Pulls a point that misses the state space by at most `slack` back onto it.
inline std::optional<State> project_near(const Model& model, State s, double slack) {
  switch (model.kind()) {
    case ModelKind::Classical: {
      double sum = 0.0;
      for (double& x : s.coords) {
        if (x < -slack) return std::nullopt;
        x = std::max(x, 0.0);
        sum += x;
      }
      if (std::abs(sum - 1.0) > slack) return std::nullopt;
      for (double& x : s.coords) x /= sum;
      break;
    }
    case ModelKind::Squared:
      for (double& x : s.coords) {
        if (x < -slack || x > 1.0 + slack) return std::nullopt;
        x = std::clamp(x, 0.0, 1.0);
      }
      break;
    case ModelKind::Qubit: {
      const double r = norm(s.coords);
      if (r > 1.0 + slack) return std::nullopt;
      if (r > 1.0)
        for (double& x : s.coords) x /= r;
      break;
    }
  }
  return s;
}

inline std::array<double, 3> direction(double z, double phi) {
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

// Stick-breaking: n-1 parameters in [0,1] to n weights summing to one.
inline std::vector<double> stick_breaking(std::span<const double> v) {
  std::vector<double> w(v.size() + 1);
  double rest = 1.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    w[j] = rest * v[j];
    rest -= w[j];
  }
  w[v.size()] = std::max(rest, 0.0);
  return w;
}

// Drops members below kDropWeight and renormalises.
inline Ensemble prune(Ensemble ens) {
  Ensemble out;
  out.pure_only = ens.pure_only;
  double total = 0.0;
  for (std::size_t x = 0; x < ens.size(); ++x) {
    if (ens.weights[x] >= kDropWeight) {
      out.weights.push_back(ens.weights[x]);
      out.states.push_back(std::move(ens.states[x]));
      total += ens.weights[x];
    }
  }
  for (double& w : out.weights) w /= total;
  return out;
}

// Smallest root in [0, 1] of |s - lambda m| = 1 - lambda.
inline std::optional<double> solve_chord_scale(std::span<const double> s, std::span<const double> m) {
  double mm = 0.0, sm = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    mm += m[i] * m[i];
    sm += s[i] * m[i];
    ss += s[i] * s[i];
  }
  const double a = mm - 1.0, b = 2.0 * (1.0 - sm), c = ss - 1.0;
  std::vector<double> roots;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) < 1e-14) return std::nullopt;
    roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) roots.push_back(c / q);
    roots.push_back(q / a);
  }
  std::optional<double> best;
  for (double r : roots) {
    if (r >= -1e-12 && r <= 1.0 + 1e-12 && (!best || r < *best)) best = std::clamp(r, 0.0, 1.0);
  }
  return best;
}

inline std::size_t pure_chart_dim(const Model& model, int k) {
  switch (model.kind()) {
    case ModelKind::Classical: return 0;
    case ModelKind::Squared: return 1;
    case ModelKind::Qubit: return k <= 1 ? 0 : static_cast<std::size_t>(k - 2) + 2 * static_cast<std::size_t>(k - 1);
  }
  return 0;
}

inline std::optional<Ensemble> limit_members(Ensemble ens, int k) {
  ens = prune(std::move(ens));
  if (ens.size() == 0 || static_cast<int>(ens.size()) > k) return std::nullopt;
  return ens;
}

inline std::optional<Ensemble> decode_pure(const Model& model, const State& s, std::span<const double> code, int k) {
  Ensemble ens;
  ens.pure_only = true;
  switch (model.kind()) {
    case ModelKind::Classical: {
      const auto corners = vertices(model);
      for (std::size_t i = 0; i < model.dim(); ++i) {
        ens.weights.push_back(std::max(s.coords[i], 0.0));
        ens.states.push_back(corners[i]);
      }
      return limit_members(std::move(ens), k);
    }
    case ModelKind::Squared: {
      const double c1 = s[0], c2 = s[1];
      const double lo = std::max(0.0, c1 + c2 - 1.0), hi = std::min(c1, c2);
      const double t = lo + code[0] * (hi - lo);
      ens.weights = {std::max(1.0 - c1 - c2 + t, 0.0), std::max(c2 - t, 0.0), std::max(c1 - t, 0.0), std::max(t, 0.0)};
      ens.states = vertices(model);
      double total = 0.0;
      for (double w : ens.weights) total += w;
      for (double& w : ens.weights) w /= total;
      return limit_members(std::move(ens), k);
    }
    case ModelKind::Qubit: {
      if (k <= 1 || is_pure(model, s)) {
        if (!is_pure(model, s)) return std::nullopt;
        ens.weights = {1.0};
        ens.states = {s};
        return ens;
      }
      const std::size_t free = static_cast<std::size_t>(k - 1);
      const auto q = stick_breaking(code.subspan(0, free - 1));
      std::vector<std::array<double, 3>> dirs;
      std::array<double, 3> m{0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < free; ++j) {
        dirs.push_back(direction(code[free - 1 + 2 * j], code[free - 1 + 2 * j + 1]));
        for (int i = 0; i < 3; ++i) m[i] += q[j] * dirs[j][i];
      }
      const auto lambda = solve_chord_scale(s.coords, m);
      if (!lambda) return std::nullopt;
      for (std::size_t j = 0; j < free; ++j) {
        ens.weights.push_back(*lambda * q[j]);
        ens.states.push_back(State{dirs[j][0], dirs[j][1], dirs[j][2]});
      }
      const double last = 1.0 - *lambda;
      if (last >= kDropWeight) {
        State u(std::vector<double>(3));
        for (int i = 0; i < 3; ++i) u.coords[i] = (s.coords[i] - *lambda * m[i]) / last;
        const double n = norm(u.coords);
        if (std::abs(n - 1.0) > 1e-6) return std::nullopt;
        for (double& x : u.coords) x /= n;
        ens.weights.push_back(last);
        ens.states.push_back(std::move(u));
      } else {
        // Free members must already reproduce s on their own.
        double miss = 0.0;
        for (int i = 0; i < 3; ++i) miss = std::max(miss, std::abs(s.coords[i] - *lambda * m[i]));
        if (miss > kNormalizationTol) return std::nullopt;
      }
      return limit_members(std::move(ens), k);
    }
  }
  return std::nullopt;
}

inline std::optional<Ensemble> decode_mixed(const Model& model, const State& s, std::span<const double> code, int k) {
  const std::size_t free = static_cast<std::size_t>(k - 1);
  const std::size_t cd = state_chart_dim(model);
  const auto w = stick_breaking(code.subspan(0, free));
  Ensemble ens;
  std::vector<double> rest(s.coords);
  for (std::size_t j = 0; j < free; ++j) {
    auto member = chart_to_state(model, code.subspan(free + j * cd, cd));
    if (!member) return std::nullopt;
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= w[j] * member->coords[i];
    ens.weights.push_back(w[j]);
    ens.states.push_back(std::move(*member));
  }
  const double last = w[free];
  if (last >= kDropWeight) {
    State solved(std::vector<double>(rest.size()));
    for (std::size_t i = 0; i < rest.size(); ++i) solved.coords[i] = rest[i] / last;
    auto projected = project_near(model, std::move(solved), kNormalizationTol);
    if (!projected) return std::nullopt;
    ens.weights.push_back(last);
    ens.states.push_back(std::move(*projected));
  } else {
    for (double r : rest) {
      if (std::abs(r) > kNormalizationTol) return std::nullopt;
    }
  }
  return prune(std::move(ens));
}

}  // namespace detail

/// Number of box coordinates of a decomposition code.
inline std::size_t decomposition_code_size(const Model& model, int components, bool pure_only) {
  if (components < 1) throw InputError("decomposition needs at least one component");
  if (pure_only) return detail::pure_chart_dim(model, components);
  const auto free = static_cast<std::size_t>(components - 1);
  return free + free * detail::state_chart_dim(model);
}

inline Box decomposition_box(const Model& model, int components, bool pure_only) {
  const std::size_t n = decomposition_code_size(model, components, pure_only);
  Box box(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0));
  if (pure_only) {
    if (model.kind() == ModelKind::Qubit && components > 1) {
      const auto free = static_cast<std::size_t>(components - 1);
      for (std::size_t j = 0; j < free; ++j) {
        box.lower[free - 1 + 2 * j] = -1.0;
        box.upper[free - 1 + 2 * j + 1] = 2.0 * std::numbers::pi;
      }
    }
    return box;
  }
  const auto free = static_cast<std::size_t>(components - 1);
  const Box chart = detail::state_chart_box(model);
  for (std::size_t j = 0; j < free; ++j) {
    for (std::size_t i = 0; i < chart.size(); ++i) {
      box.lower[free + j * chart.size() + i] = chart.lower[i];
      box.upper[free + j * chart.size() + i] = chart.upper[i];
    }
  }
  return box;
}

/// Decodes a chart point into an ensemble whose barycentre is s. Returns
/// nullopt when the point lies outside the feasible region; members with
/// weight below 1e-9 are dropped.
inline std::optional<Ensemble> decode_decomposition(const Model& model, const State& s, const DecompositionCode& code,
                                                    bool pure_only) {
  detail::require_dim(model, s);
  if (code.values.size() != decomposition_code_size(model, code.components, pure_only)) {
    throw InputError("decomposition code has the wrong length");
  }
  const std::span<const double> values(code.values);
  return pure_only ? detail::decode_pure(model, s, values, code.components)
                   : detail::decode_mixed(model, s, values, code.components);
}

/// Inverse of the mixed chart for an ensemble with at most `components`
/// members. The last member becomes the solved one; unused slots get zero
/// weight and sit at s.
inline DecompositionCode encode_decomposition(const Model& model, const State& s, const Ensemble& ens,
                                              int components) {
  if (ens.size() == 0 || static_cast<int>(ens.size()) > components) {
    throw InputError("ensemble does not fit the requested number of components");
  }
  const auto free = static_cast<std::size_t>(components - 1);
  const std::size_t cd = detail::state_chart_dim(model);
  DecompositionCode code{components, std::vector<double>(free + free * cd, 0.0)};
  const std::size_t m = ens.size();
  double rest = 1.0;
  for (std::size_t j = 0; j < free; ++j) {
    std::vector<double> chart;
    if (j + 1 < m) {
      code.values[j] = rest > 0.0 ? std::clamp(ens.weights[j] / rest, 0.0, 1.0) : 0.0;
      rest -= ens.weights[j];
      chart = detail::state_to_chart(model, ens.states[j]);
    } else {
      chart = detail::state_to_chart(model, s);
    }
    std::copy(chart.begin(), chart.end(), code.values.begin() + static_cast<std::ptrdiff_t>(free + j * cd));
  }
  return code;
}

/// Start sampler for decomposition charts. Restarts cycle through sparse
/// starts: r % 3 == 1 keeps two members, r % 3 == 2 keeps three, otherwise
/// every member is active.
inline std::vector<double> sample_decomposition(const Model& model, int components, bool pure_only, Rng& rng,
                                                int restart) {
  const Box box = decomposition_box(model, components, pure_only);
  auto x = uniform_point(box, rng);
  const int level = restart % 3;
  if (level == 0 || components <= 2) return x;
  const int keep = level == 1 ? 2 : 3;
  if (!pure_only) {
    // Free slots keep-1 .. k-2 get zero weight; slot k is the solved member.
    for (int j = keep - 1; j < components - 1; ++j) x[static_cast<std::size_t>(j)] = 0.0;
  } else if (model.kind() == ModelKind::Qubit) {
    // Stick weights over the k-1 free directions; keep-1 of them stay active.
    const int sticks = components - 2;
    for (int j = keep - 2; j < sticks; ++j) x[static_cast<std::size_t>(j)] = (j == keep - 2) ? 1.0 : 0.0;
  }
  return x;
}

struct DecompositionOutcome {
  double value = 0.0;
  bool feasible = false;
  Ensemble ensemble;
  DecompositionCode code;
  /// Coordinates of the extra (non-decomposition) block of the search.
  std::vector<double> extra;
  long evals = 0;
  int best_restart = -1;
};

/// Objective over a decoded ensemble and the extra search coordinates.
using EnsembleObjective = std::function<double(const Ensemble&, std::span<const double>)>;
using ExtraSampler = std::function<std::vector<double>(Rng&, int restart)>;

struct DecompositionSearch {
  int components = 1;
  bool pure_only = false;
  Sense sense = Sense::Maximize;
  /// Extra coordinates optimised jointly with the decomposition.
  Box extra_box{};
  ExtraSampler extra_sampler{};
  /// Full-length seeds (decomposition code followed by extra coordinates).
  std::vector<std::vector<double>> seeds{};
};

/// Optimises an objective over decompositions of s. The trivial ensemble
/// {(1, s)} is always among the candidates when it is representable, so the
/// result is never worse than that baseline.
inline DecompositionOutcome optimize_decomposition(const Model& model, const State& s, const EnsembleObjective& objective,
                                                   const DecompositionSearch& search, const SearchBudget& budget) {
  require_valid_state(model, s);
  const int k = search.components;
  const Box dbox = decomposition_box(model, k, search.pure_only);
  const Box box = dbox + search.extra_box;
  const std::size_t nd = dbox.size();

  const Objective f = [&](std::span<const double> x) {
    const DecompositionCode code{k, std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nd))};
    const auto ens = decode_decomposition(model, s, code, search.pure_only);
    if (!ens) return infeasible_value(search.sense);
    return objective(*ens, x.subspan(nd));
  };

  SearchOptions opts;
  opts.seeds = search.seeds;
  {
    std::vector<double> trivial;
    if (!search.pure_only) {
      trivial = encode_decomposition(model, s, Ensemble{{1.0}, {s}, false}, k).values;
    } else if (is_pure(model, s)) {
      trivial = dbox.midpoint();
    }
    if (!trivial.empty() || nd == 0) {
      const auto mid = search.extra_box.midpoint();
      trivial.insert(trivial.end(), mid.begin(), mid.end());
      opts.seeds.push_back(std::move(trivial));
    }
  }
  opts.sampler = [&](Rng& rng, int r) {
    auto x = sample_decomposition(model, k, search.pure_only, rng, r);
    auto e = search.extra_sampler ? search.extra_sampler(rng, r) : uniform_point(search.extra_box, rng);
    x.insert(x.end(), e.begin(), e.end());
    return x;
  };

  const OptimOutcome o = local_search(f, box, search.sense, budget, opts);
  DecompositionOutcome out;
  out.evals = o.evals;
  out.feasible = o.feasible;
  out.value = o.best_value;
  out.best_restart = o.best_restart;
  if (o.feasible) {
    out.code = DecompositionCode{k, std::vector<double>(o.best_point.begin(), o.best_point.begin() + static_cast<std::ptrdiff_t>(nd))};
    out.extra.assign(o.best_point.begin() + static_cast<std::ptrdiff_t>(nd), o.best_point.end());
    out.ensemble = *decode_decomposition(model, s, out.code, search.pure_only);
  }
  return out;
}

}  // namespace gpt
