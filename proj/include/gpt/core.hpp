#pragma once

// States, effects, measurements and ensembles of a finite-dimensional
// probabilistic model, independent of which concrete model is in use.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpt {

/// Bad caller input: wrong dimension, out-of-range parameter, malformed data.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value that should be impossible for well-formed objects, such as an
/// effect evaluating outside [0, 1].
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Geometric membership tolerance, shared by every model.
inline constexpr double kMembershipTol = 1e-12;
/// Tolerance for normalisation of measurements and probability readouts.
inline constexpr double kNormalizationTol = 1e-9;
/// Tolerance for |r| = 1 on the Bloch sphere.
inline constexpr double kBlochPurityTol = 1e-9;

enum class ModelKind { Classical, Squared, Qubit };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Classical: return "classical";
    case ModelKind::Squared: return "squared";
    case ModelKind::Qubit: return "qubit";
  }
  return "?";
}

/// A model instance. Classical models carry their alphabet size d; the
/// squared model lives in [0,1]^2 and the qubit in the Bloch ball.
class Model {
 public:
  static Model classical(int d) {
    if (d < 2) throw InputError("classical model needs d >= 2");
    return Model(ModelKind::Classical, d);
  }
  static Model squared() { return Model(ModelKind::Squared, 2); }
  static Model qubit() { return Model(ModelKind::Qubit, 3); }

  ModelKind kind() const { return kind_; }
  /// Length of the coordinate vector of a state.
  std::size_t dim() const { return static_cast<std::size_t>(dim_); }
  std::string name() const { return to_string(kind_); }

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Model(ModelKind kind, int dim) : kind_(kind), dim_(dim) {}
  ModelKind kind_;
  int dim_;
};

struct State {
  std::vector<double> coords;

  State() = default;
  State(std::initializer_list<double> c) : coords(c) {}
  explicit State(std::vector<double> c) : coords(std::move(c)) {}

  std::size_t size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }

  friend bool operator==(const State&, const State&) = default;
};

/// Affine functional s -> offset + gradient . coords(s). For the qubit the
/// pair encodes offset*I + gradient.sigma in the Bloch picture.
struct Effect {
  double offset = 0.0;
  std::vector<double> gradient;

  double raw(std::span<const double> coords) const {
    double v = offset;
    for (std::size_t i = 0; i < gradient.size(); ++i) v += gradient[i] * coords[i];
    return v;
  }
};

struct Measurement {
  std::vector<Effect> effects;
  std::string label;

  std::size_t outcomes() const { return effects.size(); }
};

/// Weighted preparation {p_x, s_x}. pure_only marks a decomposition drawn
/// from the pure-state decompositions rather than arbitrary ones.
struct Ensemble {
  std::vector<double> weights;
  std::vector<State> states;
  bool pure_only = false;

  std::size_t size() const { return weights.size(); }
};

namespace detail {

inline double norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline void require_dim(const Model& model, const State& s) {
  if (s.size() != model.dim()) {
    throw InputError("state has " + std::to_string(s.size()) + " coordinates, " + model.name() +
                     " model expects " + std::to_string(model.dim()));
  }
}

// Pure states of the polytope models; the qubit has a continuum instead.
inline std::vector<State> vertices(const Model& model) {
  std::vector<State> out;
  if (model.kind() == ModelKind::Classical) {
    for (std::size_t i = 0; i < model.dim(); ++i) {
      State v(std::vector<double>(model.dim(), 0.0));
      v.coords[i] = 1.0;
      out.push_back(std::move(v));
    }
  } else if (model.kind() == ModelKind::Squared) {
    out = {State{0.0, 0.0}, State{0.0, 1.0}, State{1.0, 0.0}, State{1.0, 1.0}};
  }
  return out;
}

// Range [min, max] of an effect's raw value over all pure states.
inline std::pair<double, double> effect_range(const Model& model, const Effect& e) {
  if (model.kind() == ModelKind::Qubit) {
    const double g = norm(e.gradient);
    return {e.offset - g, e.offset + g};
  }
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& v : vertices(model)) {
    const double x = e.raw(v.coords);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

inline double clamp_probability(double raw) {
  if (raw < -kNormalizationTol || raw > 1.0 + kNormalizationTol) {
    throw ContractError("effect value " + std::to_string(raw) + " outside [0,1]");
  }
  return std::clamp(raw, 0.0, 1.0);
}

// Hot-path readout for measurements that were validated at construction.
inline void probs_unchecked(const Measurement& m, std::span<const double> coords,
                            std::vector<double>& out) {
  out.resize(m.effects.size());
  for (std::size_t y = 0; y < m.effects.size(); ++y) {
    out[y] = std::clamp(m.effects[y].raw(coords), 0.0, 1.0);
  }
}

}  // namespace detail

/// Membership predicate of the model's state space, tolerance 1e-12.
inline bool validate_state(const Model& model, const State& s) {
  detail::require_dim(model, s);
  for (double x : s.coords) {
    if (!std::isfinite(x)) return false;
  }
  switch (model.kind()) {
    case ModelKind::Classical: {
      double sum = 0.0;
      for (double x : s.coords) {
        if (x < -kMembershipTol) return false;
        sum += x;
      }
      return std::abs(sum - 1.0) <= kMembershipTol;
    }
    case ModelKind::Squared:
      for (double x : s.coords) {
        if (x < -kMembershipTol || x > 1.0 + kMembershipTol) return false;
      }
      return true;
    case ModelKind::Qubit:
      return detail::norm(s.coords) <= 1.0 + kMembershipTol;
  }
  return false;
}

/// Extreme-point predicate. Assumes s already passes validate_state.
inline bool is_pure(const Model& model, const State& s) {
  detail::require_dim(model, s);
  switch (model.kind()) {
    case ModelKind::Classical: {
      int nonzero = 0;
      for (double x : s.coords) nonzero += (x > kMembershipTol) ? 1 : 0;
      return nonzero == 1;
    }
    case ModelKind::Squared:
      for (double x : s.coords) {
        if (std::abs(x) > kMembershipTol && std::abs(x - 1.0) > kMembershipTol) return false;
      }
      return true;
    case ModelKind::Qubit:
      return std::abs(detail::norm(s.coords) - 1.0) <= kBlochPurityTol;
  }
  return false;
}

inline void require_valid_state(const Model& model, const State& s) {
  if (!validate_state(model, s)) throw InputError("state is outside the " + model.name() + " state space");
}

/// True iff the effect takes values in [0,1] on every pure state.
inline bool validate_effect(const Model& model, const Effect& e) {
  if (e.gradient.size() != model.dim()) return false;
  const auto [lo, hi] = detail::effect_range(model, e);
  return lo >= -kNormalizationTol && hi <= 1.0 + kNormalizationTol;
}

/// True iff every effect is valid and the effects sum to the unit effect.
inline bool validate_measurement(const Model& model, const Measurement& m) {
  if (m.effects.empty()) return false;
  Effect total{0.0, std::vector<double>(model.dim(), 0.0)};
  for (const auto& e : m.effects) {
    if (!validate_effect(model, e)) return false;
    total.offset += e.offset;
    for (std::size_t i = 0; i < model.dim(); ++i) total.gradient[i] += e.gradient[i];
  }
  const auto [lo, hi] = detail::effect_range(model, total);
  return std::abs(lo - 1.0) <= kNormalizationTol && std::abs(hi - 1.0) <= kNormalizationTol;
}

inline double effect_value(const Model& model, const Effect& e, const State& s) {
  detail::require_dim(model, s);
  if (!validate_effect(model, e)) throw ContractError("effect leaves [0,1] on a pure state");
  return detail::clamp_probability(e.raw(s.coords));
}

inline std::vector<double> measurement_probs(const Model& model, const Measurement& m, const State& s) {
  detail::require_dim(model, s);
  if (!validate_measurement(model, m)) throw ContractError("invalid measurement for " + model.name());
  std::vector<double> out;
  out.reserve(m.outcomes());
  for (const auto& e : m.effects) out.push_back(detail::clamp_probability(e.raw(s.coords)));
  return out;
}

/// Checks weights and, when pure_only is set, purity of every member.
inline bool validate_ensemble(const Model& model, const Ensemble& ens) {
  if (ens.weights.empty() || ens.weights.size() != ens.states.size()) return false;
  double sum = 0.0;
  for (double w : ens.weights) {
    if (!(w >= 0.0)) return false;
    sum += w;
  }
  if (std::abs(sum - 1.0) > kMembershipTol) return false;
  for (const auto& s : ens.states) {
    if (s.size() != model.dim() || !validate_state(model, s)) return false;
    if (ens.pure_only && !is_pure(model, s)) return false;
  }
  return true;
}

/// Barycentre sum_x p_x s_x of a valid ensemble.
inline State mix(const Model& model, const Ensemble& ens) {
  if (!validate_ensemble(model, ens)) throw InputError("invalid ensemble for " + model.name());
  State out(std::vector<double>(model.dim(), 0.0));
  for (std::size_t x = 0; x < ens.size(); ++x) {
    for (std::size_t i = 0; i < model.dim(); ++i) out.coords[i] += ens.weights[x] * ens.states[x].coords[i];
  }
  // Rounding can push a barycentre a few ulps outside the box or simplex.
  if (model.kind() == ModelKind::Squared) {
    for (double& c : out.coords) c = std::clamp(c, 0.0, 1.0);
  }
  return out;
}

}  // namespace gpt
