#pragma once

// Concrete models: the classical simplex, the squared model (gbit) and the
// qubit in its Bloch picture. Each supplies its fine-grained measurement
// family as a box chart, and the closed forms known for its entropies.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/info.hpp"
#include "gpt/optimize.hpp"

namespace gpt {

// ---------------------------------------------------------------------------
// Measurements

/// Fine-grained squared-model measurement with readout
/// (a c1, a (1-c1), (1-a) c2, (1-a)(1-c2)).
inline Measurement squared_fg_measurement(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0,1]");
  const double beta = 1.0 - alpha;
  Measurement m;
  m.effects = {Effect{0.0, {alpha, 0.0}}, Effect{alpha, {-alpha, 0.0}}, Effect{0.0, {0.0, beta}},
               Effect{beta, {0.0, -beta}}};
  m.label = "squared-fg(alpha=" + std::to_string(alpha) + ")";
  return m;
}

/// Readout m_i(p) = p_i of a d-outcome classical system.
inline Measurement classical_canonical_measurement(int d) {
  if (d < 2) throw InputError("classical measurement needs d >= 2");
  Measurement m;
  for (int i = 0; i < d; ++i) {
    Effect e{0.0, std::vector<double>(static_cast<std::size_t>(d), 0.0)};
    e.gradient[static_cast<std::size_t>(i)] = 1.0;
    m.effects.push_back(std::move(e));
  }
  m.label = "classical-canonical";
  return m;
}

using Vec3 = std::array<double, 3>;

/// Rank-one qubit POVM: effect y is (w_y / 2)(I + u_y . sigma).
struct QubitPovm {
  std::vector<double> weights;
  std::vector<Vec3> directions;
};

/// Builds the POVM, or nullopt when the closure sum_y w_y u_y = 0 or
/// sum_y w_y = 2 fails by more than 1e-9.
inline std::optional<Measurement> qubit_rank1_povm(const QubitPovm& p) {
  const std::size_t n = p.weights.size();
  if (n < 2 || n > 4 || p.directions.size() != n) throw InputError("qubit POVM needs 2 to 4 outcomes");
  double total = 0.0;
  Vec3 closure{0.0, 0.0, 0.0};
  Measurement m;
  for (std::size_t y = 0; y < n; ++y) {
    const double w = p.weights[y];
    if (!(w >= -kNormalizationTol)) return std::nullopt;
    const double len = detail::norm(p.directions[y]);
    if (w > kNormalizationTol && std::abs(len - 1.0) > kNormalizationTol) return std::nullopt;
    total += w;
    Effect e{0.5 * std::max(w, 0.0), {0.0, 0.0, 0.0}};
    for (int i = 0; i < 3; ++i) {
      closure[i] += w * p.directions[y][i];
      e.gradient[i] = 0.5 * std::max(w, 0.0) * p.directions[y][i];
    }
    m.effects.push_back(std::move(e));
  }
  if (std::abs(total - 2.0) > kNormalizationTol || detail::norm(closure) > kNormalizationTol) return std::nullopt;
  m.label = "qubit-rank1-povm(n=" + std::to_string(n) + ")";
  return m;
}

// ---------------------------------------------------------------------------
// Fine-grained families as box charts

/// Point in a model's measurement-parameter box.
struct FgParam {
  std::vector<double> values;
};

/// The fine-grained measurements of a model, charted by a box.
///
/// squared: one coordinate alpha. classical: no coordinates, the canonical
/// readout only. qubit with n outcomes: n-2 stick-breaking weights q over the
/// first n-1 outcomes, then n-1 directions (z, phi). With m = sum q_y u_y the
/// scale mu = 2 / (1 + |m|) gives w_y = mu q_y, and the last outcome takes
/// w_n = 2 - mu along -m / |m|, which closes the POVM exactly.
class MeasurementFamily {
 public:
  explicit MeasurementFamily(Model model, int qubit_outcomes = 4) : model_(model), outcomes_(qubit_outcomes) {
    if (model.kind() == ModelKind::Qubit && (outcomes_ < 2 || outcomes_ > 4)) {
      throw InputError("qubit measurement family supports 2 to 4 outcomes");
    }
  }

  const Model& model() const { return model_; }

  std::size_t size() const {
    switch (model_.kind()) {
      case ModelKind::Classical: return 0;
      case ModelKind::Squared: return 1;
      case ModelKind::Qubit: return static_cast<std::size_t>(outcomes_ - 2) + 2 * static_cast<std::size_t>(outcomes_ - 1);
    }
    return 0;
  }

  Box box() const {
    Box b(std::vector<double>(size(), 0.0), std::vector<double>(size(), 1.0));
    if (model_.kind() == ModelKind::Qubit) {
      const auto sticks = static_cast<std::size_t>(outcomes_ - 2);
      for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(outcomes_); ++j) {
        b.lower[sticks + 2 * j] = -1.0;
        b.upper[sticks + 2 * j + 1] = 2.0 * std::numbers::pi;
      }
    }
    return b;
  }

  std::optional<QubitPovm> qubit_povm(std::span<const double> v) const {
    const auto sticks = static_cast<std::size_t>(outcomes_ - 2);
    const auto q = detail::stick_breaking(v.subspan(0, sticks));
    QubitPovm p;
    Vec3 m{0.0, 0.0, 0.0};
    for (std::size_t y = 0; y + 1 < static_cast<std::size_t>(outcomes_); ++y) {
      const auto u = detail::direction(v[sticks + 2 * y], v[sticks + 2 * y + 1]);
      p.directions.push_back(u);
      for (int i = 0; i < 3; ++i) m[i] += q[y] * u[i];
    }
    const double len = detail::norm(m);
    const double mu = 2.0 / (1.0 + len);
    for (std::size_t y = 0; y < q.size(); ++y) p.weights.push_back(mu * q[y]);
    p.weights.push_back(2.0 - mu);
    if (len > 1e-12) {
      p.directions.push_back(Vec3{-m[0] / len, -m[1] / len, -m[2] / len});
    } else {
      p.directions.push_back(Vec3{0.0, 0.0, 1.0});
    }
    return p;
  }

  /// Measurement at a box point; nullopt if the point is infeasible.
  std::optional<Measurement> decode(std::span<const double> v) const {
    switch (model_.kind()) {
      case ModelKind::Classical: return classical_canonical_measurement(static_cast<int>(model_.dim()));
      case ModelKind::Squared: return squared_fg_measurement(std::clamp(v[0], 0.0, 1.0));
      case ModelKind::Qubit: {
        const auto p = qubit_povm(v);
        if (!p) return std::nullopt;
        return qubit_rank1_povm(*p);
      }
    }
    return std::nullopt;
  }

  /// Random start; for the qubit, r % 3 == 1 starts from a two-outcome
  /// (projective) member and r % 3 == 2 from a three-outcome one.
  std::vector<double> sample(Rng& rng, int restart) const {
    auto x = uniform_point(box(), rng);
    if (model_.kind() == ModelKind::Qubit && outcomes_ > 2) {
      const int level = restart % 3;
      const int active = level == 1 ? 2 : (level == 2 ? 3 : outcomes_);
      // active outcomes = active - 1 free ones plus the closing outcome
      const int sticks = outcomes_ - 2;
      for (int j = active - 2; j < sticks; ++j) x[static_cast<std::size_t>(j)] = (j == active - 2) ? 1.0 : 0.0;
    }
    return x;
  }

 private:
  Model model_;
  int outcomes_;
};

/// Squared-model measurements at alpha = 1 then alpha = 0. Objectives affine
/// in alpha, and concave ones under minimisation, are extremised there.
inline const std::array<Measurement, 2>& squared_extreme_measurements() {
  static const std::array<Measurement, 2> ms{squared_fg_measurement(1.0), squared_fg_measurement(0.0)};
  return ms;
}

// ---------------------------------------------------------------------------
// Qubit quantities

struct BlochSpectrum {
  double lambda_plus = 0.5;
  double lambda_minus = 0.5;
};

inline BlochSpectrum bloch_spectrum(const State& r) {
  if (r.size() != 3) throw InputError("Bloch vector needs 3 coordinates");
  const double len = detail::norm(r.coords);
  if (len > 1.0 + kMembershipTol) throw InputError("Bloch vector longer than one");
  const double l = std::min(len, 1.0);
  return {0.5 * (1.0 + l), 0.5 * (1.0 - l)};
}

/// von Neumann entropy of the qubit with Bloch vector r.
inline double qubit_vn_entropy(const State& r) { return binary_entropy(bloch_spectrum(r).lambda_plus); }

/// Holevo quantity S(rho) - sum_x p_x S(rho_x) of a qubit ensemble.
inline double qubit_chi(const Ensemble& ens) {
  const Model q = Model::qubit();
  const State rho = mix(q, ens);
  double avg = 0.0;
  for (std::size_t x = 0; x < ens.size(); ++x) avg += ens.weights[x] * qubit_vn_entropy(ens.states[x]);
  return std::max(qubit_vn_entropy(rho) - avg, 0.0);
}

// ---------------------------------------------------------------------------
// Squared-model closed forms

namespace detail {

inline void require_squared(const State& s) {
  if (!validate_state(Model::squared(), s)) throw InputError("not a squared-model state");
}

// Corner weights (p00, p01, p10, p11) of the pure decomposition with p11 = t.
inline std::array<double, 4> corner_weights(double c1, double c2, double t) {
  return {std::max(1.0 - c1 - c2 + t, 0.0), std::max(c2 - t, 0.0), std::max(c1 - t, 0.0), std::max(t, 0.0)};
}

inline double corner_entropy(double c1, double c2, double t) {
  const auto w = corner_weights(c1, c2, t);
  return entropy_bits(w);
}

inline std::pair<double, double> corner_interval(double c1, double c2) {
  return {std::max(0.0, c1 + c2 - 1.0), std::min(c1, c2)};
}

}  // namespace detail

/// min(h(c1), h(c2)).
inline double squared_s1_closed(const State& s) {
  detail::require_squared(s);
  return std::min(binary_entropy(s[0]), binary_entropy(s[1]));
}

/// max(h(c1), h(c2)).
inline double squared_s2_closed(const State& s) {
  detail::require_squared(s);
  return std::max(binary_entropy(s[0]), binary_entropy(s[1]));
}

/// h(c1) + h(c2): the induced entropy of S2 and S3, invariant under induction.
inline double squared_s2prime_closed(const State& s) {
  detail::require_squared(s);
  return binary_entropy(s[0]) + binary_entropy(s[1]);
}

inline constexpr int kS3GridPoints = 1024;
inline constexpr double kS3Tolerance = 1e-9;

/// Minimum mixing entropy over the pure (corner) decompositions of s. The
/// decompositions form the segment p11 = t, t in [max(0, c1+c2-1), min(c1, c2)];
/// a 1024-point grid with both endpoints is refined by golden-section search
/// around the best grid point to 1e-9 in t.
inline double squared_s3_exact(const State& s) {
  detail::require_squared(s);
  const double c1 = s[0], c2 = s[1];
  const auto [lo, hi] = detail::corner_interval(c1, c2);
  if (hi - lo <= kS3Tolerance) return detail::corner_entropy(c1, c2, lo);

  const double dt = (hi - lo) / (kS3GridPoints - 1);
  int best = 0;
  double best_h = detail::corner_entropy(c1, c2, lo);
  for (int i = 1; i < kS3GridPoints; ++i) {
    const double t = (i == kS3GridPoints - 1) ? hi : lo + i * dt;
    const double h = detail::corner_entropy(c1, c2, t);
    if (h < best_h) {
      best_h = h;
      best = i;
    }
  }

  double a = lo + std::max(best - 1, 0) * dt;
  double b = std::min(lo + (best + 1) * dt, hi);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = detail::corner_entropy(c1, c2, x1), f2 = detail::corner_entropy(c1, c2, x2);
  while (b - a > kS3Tolerance) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = detail::corner_entropy(c1, c2, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = detail::corner_entropy(c1, c2, x2);
    }
  }
  return std::min({best_h, f1, f2});
}

/// Same minimum from the endpoints alone: the mixing entropy is concave
/// along the segment, so its minimum sits at an end.
inline double squared_s3_endpoints(const State& s) {
  detail::require_squared(s);
  const auto [lo, hi] = detail::corner_interval(s[0], s[1]);
  return std::min(detail::corner_entropy(s[0], s[1], lo), detail::corner_entropy(s[0], s[1], hi));
}

/// max_i [h(c_i) - sum_x p_x h(c_ix)] for an ensemble with barycentre
/// (c1, c2); i = 1 wins ties.
inline double squared_accinfo_closed(const Ensemble& ens) {
  const Model sq = Model::squared();
  const State s = mix(sq, ens);
  double best = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    double v = binary_entropy(s[i]);
    for (std::size_t x = 0; x < ens.size(); ++x) v -= ens.weights[x] * binary_entropy(ens.states[x][i]);
    if (i == 0 || v > best) best = v;
  }
  return std::max(best, 0.0);
}

/// The two edge decompositions s = c1 (1, c2) + (1 - c1)(0, c2) and
/// s = c2 (c1, 1) + (1 - c2)(c1, 0).
inline std::vector<Ensemble> squared_edge_decompositions(const State& s) {
  detail::require_squared(s);
  const double c1 = s[0], c2 = s[1];
  return {Ensemble{{c1, 1.0 - c1}, {State{1.0, c2}, State{0.0, c2}}, false},
          Ensemble{{c2, 1.0 - c2}, {State{c1, 1.0}, State{c1, 0.0}}, false}};
}

// ---------------------------------------------------------------------------
// Closed-form registry

enum class EntropyBase { S1, S2, S3, Shannon, VonNeumann, ClosedForm };

inline const char* to_string(EntropyBase b) {
  switch (b) {
    case EntropyBase::S1: return "S1";
    case EntropyBase::S2: return "S2";
    case EntropyBase::S3: return "S3";
    case EntropyBase::Shannon: return "H";
    case EntropyBase::VonNeumann: return "Sq";
    case EntropyBase::ClosedForm: return "closed";
  }
  return "?";
}

struct ClosedForm {
  std::string name;
  ModelKind model;
  double (*value)(const State&);
};

namespace detail {

inline double classical_shannon(const State& p) { return shannon_entropy(p.coords); }

inline const std::vector<ClosedForm>& closed_form_table() {
  static const std::vector<ClosedForm> table{
      {"squared.s1", ModelKind::Squared, &squared_s1_closed},
      {"squared.s2", ModelKind::Squared, &squared_s2_closed},
      {"squared.s3", ModelKind::Squared, &squared_s3_endpoints},
      {"squared.s3_exact", ModelKind::Squared, &squared_s3_exact},
      {"squared.s2prime", ModelKind::Squared, &squared_s2prime_closed},
      {"classical.shannon", ModelKind::Classical, &classical_shannon},
      {"qubit.vn", ModelKind::Qubit, &qubit_vn_entropy},
  };
  return table;
}

}  // namespace detail

inline std::optional<ClosedForm> closed_form_by_name(const std::string& name) {
  for (const auto& cf : detail::closed_form_table()) {
    if (cf.name == name) return cf;
  }
  return std::nullopt;
}

/// Closed form of the entropy obtained by applying `depth` inductions to
/// `base` on this model, when one is known.
///
/// squared: S1 -> min h, S1' = S2 -> max h, S2 -> max h, S3 -> corner
/// minimum, and every further induction of S2 or S3 (and S1'') is
/// h(c1) + h(c2). classical: S1, S2, S3 and Shannon are all H at every depth.
/// qubit: S1, S2, S3 and von Neumann are all S_q at every depth.
inline std::optional<ClosedForm> find_closed_form(const Model& model, EntropyBase base, int depth) {
  if (depth < 0) return std::nullopt;
  std::string name;
  switch (model.kind()) {
    case ModelKind::Squared:
      if (base == EntropyBase::S1) name = depth == 0 ? "squared.s1" : depth == 1 ? "squared.s2" : "squared.s2prime";
      if (base == EntropyBase::S2) name = depth == 0 ? "squared.s2" : "squared.s2prime";
      if (base == EntropyBase::S3) name = depth == 0 ? "squared.s3" : "squared.s2prime";
      break;
    case ModelKind::Classical:
      if (base != EntropyBase::VonNeumann && base != EntropyBase::ClosedForm) name = "classical.shannon";
      break;
    case ModelKind::Qubit:
      if (base != EntropyBase::Shannon && base != EntropyBase::ClosedForm) name = "qubit.vn";
      break;
  }
  if (name.empty()) return std::nullopt;
  return closed_form_by_name(name);
}

}  // namespace gpt
