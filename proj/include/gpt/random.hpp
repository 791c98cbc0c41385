#pragma once

// Seeded random states and ensembles for property checks and verification.

#include <cmath>
#include <numbers>
#include <vector>

#include "gpt/core.hpp"
#include "gpt/optimize.hpp"

namespace gpt {

inline State random_pure_state(const Model& model, Rng& rng) {
  switch (model.kind()) {
    case ModelKind::Classical: {
      State s(std::vector<double>(model.dim(), 0.0));
      s.coords[rng.next() % model.dim()] = 1.0;
      return s;
    }
    case ModelKind::Squared:
      return State{static_cast<double>(rng.next() % 2), static_cast<double>(rng.next() % 2)};
    case ModelKind::Qubit: {
      const auto u = detail::direction(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * std::numbers::pi));
      return State{u[0], u[1], u[2]};
    }
  }
  return {};
}

/// Uniform on the squared box and the Bloch ball; flat Dirichlet on the simplex.
inline State random_state(const Model& model, Rng& rng) {
  switch (model.kind()) {
    case ModelKind::Classical: {
      State s(std::vector<double>(model.dim()));
      double total = 0.0;
      for (double& x : s.coords) {
        x = -std::log(1.0 - rng.uniform());
        total += x;
      }
      for (double& x : s.coords) x /= total;
      return s;
    }
    case ModelKind::Squared:
      return State{rng.uniform(), rng.uniform()};
    case ModelKind::Qubit: {
      State s = random_pure_state(model, rng);
      const double r = std::cbrt(rng.uniform());
      for (double& x : s.coords) x *= r;
      return s;
    }
  }
  return {};
}

/// Normalised random weights, each bounded away from zero.
inline std::vector<double> random_weights(Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : w) {
    x = 0.05 + rng.uniform();
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

inline Ensemble random_ensemble(const Model& model, Rng& rng, int members, bool pure) {
  Ensemble ens;
  ens.pure_only = pure;
  ens.weights = random_weights(rng, members);
  for (int x = 0; x < members; ++x) ens.states.push_back(pure ? random_pure_state(model, rng) : random_state(model, rng));
  return ens;
}

}  // namespace gpt
