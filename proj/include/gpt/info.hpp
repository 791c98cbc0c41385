#pragma once

// Classical information quantities, all in bits.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gpt/core.hpp"

namespace gpt {

namespace detail {

// -x log2 x with 0 log 0 = 0.
inline double plogp(double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; }

inline double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) h += plogp(x);
  return h;
}

}  // namespace detail

/// h(x) = -x log2 x - (1-x) log2 (1-x).
inline double binary_entropy(double x) {
  if (!(x >= -kMembershipTol && x <= 1.0 + kMembershipTol)) {
    throw InputError("binary_entropy argument outside [0,1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  return std::clamp(detail::plogp(x) + detail::plogp(1.0 - x), 0.0, 1.0);
}

/// Throws InputError unless p is a probability vector (entries >= -1e-12,
/// total within 1e-9 of one).
inline void require_prob_vector(std::span<const double> p) {
  if (p.empty()) throw InputError("empty probability vector");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= -kMembershipTol)) throw InputError("negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kNormalizationTol) throw InputError("probabilities do not sum to one");
}

inline double shannon_entropy(std::span<const double> p) {
  require_prob_vector(p);
  double h = 0.0;
  for (double x : p) h += detail::plogp(std::max(x, 0.0));
  return h;
}

/// Joint law p(x, y): rows are messages x, columns are outcomes y.
class JointDistribution {
 public:
  JointDistribution(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), table_(rows * cols, 0.0) {}
  JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> table)
      : rows_(rows), cols_(cols), table_(std::move(table)) {
    if (table_.size() != rows_ * cols_) throw InputError("joint table size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t x, std::size_t y) { return table_[x * cols_ + y]; }
  double operator()(std::size_t x, std::size_t y) const { return table_[x * cols_ + y]; }
  std::span<const double> table() const { return table_; }

  std::vector<double> row_marginal() const {
    std::vector<double> m(rows_, 0.0);
    for (std::size_t x = 0; x < rows_; ++x)
      for (std::size_t y = 0; y < cols_; ++y) m[x] += (*this)(x, y);
    return m;
  }
  std::vector<double> col_marginal() const {
    std::vector<double> m(cols_, 0.0);
    for (std::size_t x = 0; x < rows_; ++x)
      for (std::size_t y = 0; y < cols_; ++y) m[y] += (*this)(x, y);
    return m;
  }

  bool valid() const {
    double sum = 0.0;
    for (double v : table_) {
      if (!(v >= 0.0)) return false;
      sum += v;
    }
    return rows_ > 0 && cols_ > 0 && std::abs(sum - 1.0) <= kNormalizationTol;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> table_;
};

/// p(x, y) = p_x m_y(s_x).
inline JointDistribution joint_distribution(const Model& model, const Ensemble& ens, const Measurement& m) {
  if (!validate_ensemble(model, ens)) throw InputError("invalid ensemble for " + model.name());
  JointDistribution j(ens.size(), m.outcomes());
  for (std::size_t x = 0; x < ens.size(); ++x) {
    const auto probs = measurement_probs(model, m, ens.states[x]);
    for (std::size_t y = 0; y < probs.size(); ++y) j(x, y) = ens.weights[x] * probs[y];
  }
  return j;
}

namespace detail {

// Below this, I(X:Y) is indistinguishable from rounding in the marginals.
inline constexpr double kInformationFloor = 1e-14;

// I(X:Y) = sum p(x,y) log p(x,y) / (p(x) p(y)) on a table known to be a joint law.
inline double mutual_information_unchecked(const JointDistribution& j) {
  const auto px = j.row_marginal();
  const auto py = j.col_marginal();
  double v = 0.0;
  for (std::size_t x = 0; x < j.rows(); ++x) {
    for (std::size_t y = 0; y < j.cols(); ++y) {
      const double p = j(x, y);
      if (p > 0.0) v += p * std::log2(p / (px[x] * py[y]));
    }
  }
  return v < kInformationFloor ? 0.0 : v;
}

}  // namespace detail

inline double mutual_information(const JointDistribution& j) {
  if (!j.valid()) throw InputError("joint distribution is not normalised");
  return detail::mutual_information_unchecked(j);
}

}  // namespace gpt
